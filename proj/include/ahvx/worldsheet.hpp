#ifndef AHVX_WORLDSHEET_HPP
#define AHVX_WORLDSHEET_HPP

#include "ahvx/curve.hpp"

namespace ahvx {

using Vec4 = std::array<double, 4>;

inline double minkowski_dot(const Vec4& a, const Vec4& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Additive test perturbation amp * sin(om0 y0 + ph0) * cos(2 pi k1 y1 / L) * dir,
// used to inject controlled mean-curvature violations.
struct SurfacePerturbation {
    double amp = 0.0;
    double om0 = 1.0;
    double ph0 = 0.0;
    int k1 = 0;
    Vec3 dir{0, 0, 1};
};

// Worldsheet of a closed string with zero initial velocity:
// H(y0,y1) = (y0, h(y0,y1)), h = (h0(y1+y0) + h0(y1-y0)) / 2.
struct Worldsheet {
    ClosedCurve curve;
    double T1 = 0.0; // validated timelike half-window
    double c0 = 0.0; // min gamma_11 over |y0| <= T1
    SurfacePerturbation pert; // amp = 0 for genuine minimal surfaces

    double period() const { return curve.L; }

    Vec3 h(double y0, double y1) const;
    void dh(double y0, double y1, Vec3* h0d, Vec3* h1d) const;   // d/dy0, d/dy1
    void ddh(double y0, double y1, Vec3* h00, Vec3* h01, Vec3* h11) const;

    Vec4 H(double y0, double y1) const;
    void dH(double y0, double y1, Vec4* d0, Vec4* d1) const;
    void ddH(double y0, double y1, Vec4* d00, Vec4* d01, Vec4* d11) const;

    // induced metric gamma_ab = eta(d_a H, d_b H)
    void gamma(double y0, double y1, double g[2][2]) const;

    // |gamma_01| and |gamma_00 + gamma_11| maxima over a sample grid
    double conformal_residual(int n0 = 64, int n1 = 256) const;

    // max norm of the normal projection of gamma^{ab} d_a d_b H over samples
    double mean_curvature_residual(int n0 = 64, int n1 = 256) const;
};

// Detects the timelike window: largest T1 <= T_request with
// min gamma_11 >= c0_floor. Throws if the requested T is not admissible,
// reporting the largest admissible T1 and its c0.
Worldsheet build_surface(const ClosedCurve& curve, double T_request, double c0_floor = 1e-3);

} // namespace ahvx

#endif
