#ifndef AHVX_CHART_HPP
#define AHVX_CHART_HPP

#include <memory>

#include "ahvx/worldsheet.hpp"

namespace ahvx {

// Minkowski-orthonormal normal frame over the worldsheet and the tubular
// chart psi(y) = H(y^tau) + nu1 y^2 + nu2 y^3.
//
// The frame is built by rotation-minimizing transport: along y^1 at y^0 = 0
// (with the loop holonomy distributed so the frame closes), then along y^0
// per column. d0 nu comes from the transport identity
//     d_a nu = -gamma^{bc} eta(nu, d_a d_b H) d_c H,
// exact for a rotation-minimizing field; d1 nu from high-order periodic
// differences of the stored rows.
struct FrameSample {
    Vec4 n1, n2;
    Vec4 d0n1, d0n2;
    Vec4 d1n1, d1n2;
};

struct ChartParams {
    int n0 = 257;            // y0 rows (odd, y0 = 0 is a node)
    int n1 = 640;            // y1 columns
    int rk_substeps = 4;
    double rho_cap_frac = 0.5; // cap on rho0 as fraction of curvature radius
    double frame_angle = 0.0;  // constant SO(2) rotation of (nu1, nu2)
    double inverse_tol = 1e-10;
};

struct ChartMetric {
    double g[4][4];
    double ginv[4][4];
    double sqrt_mg = 0.0; // sqrt(-det g)
    double b[4] = {0, 0, 0, 0};
};

struct InverseResult {
    bool in_tube = false;
    bool converged = false;
    double y[4] = {0, 0, 0, 0};
    int iterations = 0;
};

class NormalChart {
  public:
    Worldsheet ws;
    double T1 = 0.0;
    double rho0 = 0.0;
    double c0 = 0.0;
    ChartParams params;

    FrameSample frame(double y0, double y1) const;

    Vec4 psi(const double y[4]) const;
    // D[mu][alpha] = d psi^mu / d y^alpha
    void dpsi(const double y[4], double D[4][4]) const;

    ChartMetric metric(const double y[4], double fd_step = 0.0) const;
    // metric without the b-field differences (hot path for diagnostics)
    ChartMetric metric_basic(const double y[4]) const;

    // forward map with domain check (|y^nu| <= rho0, |y0| <= T1)
    Vec4 forward(const double y[4]) const;

    // Newton inversion seeded by a nearest-point scan (or an explicit guess).
    // rho_query bounds the tube radius used for the in/out verdict.
    InverseResult inverse(const Vec4& x, double rho_query, const double* guess = nullptr) const;

    // frame orthogonality/normality defect at a point (for certificates)
    double frame_defect(double y0, double y1) const;

    // internals exposed for tests
    double holonomy_angle = 0.0;

  private:
    friend NormalChart build_chart(const Worldsheet&, const ChartParams&);
    int n0_ = 0, n1_ = 0;
    double y0min_ = 0.0, dy0_ = 0.0, dy1_ = 0.0;
    std::vector<Vec4> nu1_, nu2_, d0nu1_, d0nu2_, d1nu1_, d1nu2_; // n0 x n1 row-major
};

// Builds the frame and certifies validity radii. T1 is taken from the
// worldsheet; rho0 from curvature/self-distance caps plus a sampled
// injectivity certificate (Jacobian positivity and pairwise image
// separation). Throws if the frame fails to close around the y^1 loop.
NormalChart build_chart(const Worldsheet& ws, const ChartParams& params = {});

struct ValidityReport {
    double rho0;
    double T1;
    double c0;
    double min_curvature_radius;
    double min_self_distance;
    bool certificate_passed;
};
ValidityReport validity_radii(const NormalChart& chart);

} // namespace ahvx

#endif
