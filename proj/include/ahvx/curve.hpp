#ifndef AHVX_CURVE_HPP
#define AHVX_CURVE_HPP

#include <array>
#include <vector>

#include "ahvx/util.hpp"

namespace ahvx {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double t, const Vec3& a) { return {t * a[0], t * a[1], t * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm3(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Closed curve h0: R/LZ -> R^3 held as a truncated Fourier series in the
// arclength parameter. After arclength_reparametrize, |h0'| = 1 to 1e-8.
struct ClosedCurve {
    double L = 2.0 * pi;
    // h0(s) = c[0] + sum_k c[k] cos(2 pi k s / L) + s_[k] sin(2 pi k s / L)
    std::vector<Vec3> c, s_;

    int modes() const { return int(c.size()) - 1; }
    Vec3 eval(double s) const;
    Vec3 deriv(double s) const;
    Vec3 deriv2(double s) const;
    Vec3 deriv3(double s) const;

    double max_speed_defect(int samples = 4096) const; // max | |h0'| - 1 |
    double min_curvature_radius(int samples = 2048) const;
    double self_distance(int samples = 1024, double min_arc_sep_frac = 0.05) const;

    static ClosedCurve circle(double R, const Vec3& center = {0, 0, 0});
};

// Fit a truncated Fourier series through M uniform samples of a closed curve.
ClosedCurve fourier_fit(const std::vector<Vec3>& samples, double period, int modes);

// Reparametrize to unit speed: accepts either raw closed point samples
// (uniform in an arbitrary parameter) or an existing Fourier curve. Rejects
// self-intersecting inputs. Resulting curve satisfies | |h0'| - 1 | < tol.
ClosedCurve arclength_reparametrize(const std::vector<Vec3>& samples, int modes = 64,
                                    double tol = 1e-9);
ClosedCurve arclength_reparametrize(const ClosedCurve& raw, int modes = 64, double tol = 1e-9);

// Curve input/output: CSV of 3D points, or CSV of Fourier coefficients
// (rows k,cx,cy,cz,sx,sy,sz).
ClosedCurve load_curve_csv(const std::string& path, int modes = 64);
void write_curve_fourier_csv(const std::string& path, const ClosedCurve& c);

} // namespace ahvx

#endif
