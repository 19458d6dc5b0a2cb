#include "ahvx/worldsheet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ahvx {

namespace {
// perturbation value and derivatives
void pert_eval(const SurfacePerturbation& p, double L, double y0, double y1, Vec3* v, Vec3* d0,
               Vec3* d1, Vec3* d00, Vec3* d01, Vec3* d11) {
    if (p.amp == 0.0) {
        if (v) *v = {0, 0, 0};
        if (d0) *d0 = {0, 0, 0};
        if (d1) *d1 = {0, 0, 0};
        if (d00) *d00 = {0, 0, 0};
        if (d01) *d01 = {0, 0, 0};
        if (d11) *d11 = {0, 0, 0};
        return;
    }
    double w1 = 2.0 * pi * p.k1 / L;
    double st = std::sin(p.om0 * y0 + p.ph0), ct = std::cos(p.om0 * y0 + p.ph0);
    double cs = std::cos(w1 * y1), sn = std::sin(w1 * y1);
    if (v) *v = (p.amp * st * cs) * p.dir;
    if (d0) *d0 = (p.amp * p.om0 * ct * cs) * p.dir;
    if (d1) *d1 = (-p.amp * w1 * st * sn) * p.dir;
    if (d00) *d00 = (-p.amp * p.om0 * p.om0 * st * cs) * p.dir;
    if (d01) *d01 = (-p.amp * p.om0 * w1 * ct * sn) * p.dir;
    if (d11) *d11 = (-p.amp * w1 * w1 * st * cs) * p.dir;
}
} // namespace

Vec3 Worldsheet::h(double y0, double y1) const {
    Vec3 v = 0.5 * (curve.eval(y1 + y0) + curve.eval(y1 - y0));
    Vec3 pv;
    pert_eval(pert, curve.L, y0, y1, &pv, nullptr, nullptr, nullptr, nullptr, nullptr);
    return v + pv;
}

void Worldsheet::dh(double y0, double y1, Vec3* h0d, Vec3* h1d) const {
    Vec3 dp = curve.deriv(y1 + y0), dm = curve.deriv(y1 - y0);
    Vec3 p0, p1;
    pert_eval(pert, curve.L, y0, y1, nullptr, &p0, &p1, nullptr, nullptr, nullptr);
    if (h0d) *h0d = 0.5 * (dp - dm) + p0;
    if (h1d) *h1d = 0.5 * (dp + dm) + p1;
}

void Worldsheet::ddh(double y0, double y1, Vec3* h00, Vec3* h01, Vec3* h11) const {
    Vec3 ddp = curve.deriv2(y1 + y0), ddm = curve.deriv2(y1 - y0);
    Vec3 p00, p01, p11;
    pert_eval(pert, curve.L, y0, y1, nullptr, nullptr, nullptr, &p00, &p01, &p11);
    if (h00) *h00 = 0.5 * (ddp + ddm) + p00;
    if (h01) *h01 = 0.5 * (ddp - ddm) + p01;
    if (h11) *h11 = 0.5 * (ddp + ddm) + p11;
}

Vec4 Worldsheet::H(double y0, double y1) const {
    Vec3 v = h(y0, y1);
    return {y0, v[0], v[1], v[2]};
}

void Worldsheet::dH(double y0, double y1, Vec4* d0, Vec4* d1) const {
    Vec3 a, b;
    dh(y0, y1, &a, &b);
    if (d0) *d0 = {1.0, a[0], a[1], a[2]};
    if (d1) *d1 = {0.0, b[0], b[1], b[2]};
}

void Worldsheet::ddH(double y0, double y1, Vec4* d00, Vec4* d01, Vec4* d11) const {
    Vec3 a, b, c;
    ddh(y0, y1, &a, &b, &c);
    if (d00) *d00 = {0.0, a[0], a[1], a[2]};
    if (d01) *d01 = {0.0, b[0], b[1], b[2]};
    if (d11) *d11 = {0.0, c[0], c[1], c[2]};
}

void Worldsheet::gamma(double y0, double y1, double g[2][2]) const {
    Vec4 d0, d1;
    dH(y0, y1, &d0, &d1);
    g[0][0] = minkowski_dot(d0, d0);
    g[0][1] = g[1][0] = minkowski_dot(d0, d1);
    g[1][1] = minkowski_dot(d1, d1);
}

double Worldsheet::conformal_residual(int n0, int n1) const {
    double m = 0.0;
    for (int i = 0; i <= n0; ++i) {
        double y0 = T1 * (2.0 * i / n0 - 1.0);
        for (int j = 0; j < n1; ++j) {
            double y1 = curve.L * j / n1;
            double g[2][2];
            gamma(y0, y1, g);
            m = std::max({m, std::abs(g[0][1]), std::abs(g[0][0] + g[1][1])});
        }
    }
    return m;
}

double Worldsheet::mean_curvature_residual(int n0, int n1) const {
    double m = 0.0;
    for (int i = 0; i <= n0; ++i) {
        double y0 = T1 * (2.0 * i / n0 - 1.0);
        for (int j = 0; j < n1; ++j) {
            double y1 = curve.L * j / n1;
            double g[2][2];
            gamma(y0, y1, g);
            double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if (std::abs(det) < 1e-14) continue;
            double gi[2][2] = {{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}};
            Vec4 d00, d01, d11;
            ddH(y0, y1, &d00, &d01, &d11);
            Vec4 R;
            for (int d = 0; d < 4; ++d)
                R[d] = gi[0][0] * d00[d] + 2.0 * gi[0][1] * d01[d] + gi[1][1] * d11[d];
            // remove tangential part (Minkowski projection onto span{d0H, d1H})
            Vec4 t0, t1;
            dH(y0, y1, &t0, &t1);
            // solve 2x2 system for projection coefficients
            double b0 = minkowski_dot(R, t0), b1 = minkowski_dot(R, t1);
            double a0 = gi[0][0] * b0 + gi[0][1] * b1;
            double a1 = gi[1][0] * b0 + gi[1][1] * b1;
            double n2 = 0.0;
            for (int d = 0; d < 4; ++d) {
                double rd = R[d] - a0 * t0[d] - a1 * t1[d];
                n2 += rd * rd;
            }
            m = std::max(m, std::sqrt(n2));
        }
    }
    return m;
}

Worldsheet build_surface(const ClosedCurve& curve, double T_request, double c0_floor) {
    Worldsheet ws;
    ws.curve = curve;
    const int n0 = 512, n1 = 256;
    // scan gamma_11 = |d1 h|^2 over y0 in [0, T_request] (symmetric in y0)
    double T_ok = 0.0, c0_ok = 1e300;
    bool admissible = true;
    double c0_at_fail = 0.0;
    for (int i = 0; i <= n0; ++i) {
        double y0 = T_request * i / n0;
        double gmin = 1e300;
        for (int j = 0; j < n1; ++j) {
            Vec3 d0, d1;
            ws.dh(y0, curve.L * j / n1, &d0, &d1);
            gmin = std::min(gmin, dot(d1, d1));
        }
        if (gmin < c0_floor) {
            admissible = false;
            c0_at_fail = gmin;
            break;
        }
        T_ok = y0;
        c0_ok = std::min(c0_ok, gmin);
    }
    if (!admissible) {
        std::ostringstream ss;
        ss << "build_surface: requested T = " << T_request
           << " leaves the timelike window; largest admissible T1 = " << T_ok
           << " (c0 there = " << c0_ok << ", gamma_11 would reach " << c0_at_fail << ")";
        throw numeric_error(ss.str());
    }
    ws.T1 = T_request;
    ws.c0 = c0_ok;
    return ws;
}

} // namespace ahvx
