#include "ahvx/chart.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ahvx {

namespace {

inline Vec4 vadd(const Vec4& a, const Vec4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Vec4 vsc(double t, const Vec4& a) { return {t * a[0], t * a[1], t * a[2], t * a[3]}; }

struct Frame {
    Vec4 n1, n2;
};

// transport derivative of a rotation-minimizing normal field in direction a
// (a = 0 or 1): d_a nu = -gamma^{bc} eta(nu, d_a d_b H) d_c H
Vec4 rmf_rate(const Worldsheet& ws, double y0, double y1, const Vec4& nu, int a) {
    Vec4 t0, t1, d00, d01, d11;
    ws.dH(y0, y1, &t0, &t1);
    ws.ddH(y0, y1, &d00, &d01, &d11);
    double g[2][2] = {{minkowski_dot(t0, t0), minkowski_dot(t0, t1)},
                      {minkowski_dot(t1, t0), minkowski_dot(t1, t1)}};
    double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    double gi[2][2] = {{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}};
    const Vec4* dd[2][2] = {{&d00, &d01}, {&d01, &d11}};
    const Vec4* tt[2] = {&t0, &t1};
    Vec4 r{0, 0, 0, 0};
    for (int b = 0; b < 2; ++b) {
        double coeff = minkowski_dot(nu, *dd[a][b]);
        for (int cc = 0; cc < 2; ++cc) r = vadd(r, vsc(-gi[b][cc] * coeff, *tt[cc]));
    }
    return r;
}

// Minkowski Gram-Schmidt of the frame against the exact tangents at a point
void gs_project(const Worldsheet& ws, double y0, double y1, Frame& f) {
    Vec4 t0, t1;
    ws.dH(y0, y1, &t0, &t1);
    double g[2][2] = {{minkowski_dot(t0, t0), minkowski_dot(t0, t1)},
                      {minkowski_dot(t1, t0), minkowski_dot(t1, t1)}};
    double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    auto project_out = [&](Vec4& v) {
        double b0 = minkowski_dot(v, t0), b1 = minkowski_dot(v, t1);
        double a0 = (g[1][1] * b0 - g[0][1] * b1) / det;
        double a1 = (-g[1][0] * b0 + g[0][0] * b1) / det;
        v = vadd(v, vadd(vsc(-a0, t0), vsc(-a1, t1)));
    };
    project_out(f.n1);
    double nn = minkowski_dot(f.n1, f.n1);
    if (nn <= 0) throw numeric_error("normal frame degenerated (non-spacelike nu1)");
    f.n1 = vsc(1.0 / std::sqrt(nn), f.n1);
    project_out(f.n2);
    f.n2 = vadd(f.n2, vsc(-minkowski_dot(f.n2, f.n1), f.n1));
    nn = minkowski_dot(f.n2, f.n2);
    if (nn <= 0) throw numeric_error("normal frame degenerated (non-spacelike nu2)");
    f.n2 = vsc(1.0 / std::sqrt(nn), f.n2);
}

// Minimum curvature radius and bottleneck distance over the time slices.
// Pairs closer in arc than ~pi * (local curvature radius) cannot bottleneck
// tighter than the curvature cap, so they are excluded from the chord scan.
void slice_caps(const Worldsheet& ws, double* rcurv_out, double* selfd_out) {
    const double L = ws.period();
    double rcurv = 1e300, selfd = 1e300;
    const int nslice = 9, m1 = 256;
    for (int si = 0; si < nslice; ++si) {
        double y0 = -ws.T1 + 2.0 * ws.T1 * si / (nslice - 1);
        double kmax = 0.0;
        std::vector<Vec3> pts(m1);
        std::vector<double> arc(m1 + 1, 0.0);
        for (int j = 0; j < m1; ++j) {
            double y1 = L * j / m1;
            Vec3 d0, d1, dd0, dd1, d11;
            ws.dh(y0, y1, &d0, &d1);
            ws.ddh(y0, y1, &dd0, &dd1, &d11);
            double sp = norm3(d1);
            if (sp > 1e-9) kmax = std::max(kmax, norm3(cross(d1, d11)) / (sp * sp * sp));
            pts[j] = ws.h(y0, y1);
            arc[j + 1] = arc[j] + sp * L / m1;
        }
        double rc = kmax > 0 ? 1.0 / kmax : 1e300;
        rcurv = std::min(rcurv, rc);
        double min_arc = std::min(0.9 * pi * rc, 0.25 * arc[m1]);
        for (int a = 0; a < m1; ++a)
            for (int b = a + 1; b < m1; ++b) {
                double da = std::min(arc[b] - arc[a], arc[m1] - (arc[b] - arc[a]));
                if (da < min_arc) continue;
                selfd = std::min(selfd, norm3(pts[a] - pts[b]));
            }
    }
    *rcurv_out = rcurv;
    *selfd_out = selfd;
}

// RK4 transport of the frame along a coordinate segment
void transport(const Worldsheet& ws, Frame& f, double y0, double y1, int dir, double step,
               int substeps) {
    double hh = step / substeps;
    for (int s = 0; s < substeps; ++s) {
        double a0 = y0 + (dir == 0 ? s * hh : 0.0), a1 = y1 + (dir == 1 ? s * hh : 0.0);
        auto rate = [&](const Vec4& v, double t) {
            double b0 = dir == 0 ? a0 + t : a0, b1 = dir == 1 ? a1 + t : a1;
            return rmf_rate(ws, b0, b1, v, dir);
        };
        for (Vec4* v : {&f.n1, &f.n2}) {
            Vec4 k1 = rate(*v, 0.0);
            Vec4 k2 = rate(vadd(*v, vsc(0.5 * hh, k1)), 0.5 * hh);
            Vec4 k3 = rate(vadd(*v, vsc(0.5 * hh, k2)), 0.5 * hh);
            Vec4 k4 = rate(vadd(*v, vsc(hh, k3)), hh);
            *v = vadd(*v, vsc(hh / 6.0,
                              vadd(vadd(k1, vsc(2.0, k2)), vadd(vsc(2.0, k3), k4))));
        }
    }
}

} // namespace

NormalChart build_chart(const Worldsheet& ws, const ChartParams& params) {
    NormalChart ch;
    ch.ws = ws;
    ch.T1 = ws.T1;
    ch.c0 = ws.c0;
    ch.params = params;
    const int n0 = params.n0 | 1; // force odd
    const int n1 = params.n1;
    ch.n0_ = n0;
    ch.n1_ = n1;
    const double L = ws.period();
    ch.y0min_ = -ws.T1;
    ch.dy0_ = 2.0 * ws.T1 / (n0 - 1);
    ch.dy1_ = L / n1;

    ch.nu1_.assign(std::size_t(n0) * n1, Vec4{});
    ch.nu2_.assign(std::size_t(n0) * n1, Vec4{});
    ch.d0nu1_.assign(std::size_t(n0) * n1, Vec4{});
    ch.d0nu2_.assign(std::size_t(n0) * n1, Vec4{});
    ch.d1nu1_.assign(std::size_t(n0) * n1, Vec4{});
    ch.d1nu2_.assign(std::size_t(n0) * n1, Vec4{});
    auto at = [&](int i, int j) { return std::size_t(i) * n1 + j; };
    const int i0 = (n0 - 1) / 2; // y0 = 0 row

    // seed at (0,0): zero initial velocity makes the normal plane spatial
    Vec3 t = ws.curve.deriv(0.0);
    Vec3 ref{0, 0, 1};
    Vec3 w = ref - dot(ref, t) * t;
    if (norm3(w) < 0.1) {
        ref = {1, 0, 0};
        w = ref - dot(ref, t) * t;
    }
    w = (1.0 / norm3(w)) * w;
    Vec3 r1 = cross(t, w);
    Frame f;
    f.n1 = {0.0, r1[0], r1[1], r1[2]};
    f.n2 = {0.0, w[0], w[1], w[2]};
    gs_project(ws, 0.0, 0.0, f);

    // transport around the y1 loop at y0 = 0
    std::vector<Frame> row(n1 + 1);
    row[0] = f;
    for (int j = 0; j < n1; ++j) {
        Frame g = row[j];
        transport(ws, g, 0.0, j * ch.dy1_, 1, ch.dy1_, params.rk_substeps);
        gs_project(ws, 0.0, (j + 1) * ch.dy1_, g);
        row[j + 1] = g;
    }
    // loop holonomy: express the returned frame in the initial one
    double ccos = minkowski_dot(row[n1].n1, row[0].n1);
    double csin = minkowski_dot(row[n1].n1, row[0].n2);
    double mag = std::hypot(ccos, csin);
    if (mag < 0.5)
        throw numeric_error("normal frame continuation obstructed around the y1 loop");
    ch.holonomy_angle = std::atan2(csin, ccos);
    // distribute -holonomy so the frame closes
    for (int j = 0; j < n1; ++j) {
        double th = -ch.holonomy_angle * (double(j) / n1);
        Frame& g = row[j];
        Vec4 a = vadd(vsc(std::cos(th), g.n1), vsc(std::sin(th), g.n2));
        Vec4 b = vadd(vsc(-std::sin(th), g.n1), vsc(std::cos(th), g.n2));
        g.n1 = a;
        g.n2 = b;
    }

    // transport each column in y0, both directions from the middle row
    par::parallel_for(n1, [&](std::int64_t jb, std::int64_t je) {
        for (int j = int(jb); j < int(je); ++j) {
            double y1 = j * ch.dy1_;
            ch.nu1_[at(i0, j)] = row[j].n1;
            ch.nu2_[at(i0, j)] = row[j].n2;
            for (int dir = -1; dir <= 1; dir += 2) {
                Frame g = row[j];
                for (int i = i0 + dir; i >= 0 && i < n0; i += dir) {
                    transport(ws, g, ch.y0min_ + (i - dir) * ch.dy0_, y1, 0, dir * ch.dy0_,
                              params.rk_substeps);
                    gs_project(ws, ch.y0min_ + i * ch.dy0_, y1, g);
                    ch.nu1_[at(i, j)] = g.n1;
                    ch.nu2_[at(i, j)] = g.n2;
                }
            }
            for (int i = 0; i < n0; ++i) {
                double y0 = ch.y0min_ + i * ch.dy0_;
                ch.d0nu1_[at(i, j)] = rmf_rate(ws, y0, y1, ch.nu1_[at(i, j)], 0);
                ch.d0nu2_[at(i, j)] = rmf_rate(ws, y0, y1, ch.nu2_[at(i, j)], 0);
            }
        }
    });

    // d1 nu by 4th-order periodic differences along rows
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            auto idx = [&](int jj) { return at(i, (jj % n1 + n1) % n1); };
            for (int d = 0; d < 4; ++d) {
                ch.d1nu1_[at(i, j)][d] =
                    (8.0 * (ch.nu1_[idx(j + 1)][d] - ch.nu1_[idx(j - 1)][d]) -
                     (ch.nu1_[idx(j + 2)][d] - ch.nu1_[idx(j - 2)][d])) /
                    (12.0 * ch.dy1_);
                ch.d1nu2_[at(i, j)][d] =
                    (8.0 * (ch.nu2_[idx(j + 1)][d] - ch.nu2_[idx(j - 1)][d]) -
                     (ch.nu2_[idx(j + 2)][d] - ch.nu2_[idx(j - 2)][d])) /
                    (12.0 * ch.dy1_);
            }
        }

    // validity radius caps from the time-slice geometry
    double rcurv, selfd;
    slice_caps(ws, &rcurv, &selfd);
    ch.rho0 = std::min(params.rho_cap_frac * rcurv, 0.5 * selfd);
    return ch;
}

FrameSample NormalChart::frame(double y0, double y1) const {
    const double L = ws.period();
    y1 -= L * std::floor(y1 / L);
    double u = (y0 - y0min_) / dy0_;
    int i = std::clamp(int(std::floor(u)), 0, n0_ - 2);
    double t = u - i;
    double v = y1 / dy1_;
    int j = int(std::floor(v));
    double s = v - j;

    auto at = [&](int ii, int jj) { return std::size_t(ii) * n1_ + ((jj % n1_ + n1_) % n1_); };
    // 6-point periodic Lagrange weights in y1 (stencil j-2..j+3)
    double w1[6];
    for (int m = -2; m <= 3; ++m) {
        double w = 1.0;
        for (int k = -2; k <= 3; ++k)
            if (k != m) w *= (s - k) / double(m - k);
        w1[m + 2] = w;
    }
    auto interp_row = [&](const std::vector<Vec4>& f, int ii) {
        Vec4 r{0, 0, 0, 0};
        for (int k = -2; k <= 3; ++k)
            r = vadd(r, vsc(w1[k + 2], f[at(ii, j + k)]));
        return r;
    };
    // Hermite in y0 for nu, Lagrange-4 in y0 for the derivatives
    auto hermite = [&](const std::vector<Vec4>& f, const std::vector<Vec4>& df) {
        Vec4 f0 = interp_row(f, i), f1 = interp_row(f, i + 1);
        Vec4 g0 = interp_row(df, i), g1 = interp_row(df, i + 1);
        double t2 = t * t, t3 = t2 * t;
        double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2,
               h11 = t3 - t2;
        return vadd(vadd(vsc(h00, f0), vsc(h01, f1)),
                    vsc(dy0_, vadd(vsc(h10, g0), vsc(h11, g1))));
    };
    auto lag4_y0 = [&](const std::vector<Vec4>& f) {
        int ia = std::clamp(i - 1, 0, n0_ - 4);
        double tt = u - ia;
        double w[4];
        w[0] = -(tt - 1) * (tt - 2) * (tt - 3) / 6.0;
        w[1] = tt * (tt - 2) * (tt - 3) / 2.0;
        w[2] = -tt * (tt - 1) * (tt - 3) / 2.0;
        w[3] = tt * (tt - 1) * (tt - 2) / 6.0;
        Vec4 r{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) r = vadd(r, vsc(w[k], interp_row(f, ia + k)));
        return r;
    };

    FrameSample out;
    out.n1 = hermite(nu1_, d0nu1_);
    out.n2 = hermite(nu2_, d0nu2_);
    out.d0n1 = lag4_y0(d0nu1_);
    out.d0n2 = lag4_y0(d0nu2_);
    out.d1n1 = lag4_y0(d1nu1_);
    out.d1n2 = lag4_y0(d1nu2_);

    double a = params.frame_angle;
    if (a != 0.0) {
        auto rot = [&](Vec4& x, Vec4& y) {
            Vec4 xr = vadd(vsc(std::cos(a), x), vsc(std::sin(a), y));
            Vec4 yr = vadd(vsc(-std::sin(a), x), vsc(std::cos(a), y));
            x = xr;
            y = yr;
        };
        rot(out.n1, out.n2);
        rot(out.d0n1, out.d0n2);
        rot(out.d1n1, out.d1n2);
    }
    return out;
}

double NormalChart::frame_defect(double y0, double y1) const {
    FrameSample f = frame(y0, y1);
    Vec4 t0, t1;
    ws.dH(y0, y1, &t0, &t1);
    double m = 0.0;
    m = std::max(m, std::abs(minkowski_dot(f.n1, f.n1) - 1.0));
    m = std::max(m, std::abs(minkowski_dot(f.n2, f.n2) - 1.0));
    m = std::max(m, std::abs(minkowski_dot(f.n1, f.n2)));
    m = std::max(m, std::abs(minkowski_dot(f.n1, t0)));
    m = std::max(m, std::abs(minkowski_dot(f.n1, t1)));
    m = std::max(m, std::abs(minkowski_dot(f.n2, t0)));
    m = std::max(m, std::abs(minkowski_dot(f.n2, t1)));
    return m;
}

Vec4 NormalChart::psi(const double y[4]) const {
    FrameSample f = frame(y[0], y[1]);
    Vec4 base = ws.H(y[0], y[1]);
    return vadd(base, vadd(vsc(y[2], f.n1), vsc(y[3], f.n2)));
}

void NormalChart::dpsi(const double y[4], double D[4][4]) const {
    FrameSample f = frame(y[0], y[1]);
    Vec4 t0, t1;
    ws.dH(y[0], y[1], &t0, &t1);
    Vec4 c0v = vadd(t0, vadd(vsc(y[2], f.d0n1), vsc(y[3], f.d0n2)));
    Vec4 c1v = vadd(t1, vadd(vsc(y[2], f.d1n1), vsc(y[3], f.d1n2)));
    for (int mu = 0; mu < 4; ++mu) {
        D[mu][0] = c0v[mu];
        D[mu][1] = c1v[mu];
        D[mu][2] = f.n1[mu];
        D[mu][3] = f.n2[mu];
    }
}

namespace {
double det4(const double m[4][4]) {
    double a[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        if (a[c][c] == 0.0) return 0.0;
        det *= a[c][c];
        for (int r = c + 1; r < 4; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

void inv4(const double m[4][4], double out[4][4]) {
    double a[4][8];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
        for (int j = 0; j < 4; ++j) a[i][4 + j] = i == j ? 1.0 : 0.0;
    }
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) < 1e-300) throw numeric_error("metric inversion: singular");
        if (p != c)
            for (int k = 0; k < 8; ++k) std::swap(a[p][k], a[c][k]);
        double d = a[c][c];
        for (int k = 0; k < 8; ++k) a[c][k] /= d;
        for (int r = 0; r < 4; ++r) {
            if (r == c) continue;
            double f = a[r][c];
            for (int k = 0; k < 8; ++k) a[r][k] -= f * a[c][k];
        }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = a[i][4 + j];
}
} // namespace

ChartMetric NormalChart::metric_basic(const double y[4]) const {
    ChartMetric m;
    double D[4][4];
    dpsi(y, D);
    for (int al = 0; al < 4; ++al)
        for (int be = 0; be < 4; ++be) {
            double s = -D[0][al] * D[0][be];
            for (int k = 1; k < 4; ++k) s += D[k][al] * D[k][be];
            m.g[al][be] = s;
        }
    double det = det4(m.g);
    if (det >= -1e-12)
        throw numeric_error("metric singular or not Lorentzian at this point (outside the "
                            "valid tube)");
    m.sqrt_mg = std::sqrt(-det);
    inv4(m.g, m.ginv);
    return m;
}

ChartMetric NormalChart::metric(const double y[4], double fd_step) const {
    auto metric_raw = [&](const double yy[4], double g[4][4]) {
        double D[4][4];
        dpsi(yy, D);
        for (int al = 0; al < 4; ++al)
            for (int be = 0; be < 4; ++be) {
                double s = -D[0][al] * D[0][be];
                for (int k = 1; k < 4; ++k) s += D[k][al] * D[k][be];
                g[al][be] = s;
            }
    };
    ChartMetric m;
    metric_raw(y, m.g);
    double det = det4(m.g);
    if (det >= -1e-12)
        throw numeric_error("metric singular or not Lorentzian at this point (outside the "
                            "valid tube)");
    m.sqrt_mg = std::sqrt(-det);
    inv4(m.g, m.ginv);

    double step = fd_step > 0 ? fd_step : 1e-5 * ws.period();
    double dlog[4];
    for (int al = 0; al < 4; ++al) {
        double yp[4] = {y[0], y[1], y[2], y[3]};
        double ym[4] = {y[0], y[1], y[2], y[3]};
        double hplus = step, hminus = step;
        if (al == 0) { // stay inside the y0 window
            hplus = std::min(step, T1 - 1e-12 - y[0]);
            hminus = std::min(step, y[0] + T1 - 1e-12);
            if (hplus <= 0 || hminus <= 0)
                throw numeric_error("metric: y0 too close to the chart window edge for b");
        }
        yp[al] += hplus;
        ym[al] -= hminus;
        double gp[4][4], gm[4][4];
        metric_raw(yp, gp);
        metric_raw(ym, gm);
        double sp = std::sqrt(-det4(gp)), sm = std::sqrt(-det4(gm));
        dlog[al] = (sp - sm) / (hplus + hminus) / m.sqrt_mg;
    }
    for (int be = 0; be < 4; ++be) {
        double s = 0.0;
        for (int al = 0; al < 4; ++al) s += dlog[al] * m.ginv[al][be];
        m.b[be] = s;
    }
    return m;
}

Vec4 NormalChart::forward(const double y[4]) const {
    double rn = std::hypot(y[2], y[3]);
    if (rn > rho0 * (1.0 + 1e-9) || std::abs(y[0]) > T1 * (1.0 + 1e-9))
        throw numeric_error("chart_forward: point outside the certified domain");
    return psi(y);
}

InverseResult NormalChart::inverse(const Vec4& x, double rho_query, const double* guess) const {
    InverseResult res;
    const double L = ws.period();
    double y[4];
    double scan_min = 1e300;
    if (guess) {
        for (int k = 0; k < 4; ++k) y[k] = guess[k];
    } else {
        // nearest-curve-point scan at y0 ~ t
        double y0s = std::clamp(x[0], -T1 + 1e-6 * T1, T1 - 1e-6 * T1);
        int jbest = 0;
        for (int j = 0; j < n1_; ++j) {
            Vec3 p = ws.h(y0s, j * dy1_);
            double d = std::hypot(std::hypot(x[1] - p[0], x[2] - p[1]), x[3] - p[2]);
            if (d < scan_min) {
                scan_min = d;
                jbest = j;
            }
        }
        y[0] = y0s;
        y[1] = jbest * dy1_;
        FrameSample f = frame(y[0], y[1]);
        Vec3 p = ws.h(y[0], y[1]);
        Vec3 dv{x[1] - p[0], x[2] - p[1], x[3] - p[2]};
        y[2] = dv[0] * f.n1[1] + dv[1] * f.n1[2] + dv[2] * f.n1[3];
        y[3] = dv[0] * f.n2[1] + dv[1] * f.n2[2] + dv[2] * f.n2[3];
    }

    const double tol = params.inverse_tol * std::max(1.0, L);
    bool ok = false;
    int it = 0;
    for (; it < 40; ++it) {
        Vec4 px = psi(y);
        double F[4] = {px[0] - x[0], px[1] - x[1], px[2] - x[2], px[3] - x[3]};
        double err = std::sqrt(F[0] * F[0] + F[1] * F[1] + F[2] * F[2] + F[3] * F[3]);
        if (err < tol) {
            ok = true;
            break;
        }
        double D[4][4], Di[4][4];
        dpsi(y, D);
        try {
            inv4(D, Di);
        } catch (const numeric_error&) {
            break;
        }
        double dyv[4];
        double maxstep = 0.0;
        for (int a = 0; a < 4; ++a) {
            double s = 0.0;
            for (int b = 0; b < 4; ++b) s -= Di[a][b] * F[b];
            dyv[a] = s;
            maxstep = std::max(maxstep, std::abs(s));
        }
        double clampf = maxstep > 0.25 * L ? 0.25 * L / maxstep : 1.0;
        for (int a = 0; a < 4; ++a) y[a] += clampf * dyv[a];
        y[0] = std::clamp(y[0], -T1 + 1e-9, T1 - 1e-9);
        double rn = std::hypot(y[2], y[3]);
        if (rn > 3.0 * std::max(rho0, rho_query)) break; // wandering far outside
    }
    res.iterations = it;
    res.converged = ok;
    if (ok) {
        y[1] -= L * std::floor(y[1] / L);
        for (int k = 0; k < 4; ++k) res.y[k] = y[k];
        double rn = std::hypot(y[2], y[3]);
        res.in_tube = rn <= rho_query && std::abs(y[0]) <= T1;
        return res;
    }
    // definitive outside verdict when the scan already shows large distance
    if (!guess && scan_min > 1.5 * rho0 + 0.1 * L) {
        res.in_tube = false;
        return res;
    }
    throw numeric_error("chart_inverse: Newton failed to converge inside the tube (rho0 may be "
                        "too large)");
}

ValidityReport validity_radii(const NormalChart& chart) {
    ValidityReport rep{};
    rep.T1 = chart.T1;
    rep.c0 = chart.c0;
    const Worldsheet& ws = chart.ws;
    const double L = ws.period();
    double rcurv, selfd;
    slice_caps(ws, &rcurv, &selfd);
    rep.min_curvature_radius = rcurv;
    rep.min_self_distance = selfd;

    double rho = std::min(chart.params.rho_cap_frac * rcurv, 0.5 * selfd);
    // sampled certificate: Jacobian positivity plus pairwise image separation
    auto certify = [&](double r) {
        const int s0 = 7, s1 = 48, sth = 6;
        std::vector<Vec4> img;
        std::vector<std::array<double, 3>> par; // y0, y1, radius index
        for (int i = 0; i < s0; ++i) {
            double y0 = -0.95 * ws.T1 + 1.9 * ws.T1 * i / (s0 - 1);
            for (int j = 0; j < s1; ++j) {
                double y1 = L * j / s1;
                for (int q = 0; q < sth; ++q)
                    for (double rr : {0.5 * r, r}) {
                        double th = 2.0 * pi * q / sth;
                        double y[4] = {y0, y1, rr * std::cos(th), rr * std::sin(th)};
                        try {
                            ChartMetric m = chart.metric(y);
                            if (!(m.sqrt_mg > 1e-8)) return false;
                        } catch (const numeric_error&) {
                            return false;
                        }
                        img.push_back(chart.psi(y));
                        par.push_back({y0, y1, rr});
                    }
            }
        }
        // pairwise separation for parameter-distant samples
        for (std::size_t a = 0; a < img.size(); ++a)
            for (std::size_t b = a + 1; b < img.size(); ++b) {
                double darc = std::abs(par[a][1] - par[b][1]);
                darc = std::min(darc, L - darc);
                bool far_param = std::abs(par[a][0] - par[b][0]) > 0.3 * ws.T1 || darc > L / 8.0;
                if (!far_param) continue;
                double d2 = 0.0;
                for (int k = 0; k < 4; ++k) d2 += (img[a][k] - img[b][k]) * (img[a][k] - img[b][k]);
                if (std::sqrt(d2) < 1e-6 * L) return false;
            }
        return true;
    };
    int tries = 0;
    while (!certify(rho) && tries++ < 10) rho *= 0.8;
    rep.certificate_passed = tries <= 10;
    rep.rho0 = rho;
    return rep;
}

} // namespace ahvx
