#include "ahvx/vortex2d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ahvx {

namespace {

// 4-point Gauss-Legendre on [0,1]
constexpr double gl_x[4] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                            0.9305681557970262};
constexpr double gl_w[4] = {0.17392742256872692, 0.3260725774312731, 0.3260725774312731,
                            0.17392742256872692};

using OneForm = std::function<void(double, double, double*, double*)>; // (x,y) -> (Ax,Ay)

double integrate_link(const OneForm& A, double x0, double y0, double x1, double y1) {
    // mean value of the 1-form along the straight link (integral / length)
    double tx = x1 - x0, ty = y1 - y0;
    double s = 0.0;
    for (int q = 0; q < 4; ++q) {
        double x = x0 + gl_x[q] * tx, y = y0 + gl_x[q] * ty;
        double ax, ay;
        A(x, y, &ax, &ay);
        s += gl_w[q] * (ax * tx + ay * ty); // = integral of A over the link
    }
    return s / std::sqrt(tx * tx + ty * ty); // mean link value
}

} // namespace

WeightFunction make_weight(double R) {
    if (R <= 0.0) throw numeric_error("make_weight: R must be positive");
    WeightFunction w;
    w.R = R;
    w.C = 6.0 / (R * R * R);
    return w;
}

double confinement(const Config2D& u, int m, const WeightFunction& w, double cx, double cy) {
    double quad = weighted_vorticity_2d(u, [&](double x, double y) {
        double dx = x - cx, dy = y - cy;
        return w(std::sqrt(dx * dx + dy * dy));
    });
    return pi * m - quad;
}

Config2D sample_config(const Grid& g, double eps, double lam,
                       const std::function<cplx(double, double)>& phi_fn, const OneForm& A_fn) {
    Config2D u;
    u.grid = g;
    u.epsilon = eps;
    u.lambda = lam;
    u.phi = Field2<cplx>(g.nx(), g.ny());
    u.ax = Field2<double>(g.nx(), g.ny(), 0.0);
    u.ay = Field2<double>(g.nx(), g.ny(), 0.0);
    const double h = g.h;
    par::parallel_for(g.nx(), [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < g.ny(); ++j) {
                double x = g.x(i), y = g.y(j);
                u.phi(i, j) = phi_fn(x, y);
                if (i < g.nx() - 1) u.ax(i, j) = integrate_link(A_fn, x, y, x + h, y);
                if (j < g.ny() - 1) u.ay(i, j) = integrate_link(A_fn, x, y, x, y + h);
            }
    });
    return u;
}

Config2D profile_to_lattice(const RadialProfile& p, const Grid& grid, double cx, double cy,
                            double epsilon) {
    const double cover = p.r_max * epsilon;
    double dxlo = cx - grid.origin[0];
    double dxhi = grid.origin[0] + (grid.nx() - 1) * grid.h - cx;
    double dylo = cy - grid.origin[1];
    double dyhi = grid.origin[1] + (grid.ny() - 1) * grid.h - cy;
    if (std::min({dxlo, dxhi, dylo, dyhi}) < cover - 1e-9)
        throw shape_error("profile_to_lattice: grid does not cover center +- r_max*eps");

    const int n = p.n;
    auto phi_fn = [&](double x, double y) -> cplx {
        double dx = x - cx, dy = y - cy;
        double r = std::sqrt(dx * dx + dy * dy);
        double f = p.f_at(r / epsilon);
        if (r == 0.0) return cplx(0.0, 0.0);
        double th = std::atan2(dy, dx);
        return std::polar(f, n * th);
    };
    auto A_fn = [&](double x, double y, double* ax, double* ay) {
        double dx = x - cx, dy = y - cy;
        double r2 = dx * dx + dy * dy;
        if (r2 == 0.0) { *ax = *ay = 0.0; return; }
        double a = p.a_at(std::sqrt(r2) / epsilon);
        // n a(r) dtheta, dtheta = (-dy dx + dx dy)/r^2
        *ax = -n * a * dy / r2;
        *ay = n * a * dx / r2;
    };
    Config2D u = sample_config(grid, epsilon, p.lambda, phi_fn, A_fn);
    u.validate();
    return u;
}

Config2D superpose_vortices(const std::vector<VortexSeed>& seeds, const Grid& grid,
                            double epsilon, double lambda) {
    auto phi_fn = [&](double x, double y) -> cplx {
        cplx v(1.0, 0.0);
        for (const auto& s : seeds) {
            double dx = x - s.cx, dy = y - s.cy;
            double r = std::sqrt(dx * dx + dy * dy);
            double f = s.profile->f_at(r / epsilon);
            v *= (r == 0.0) ? cplx(0.0, 0.0) : std::polar(f, s.profile->n * std::atan2(dy, dx));
        }
        return v;
    };
    auto A_fn = [&](double x, double y, double* ax, double* ay) {
        *ax = *ay = 0.0;
        for (const auto& s : seeds) {
            double dx = x - s.cx, dy = y - s.cy;
            double r2 = dx * dx + dy * dy;
            if (r2 == 0.0) continue;
            double a = s.profile->a_at(std::sqrt(r2) / epsilon);
            *ax += -s.profile->n * a * dy / r2;
            *ay += s.profile->n * a * dx / r2;
        }
    };
    Config2D u = sample_config(grid, epsilon, lambda, phi_fn, A_fn);
    u.validate();
    return u;
}

// ---------------------------------------------------------------------------
// pure-gauge extension

namespace {

// truncated Fourier interpolant of a 2pi-periodic sample set
struct FourierSeries {
    std::vector<double> c, s; // cos/sin coefficients, c[0] = mean
    double eval(double th) const {
        double v = c[0];
        for (std::size_t k = 1; k < c.size(); ++k)
            v += c[k] * std::cos(k * th) + s[k] * std::sin(k * th);
        return v;
    }
    double deriv(double th) const {
        double v = 0.0;
        for (std::size_t k = 1; k < c.size(); ++k)
            v += k * (-c[k] * std::sin(k * th) + s[k] * std::cos(k * th));
        return v;
    }
    static FourierSeries fit(const std::vector<double>& samples, int modes) {
        const int M = int(samples.size());
        FourierSeries f;
        f.c.assign(modes + 1, 0.0);
        f.s.assign(modes + 1, 0.0);
        for (int k = 0; k <= modes; ++k) {
            double ck = 0.0, sk = 0.0;
            for (int i = 0; i < M; ++i) {
                double th = 2.0 * pi * i / M;
                ck += samples[i] * std::cos(k * th);
                sk += samples[i] * std::sin(k * th);
            }
            f.c[k] = (k == 0 ? ck : 2.0 * ck) / M;
            f.s[k] = (k == 0 ? 0.0 : 2.0 * sk / M);
        }
        return f;
    }
};

double bilinear(const Field2<double>& f, double gx, double gy) {
    int i = int(std::floor(gx)), j = int(std::floor(gy));
    i = std::clamp(i, 0, f.nx - 2);
    j = std::clamp(j, 0, f.ny - 2);
    double tx = gx - i, ty = gy - j;
    return (1 - tx) * (1 - ty) * f(i, j) + tx * (1 - ty) * f(i + 1, j) +
           (1 - tx) * ty * f(i, j + 1) + tx * ty * f(i + 1, j + 1);
}

// Catmull-Rom bicubic (for sampling link fields on the measurement circle,
// where second-order interpolation would pollute the surgery)
double bicubic_d(const Field2<double>& f, double gx, double gy) {
    int i = std::clamp(int(std::floor(gx)), 1, f.nx - 3);
    int j = std::clamp(int(std::floor(gy)), 1, f.ny - 3);
    double tx = gx - i, ty = gy - j;
    auto w = [](double t, double* o) {
        double t2 = t * t, t3 = t2 * t;
        o[0] = 0.5 * (-t3 + 2 * t2 - t);
        o[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
        o[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
        o[3] = 0.5 * (t3 - t2);
    };
    double wx[4], wy[4];
    w(tx, wx);
    w(ty, wy);
    double r = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r += wx[a] * wy[b] * f(i - 1 + a, j - 1 + b);
    return r;
}

cplx bilinear_c(const Field2<cplx>& f, double gx, double gy) {
    int i = std::clamp(int(std::floor(gx)), 1, f.nx - 3);
    int j = std::clamp(int(std::floor(gy)), 1, f.ny - 3);
    double tx = gx - i, ty = gy - j;
    auto w = [](double t, double* o) {
        double t2 = t * t, t3 = t2 * t;
        o[0] = 0.5 * (-t3 + 2 * t2 - t);
        o[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
        o[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
        o[3] = 0.5 * (t3 - t2);
    };
    double wx[4], wy[4];
    w(tx, wx);
    w(ty, wy);
    cplx r(0, 0);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r += wx[a] * wy[b] * f(i - 1 + a, j - 1 + b);
    return r;
}

double seg_dist(double px, double py, double ax, double ay, double bx, double by) {
    double vx = bx - ax, vy = by - ay;
    double t = ((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy);
    t = std::clamp(t, 0.0, 1.0);
    double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

ExtensionResult extend_pure_gauge(const Config2D& u, double s, double cx, double cy, int modes) {
    const Grid& g = u.grid;
    const double h = g.h, eps = u.epsilon;
    if (s <= 2.0 * h) throw shape_error("extend_pure_gauge: radius too small for the grid");

    // sample the boundary circle
    const int M = std::max(256, 8 * modes);
    std::vector<double> rho(M), chi_raw(M), atheta(M);
    double prev_arg = 0.0, acc = 0.0;
    for (int k = 0; k < M; ++k) {
        double th = 2.0 * pi * k / M;
        double x = cx + s * std::cos(th), y = cy + s * std::sin(th);
        double gx = (x - g.origin[0]) / h, gy = (y - g.origin[1]) / h;
        if (gx < 0 || gy < 0 || gx > g.nx() - 1 || gy > g.ny() - 1)
            throw shape_error("extend_pure_gauge: circle leaves the grid");
        cplx ph = bilinear_c(u.phi, gx, gy);
        rho[k] = std::abs(ph);
        double ar = std::arg(ph);
        if (k == 0) acc = ar;
        else acc += wrap_angle(ar - prev_arg);
        prev_arg = ar;
        chi_raw[k] = acc;
        // interpolate the two link families at their staggered positions
        double axv = bicubic_d(u.ax, std::clamp(gx - 0.5, 0.0, double(g.nx() - 2)), gy);
        double ayv = bicubic_d(u.ay, gx, std::clamp(gy - 0.5, 0.0, double(g.ny() - 2)));
        atheta[k] = s * (-axv * std::sin(th) + ayv * std::cos(th));
    }
    double min_rho = *std::min_element(rho.begin(), rho.end());
    if (min_rho < 0.5)
        throw numeric_error("extend_pure_gauge: |phi| < 1/2 on the circle, construction invalid");

    // winding from the closure of the unwrapped phase
    double closure = chi_raw[M - 1] - chi_raw[0] +
                     wrap_angle(std::arg(bilinear_c(u.phi, (cx + s - g.origin[0]) / h,
                                                    (cy - g.origin[1]) / h)) -
                                prev_arg);
    int m = int(std::lround(closure / (2.0 * pi)));

    // single-valued part of the phase
    std::vector<double> chit(M);
    for (int k = 0; k < M; ++k) chit[k] = chi_raw[k] - m * (2.0 * pi * k / M);
    FourierSeries Frho = FourierSeries::fit(rho, modes);
    FourierSeries Fchi = FourierSeries::fit(chit, modes);
    FourierSeries Fath = FourierSeries::fit(atheta, modes);

    auto q_at = [&](double th) { return m * th + Fchi.eval(th); }; // branch follows th
    auto qp_at = [&](double th) { return m + Fchi.deriv(th); };

    // output grid: pad to cover the annulus comfortably
    const double need = s + eps + 6.0 * h;
    auto pad_lo = [&](double origin, double c) {
        double short_by = need - (c - origin);
        return short_by > 0 ? int(std::ceil(short_by / h)) : 0;
    };
    auto pad_hi = [&](double origin, int nthis, double c) {
        double short_by = need - (origin + (nthis - 1) * h - c);
        return short_by > 0 ? int(std::ceil(short_by / h)) : 0;
    };
    int plx = pad_lo(g.origin[0], cx), phx = pad_hi(g.origin[0], g.nx(), cx);
    int ply = pad_lo(g.origin[1], cy), phy = pad_hi(g.origin[1], g.ny(), cy);
    Grid ng = Grid::make2d(g.nx() + plx + phx, g.ny() + ply + phy, h, g.origin[0] - plx * h,
                           g.origin[1] - ply * h);

    Config2D v;
    v.grid = ng;
    v.epsilon = eps;
    v.lambda = u.lambda;
    v.phi = Field2<cplx>(ng.nx(), ng.ny());
    v.ax = Field2<double>(ng.nx(), ng.ny(), 0.0);
    v.ay = Field2<double>(ng.nx(), ng.ny(), 0.0);

    OneForm blended = [&](double x, double y, double* ax, double* ay) {
        double dx = x - cx, dy = y - cy;
        double r2 = dx * dx + dy * dy;
        if (r2 == 0.0) { *ax = *ay = 0.0; return; }
        double r = std::sqrt(r2);
        double th = std::atan2(dy, dx);
        double t = std::clamp((r - s) / eps, 0.0, 1.0);
        double atc = Fath.eval(th);
        double coef = atc + t * (qp_at(th) - atc);
        *ax = -coef * dy / r2;
        *ay = coef * dx / r2;
    };

    for (int i = 0; i < ng.nx(); ++i)
        for (int j = 0; j < ng.ny(); ++j) {
            double x = ng.x(i), y = ng.y(j);
            double dx = x - cx, dy = y - cy;
            double r = std::sqrt(dx * dx + dy * dy);
            int oi = i - plx, oj = j - ply;
            bool in_old = oi >= 0 && oj >= 0 && oi < g.nx() && oj < g.ny();
            if (r <= s && in_old) {
                v.phi(i, j) = u.phi(oi, oj);
            } else if (r <= s) {
                throw shape_error("extend_pure_gauge: input grid does not cover B(s)");
            } else {
                double th = std::atan2(dy, dx);
                double t = std::clamp((r - s) / eps, 0.0, 1.0);
                double rr = Frho.eval(th);
                v.phi(i, j) = std::polar(rr + t * (1.0 - rr), q_at(th));
            }
            // x-link from (i,j)
            if (i < ng.nx() - 1) {
                double d = seg_dist(cx, cy, x, y, x + h, y);
                double rm = std::sqrt((x + 0.5 * h - cx) * (x + 0.5 * h - cx) + dy * dy);
                if (rm <= s && in_old && oi < g.nx() - 1) {
                    v.ax(i, j) = u.ax(oi, oj);
                } else if (d >= s + eps) {
                    double th0 = std::atan2(y - cy, x - cx);
                    double th1 = std::atan2(y - cy, x + h - cx);
                    v.ax(i, j) =
                        (m * wrap_angle(th1 - th0) + Fchi.eval(th1) - Fchi.eval(th0)) / h;
                } else {
                    v.ax(i, j) = integrate_link(blended, x, y, x + h, y);
                }
            }
            if (j < ng.ny() - 1) {
                double d = seg_dist(cx, cy, x, y, x, y + h);
                double rm = std::sqrt(dx * dx + (y + 0.5 * h - cy) * (y + 0.5 * h - cy));
                if (rm <= s && in_old && oj < g.ny() - 1) {
                    v.ay(i, j) = u.ay(oi, oj);
                } else if (d >= s + eps) {
                    double th0 = std::atan2(y - cy, x - cx);
                    double th1 = std::atan2(y + h - cy, x - cx);
                    v.ay(i, j) =
                        (m * wrap_angle(th1 - th0) + Fchi.eval(th1) - Fchi.eval(th0)) / h;
                } else {
                    v.ay(i, j) = integrate_link(blended, x, y, x, y + h);
                }
            }
        }

    ExtensionResult out;
    out.annulus_energy = weighted_energy_2d(v, [&](double x, double y) {
        double dx = x - cx, dy = y - cy;
        double r = std::sqrt(dx * dx + dy * dy);
        return (r >= s - 2.0 * h && r <= s + eps + 2.0 * h) ? 1.0 : 0.0;
    });
    out.winding = m;
    out.u = std::move(v);
    return out;
}

// ---------------------------------------------------------------------------
// 2d minimization

namespace {

struct GradientWork {
    Field2<cplx> gphi, dx, dy, bx, by; // forward and backward-referenced differences
    Field2<double> gax, gay, jx, jy;
};

// per-volume gradient of the discrete energy; two-phase so row slabs can run
// in parallel without write races
void gradient(const Config2D& u, GradientWork& w) {
    const int nx = u.grid.nx(), ny = u.grid.ny();
    const double h = u.grid.h, eps = u.epsilon, lam = u.lambda;
    const double ee = eps * eps;
    Field2<double> f = curvature(u);
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < ny; ++j) {
                cplx p = u.phi(i, j);
                if (i < nx - 1) {
                    cplx up = std::polar(1.0, -h * u.ax(i, j));
                    cplx t = up * u.phi(i + 1, j);
                    w.dx(i, j) = (t - p) / h;
                    w.bx(i, j) = w.dx(i, j) * std::conj(up);
                    w.jx(i, j) = ip(cplx(0, 1) * p, t) / h;
                } else {
                    w.dx(i, j) = w.bx(i, j) = 0.0;
                    w.jx(i, j) = 0.0;
                }
                if (j < ny - 1) {
                    cplx up = std::polar(1.0, -h * u.ay(i, j));
                    cplx t = up * u.phi(i, j + 1);
                    w.dy(i, j) = (t - p) / h;
                    w.by(i, j) = w.dy(i, j) * std::conj(up);
                    w.jy(i, j) = ip(cplx(0, 1) * p, t) / h;
                } else {
                    w.dy(i, j) = w.by(i, j) = 0.0;
                    w.jy(i, j) = 0.0;
                }
            }
    });
    par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
        for (int i = int(b); i < int(e); ++i)
            for (int j = 0; j < ny; ++j) {
                cplx p = u.phi(i, j);
                cplx gp = lam / (2.0 * ee) * (std::norm(p) - 1.0) * p;
                if (i < nx - 1) gp -= w.dx(i, j) / h;
                if (i > 0) gp += w.bx(i - 1, j) / h;
                if (j < ny - 1) gp -= w.dy(i, j) / h;
                if (j > 0) gp += w.by(i, j - 1) / h;
                w.gphi(i, j) = gp;
                // unused link slots carry zero plaquettes and zero current
                w.gax(i, j) = -w.jx(i, j) + ee * (f(i, j) - (j > 0 ? f(i, j - 1) : 0.0)) / h;
                w.gay(i, j) = -w.jy(i, j) + ee * ((i > 0 ? f(i - 1, j) : 0.0) - f(i, j)) / h;
            }
    });
}

} // namespace

MinimizeResult minimize2d(int n, double lambda, const Grid& grid, const Config2D& seed,
                          const MinimizeSchedule& sched) {
    if (!seed.grid.same_layout(grid)) throw shape_error("minimize2d: seed grid mismatch");
    const double h = grid.h, eps = seed.epsilon;

    // freeze a pure-gauge ring built from the seed
    double cx = grid.origin[0] + 0.5 * (grid.nx() - 1) * h;
    double cy = grid.origin[1] + 0.5 * (grid.ny() - 1) * h;
    double edge = std::min({cx - grid.origin[0], cy - grid.origin[1]});
    double s_ring = edge - eps - 7.0 * h - sched.ring_margin;
    if (s_ring < 4.0 * eps) throw shape_error("minimize2d: grid too small for a boundary ring");
    ExtensionResult ext = extend_pure_gauge(seed, s_ring, cx, cy);
    if (!ext.u.grid.same_layout(grid))
        throw shape_error("minimize2d: ring construction had to grow the grid");
    if (ext.winding != n)
        throw numeric_error("minimize2d: seed winding on the ring differs from requested n");
    Config2D u = std::move(ext.u);

    const int nx = grid.nx(), ny = grid.ny();
    const double freeze_r = s_ring + eps;
    Field2<char> fsite(nx, ny, 0), fax(nx, ny, 0), fay(nx, ny, 0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double dx = grid.x(i) - cx, dy = grid.y(j) - cy;
            if (std::sqrt(dx * dx + dy * dy) >= freeze_r) fsite(i, j) = 1;
            if (seg_dist(cx, cy, grid.x(i), grid.y(j), grid.x(i) + h, grid.y(j)) >= freeze_r)
                fax(i, j) = 1;
            if (seg_dist(cx, cy, grid.x(i), grid.y(j), grid.x(i), grid.y(j) + h) >= freeze_r)
                fay(i, j) = 1;
        }

    const double seed_energy = total_energy_2d(u);
    double lips = 8.0 / (h * h) + 2.0 * (lambda + 1.0) / (eps * eps);
    double alpha = sched.alpha_safety * 2.0 / lips;
    double beta = sched.beta;

    GradientWork g{Field2<cplx>(nx, ny), Field2<cplx>(nx, ny), Field2<cplx>(nx, ny),
                   Field2<cplx>(nx, ny),  Field2<cplx>(nx, ny),
                   Field2<double>(nx, ny, 0.0), Field2<double>(nx, ny, 0.0),
                   Field2<double>(nx, ny, 0.0), Field2<double>(nx, ny, 0.0)};
    Field2<cplx> vphi(nx, ny, cplx(0, 0));
    Field2<double> vax(nx, ny, 0.0), vay(nx, ny, 0.0);

    // winding monitor loop well inside the ring
    int mloop = std::max(3, int(0.7 * s_ring / h));
    int ic = int(std::lround((cx - grid.origin[0]) / h));
    int jc = int(std::lround((cy - grid.origin[1]) / h));

    double last_e = seed_energy;
    double gmax = 1e300;
    int it = 0;
    bool converged = false;
    for (; it < sched.max_iter && !converged; ++it) {
        gradient(u, g);
        if ((it + 1) % sched.check_every == 0 || it == 0) {
            gmax = par::reduce_max(std::int64_t(nx) * ny, [&](std::int64_t idx) {
                int i = int(idx / ny), j = int(idx % ny);
                double m = 0.0;
                if (!fsite(i, j)) m = std::abs(g.gphi(i, j));
                if (!fax(i, j)) m = std::max(m, std::abs(g.gax(i, j)) / (eps * eps));
                if (!fay(i, j)) m = std::max(m, std::abs(g.gay(i, j)) / (eps * eps));
                return m;
            });
            if (gmax < sched.grad_tol) break;
        }
        par::parallel_for(nx, [&](std::int64_t b, std::int64_t e) {
            for (int i = int(b); i < int(e); ++i)
                for (int j = 0; j < ny; ++j) {
                    if (!fsite(i, j)) {
                        vphi(i, j) = beta * vphi(i, j) - alpha * g.gphi(i, j);
                        u.phi(i, j) += vphi(i, j);
                    }
                    if (!fax(i, j)) {
                        vax(i, j) = beta * vax(i, j) - alpha / (eps * eps) * g.gax(i, j);
                        u.ax(i, j) += vax(i, j);
                    }
                    if (!fay(i, j)) {
                        vay(i, j) = beta * vay(i, j) - alpha / (eps * eps) * g.gay(i, j);
                        u.ay(i, j) += vay(i, j);
                    }
                }
        });
        if ((it + 1) % sched.check_every == 0) {
            double e = total_energy_2d(u);
            if (e > last_e + 1e-7 * std::abs(last_e)) {
                // genuine instability, not heavy-ball ripple
                alpha *= 0.5;
                vphi.fill(cplx(0, 0));
                vax.fill(0.0);
                vay.fill(0.0);
            } else if (std::abs(e - last_e) < sched.energy_tol * std::max(1.0, std::abs(e))) {
                converged = true; // energy plateau
            }
            last_e = e;
            auto loop = rect_loop(grid, ic, jc, mloop, mloop);
            WindingResult wr = winding_degree(u.phi, loop);
            if (wr.degree != n) {
                std::ostringstream ss;
                ss << "minimize2d: winding changed from " << n << " to " << wr.degree
                   << " at iteration " << (it + 1) << " (vortex escaped the flow region)";
                throw numeric_error(ss.str());
            }
        }
    }
    {
        // final gradient norm for the report
        gradient(u, g);
        gmax = par::reduce_max(std::int64_t(nx) * ny, [&](std::int64_t idx) {
            int i = int(idx / ny), j = int(idx % ny);
            double m = 0.0;
            if (!fsite(i, j)) m = std::abs(g.gphi(i, j));
            if (!fax(i, j)) m = std::max(m, std::abs(g.gax(i, j)) / (eps * eps));
            if (!fay(i, j)) m = std::max(m, std::abs(g.gay(i, j)) / (eps * eps));
            return m;
        });
    }

    MinimizeResult r;
    r.energy = total_energy_2d(u);
    if (r.energy > seed_energy + 1e-9 * std::abs(seed_energy))
        throw numeric_error("minimize2d: energy increased above the seed energy");
    auto loop = rect_loop(grid, ic, jc, mloop, mloop);
    r.winding = winding_degree(u.phi, loop).degree;
    r.u = std::move(u);
    r.grad_norm = gmax;
    r.iterations = it;
    return r;
}

MinimizeResult minimize2d_equivariant(int n, double lambda, double epsilon, double extent_cores,
                                      double h_over_eps, const MinimizeSchedule& sched) {
    const double h = h_over_eps * epsilon;
    const int half = int(std::ceil(extent_cores / h_over_eps - 1e-9));
    Grid g = Grid::make2d(2 * half + 1, 2 * half + 1, h, -half * h, -half * h);
    RadialProfile p = solve_profile(n, lambda, half * h_over_eps, 1e-10, 1.0 / 64.0);
    Config2D seed = profile_to_lattice(p, g, 0.0, 0.0, epsilon);
    return minimize2d(n, lambda, g, seed, sched);
}

EnergyTable energy_table(double lambda, int n_max, const EnergyTableParams& params) {
    if (n_max < 1 || n_max > 5)
        throw numeric_error("energy_table: n_max outside the cost guard range [1,5]");
    EnergyTable t;
    t.lambda = lambda;
    for (int n = 1; n <= n_max; ++n) {
        const double h = params.h_over_eps * params.epsilon;
        const int half =
            int(std::ceil(params.extent_cores * (1.0 + 0.35 * (n - 1)) / params.h_over_eps));
        const double extent = half * params.h_over_eps; // grid-aligned, in core units
        Grid g = Grid::make2d(2 * half + 1, 2 * half + 1, h, -half * h, -half * h);
        Config2D seed = [&]() {
            if (n == 1 || lambda <= 1.05) {
                RadialProfile p = solve_profile(n, lambda, extent, 1e-10, 1.0 / 64.0);
                return profile_to_lattice(p, g, 0.0, 0.0, params.epsilon);
            }
            // above critical coupling the equivariant n>=2 state is unstable;
            // seed with separated unit vortices
            RadialProfile p1 = solve_profile(1, lambda, extent, 1e-10, 1.0 / 64.0);
            std::vector<VortexSeed> seeds;
            double ring = (2.5 + 1.5 * n) * params.epsilon;
            for (int k = 0; k < n; ++k) {
                double th = 2.0 * pi * k / n;
                seeds.push_back({&p1, ring * std::cos(th), ring * std::sin(th)});
            }
            return superpose_vortices(seeds, g, params.epsilon, lambda);
        }();
        MinimizeResult r = minimize2d(n, lambda, g, seed, params.sched);
        t.entries.push_back({n, lambda, r.energy, h, extent * params.epsilon, r.grad_norm});
    }
    return t;
}

double EnergyTable::energy_of(int n) const {
    int a = std::abs(n);
    for (const auto& e : entries)
        if (e.n == a) return e.energy;
    throw numeric_error("energy_table: n outside table");
}

double EnergyTable::min_splitting(int N) const {
    const int n_max = int(entries.size());
    double best = 1e300;
    // up to four nonzero parts with |part| <= n_max
    for (int a = -n_max; a <= n_max; ++a)
        for (int b = -n_max; b <= n_max; ++b)
            for (int c = -n_max; c <= n_max; ++c)
                for (int d = -n_max; d <= n_max; ++d) {
                    if (a + b + c + d != N) continue;
                    int nz = (a != 0) + (b != 0) + (c != 0) + (d != 0);
                    if (nz < 2) continue;
                    double s = 0.0;
                    for (int p : {a, b, c, d})
                        if (p != 0) s += energy_of(p);
                    best = std::min(best, s);
                }
    return best;
}

double EnergyTable::criterion_margin(int N) const { return min_splitting(N) - energy_of(N); }

void write_energy_table_csv(const std::string& path, const EnergyTable& t) {
    std::ofstream os(path);
    if (!os) throw numeric_error("cannot open " + path);
    os << "n,lambda,energy,grid_h,grid_extent,residual\n";
    os << std::setprecision(12);
    for (const auto& e : t.entries)
        os << e.n << ',' << e.lambda << ',' << e.energy << ',' << e.grid_h << ','
           << e.grid_extent << ',' << e.residual << '\n';
}

void write_profile_csv(const std::string& path, const RadialProfile& p) {
    std::ofstream os(path);
    if (!os) throw numeric_error("cannot open " + path);
    os << "r,f,a\n";
    os << std::setprecision(12);
    for (std::size_t i = 0; i < p.r.size(); ++i)
        os << p.r[i] << ',' << p.f[i] << ',' << p.a[i] << '\n';
}

} // namespace ahvx
