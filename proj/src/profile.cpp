#include "ahvx/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ahvx {

namespace {

// residual of the radial Euler-Lagrange system at interior node i
// (unknowns packed as x = [f_1, a_1, f_2, a_2, ...], node 0 pinned to zero)
struct RadialSystem {
    int n;
    double lambda, dr, r_max;
    int N; // nodes 1..N are unknown

    double r(int i) const { return dr * i; }

    double kf() const { return std::min(std::sqrt(lambda), 2.0) + 0.5 / r_max; }
    double ka() const { return 1.0 - 0.5 / r_max; }

    void residual(const std::vector<double>& f, const std::vector<double>& a,
                  std::vector<double>& Rf, std::vector<double>& Ra) const {
        const double n2 = double(n) * n;
        for (int i = 1; i < N; ++i) {
            double ri = r(i);
            Rf[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dr * dr) +
                    (f[i + 1] - f[i - 1]) / (2.0 * dr * ri) -
                    n2 * f[i] * (1.0 - a[i]) * (1.0 - a[i]) / (ri * ri) -
                    0.5 * lambda * f[i] * (f[i] * f[i] - 1.0);
            Ra[i] = (a[i + 1] - 2.0 * a[i] + a[i - 1]) / (dr * dr) -
                    (a[i + 1] - a[i - 1]) / (2.0 * dr * ri) + f[i] * f[i] * (1.0 - a[i]);
        }
        // Robin closure from the linearized exponential tails
        Rf[N] = (f[N] - f[N - 1]) / dr - kf() * (1.0 - f[N]);
        Ra[N] = (a[N] - a[N - 1]) / dr - ka() * (1.0 - a[N]);
    }
};

// block-tridiagonal (2x2 blocks) Thomas solve: J dx = -R
struct Block {
    double m[2][2];
};

void solve_block_tridiag(std::vector<Block>& lo, std::vector<Block>& di, std::vector<Block>& up,
                         std::vector<double>& rhs /* 2 per node */) {
    const int N = int(di.size());
    auto inv2 = [](const Block& b) {
        double det = b.m[0][0] * b.m[1][1] - b.m[0][1] * b.m[1][0];
        if (std::abs(det) < 1e-300) throw numeric_error("profile solver: singular block");
        Block r;
        r.m[0][0] = b.m[1][1] / det;
        r.m[0][1] = -b.m[0][1] / det;
        r.m[1][0] = -b.m[1][0] / det;
        r.m[1][1] = b.m[0][0] / det;
        return r;
    };
    auto mul = [](const Block& a, const Block& b) {
        Block c;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                c.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
        return c;
    };
    // forward elimination
    for (int k = 1; k < N; ++k) {
        Block dinv = inv2(di[k - 1]);
        Block m = mul(lo[k], dinv);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                di[k].m[i][j] -= m.m[i][0] * up[k - 1].m[0][j] + m.m[i][1] * up[k - 1].m[1][j];
        for (int i = 0; i < 2; ++i)
            rhs[2 * k + i] -= m.m[i][0] * rhs[2 * (k - 1)] + m.m[i][1] * rhs[2 * (k - 1) + 1];
    }
    // back substitution
    {
        Block dinv = inv2(di[N - 1]);
        double b0 = rhs[2 * (N - 1)], b1 = rhs[2 * (N - 1) + 1];
        rhs[2 * (N - 1)] = dinv.m[0][0] * b0 + dinv.m[0][1] * b1;
        rhs[2 * (N - 1) + 1] = dinv.m[1][0] * b0 + dinv.m[1][1] * b1;
    }
    for (int k = N - 2; k >= 0; --k) {
        double b0 = rhs[2 * k] - (up[k].m[0][0] * rhs[2 * (k + 1)] + up[k].m[0][1] * rhs[2 * (k + 1) + 1]);
        double b1 = rhs[2 * k + 1] - (up[k].m[1][0] * rhs[2 * (k + 1)] + up[k].m[1][1] * rhs[2 * (k + 1) + 1]);
        Block dinv = inv2(di[k]);
        rhs[2 * k] = dinv.m[0][0] * b0 + dinv.m[0][1] * b1;
        rhs[2 * k + 1] = dinv.m[1][0] * b0 + dinv.m[1][1] * b1;
    }
}

double max_abs(const std::vector<double>& Rf, const std::vector<double>& Ra, int N) {
    double m = 0.0;
    for (int i = 1; i <= N; ++i) m = std::max({m, std::abs(Rf[i]), std::abs(Ra[i])});
    return m;
}

} // namespace

RadialProfile solve_profile(int n, double lambda, double r_max, double tol, double dr) {
    if (n == 0) throw numeric_error("solve_profile: n = 0 has no vortex profile");
    if (lambda <= 0.0) throw numeric_error("solve_profile: lambda must be positive");
    if (r_max < 10.0) throw numeric_error("solve_profile: r_max below 10 core radii");
    const int nn = std::abs(n);
    const int N = int(std::lround(r_max / dr));
    RadialSystem sys{nn, lambda, dr, r_max, N};

    std::vector<double> f(N + 1), a(N + 1);
    for (int i = 0; i <= N; ++i) {
        double r = dr * i;
        f[i] = std::pow(std::tanh(0.7 * r / nn), nn);
        a[i] = 1.0 - std::exp(-r * r / (2.0 * nn * nn + 2.0));
    }
    f[0] = a[0] = 0.0;

    std::vector<double> Rf(N + 1, 0.0), Ra(N + 1, 0.0);
    sys.residual(f, a, Rf, Ra);
    double res = max_abs(Rf, Ra, N);

    const int max_iter = 200;
    const double n2 = double(nn) * nn;
    int it = 0;
    for (; it < max_iter && res > tol; ++it) {
        // assemble Jacobian blocks for unknown nodes 1..N
        std::vector<Block> lo(N), di(N), up(N);
        std::vector<double> rhs(2 * N);
        for (int k = 0; k < N; ++k) {
            int i = k + 1;
            double ri = sys.r(i);
            Block L{}, D{}, U{};
            if (i < N) {
                L.m[0][0] = 1.0 / (dr * dr) - 1.0 / (2.0 * dr * ri);
                L.m[1][1] = 1.0 / (dr * dr) + 1.0 / (2.0 * dr * ri);
                U.m[0][0] = 1.0 / (dr * dr) + 1.0 / (2.0 * dr * ri);
                U.m[1][1] = 1.0 / (dr * dr) - 1.0 / (2.0 * dr * ri);
                D.m[0][0] = -2.0 / (dr * dr) - n2 * (1.0 - a[i]) * (1.0 - a[i]) / (ri * ri) -
                            0.5 * lambda * (3.0 * f[i] * f[i] - 1.0);
                D.m[0][1] = 2.0 * n2 * f[i] * (1.0 - a[i]) / (ri * ri);
                D.m[1][0] = 2.0 * f[i] * (1.0 - a[i]);
                D.m[1][1] = -2.0 / (dr * dr) - f[i] * f[i];
            } else {
                // Robin rows
                L.m[0][0] = -1.0 / dr;
                L.m[1][1] = -1.0 / dr;
                D.m[0][0] = 1.0 / dr + sys.kf();
                D.m[1][1] = 1.0 / dr + sys.ka();
            }
            lo[k] = L;
            di[k] = D;
            up[k] = U;
            rhs[2 * k] = -Rf[i];
            rhs[2 * k + 1] = -Ra[i];
        }
        solve_block_tridiag(lo, di, up, rhs);

        // backtracking line search on the residual norm
        double t = 1.0;
        std::vector<double> fn(N + 1), an(N + 1), Rfn(N + 1, 0.0), Ran(N + 1, 0.0);
        double res_new = res;
        for (int ls = 0; ls < 30; ++ls) {
            fn[0] = an[0] = 0.0;
            for (int k = 0; k < N; ++k) {
                fn[k + 1] = f[k + 1] + t * rhs[2 * k];
                an[k + 1] = a[k + 1] + t * rhs[2 * k + 1];
            }
            sys.residual(fn, an, Rfn, Ran);
            res_new = max_abs(Rfn, Ran, N);
            if (res_new < res || res_new < tol) break;
            t *= 0.5;
        }
        f.swap(fn);
        a.swap(an);
        Rf.swap(Rfn);
        Ra.swap(Ran);
        if (res_new >= res && res_new > tol) {
            std::ostringstream ss;
            ss << "solve_profile: stalled at residual " << res_new << " (n=" << n
               << ", lambda=" << lambda << ")";
            throw numeric_error(ss.str());
        }
        res = res_new;
    }
    if (res > tol) {
        std::ostringstream ss;
        ss << "solve_profile: no convergence after " << max_iter << " iterations, residual "
           << res;
        throw numeric_error(ss.str());
    }

    RadialProfile p;
    p.n = n;
    p.lambda = lambda;
    p.r_max = r_max;
    p.dr = dr;
    p.r.resize(N + 1);
    for (int i = 0; i <= N; ++i) p.r[i] = dr * i;
    p.f = std::move(f);
    p.a = std::move(a);
    p.residual = res;
    return p;
}

namespace {
// derivative at node by centered differences (one-sided at the ends)
double deriv(const std::vector<double>& v, int i, double dr) {
    int N = int(v.size()) - 1;
    if (i == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dr);
    if (i == N) return (3.0 * v[N] - 4.0 * v[N - 1] + v[N - 2]) / (2.0 * dr);
    return (v[i + 1] - v[i - 1]) / (2.0 * dr);
}
} // namespace

double RadialProfile::energy() const {
    const int N = int(r.size()) - 1;
    const double n2 = double(n) * n;
    auto dens = [&](int i) {
        double ri = r[i];
        double fp = deriv(f, i, dr), ap = deriv(a, i, dr);
        double grad = 0.5 * fp * fp;
        double ang = ri > 0 ? 0.5 * n2 * f[i] * f[i] * (1.0 - a[i]) * (1.0 - a[i]) / (ri * ri) : 0.0;
        double mag = ri > 0 ? 0.5 * n2 * ap * ap / (ri * ri) : 0.0;
        double v = lambda / 8.0 * (f[i] * f[i] - 1.0) * (f[i] * f[i] - 1.0);
        return (grad + ang + mag + v) * ri;
    };
    double s = 0.5 * (dens(0) + dens(N));
    for (int i = 1; i < N; ++i) s += dens(i);
    return 2.0 * pi * s * dr;
}

double RadialProfile::second_moment() const {
    const int N = int(r.size()) - 1;
    const double n2 = double(n) * n;
    auto dens = [&](int i) {
        double ri = r[i];
        double fp = deriv(f, i, dr), ap = deriv(a, i, dr);
        double grad = 0.5 * fp * fp;
        double ang = ri > 0 ? 0.5 * n2 * f[i] * f[i] * (1.0 - a[i]) * (1.0 - a[i]) / (ri * ri) : 0.0;
        double mag = ri > 0 ? 0.5 * n2 * ap * ap / (ri * ri) : 0.0;
        double v = lambda / 8.0 * (f[i] * f[i] - 1.0) * (f[i] * f[i] - 1.0);
        return (grad + ang + mag + v) * ri * ri * ri;
    };
    double s = 0.5 * (dens(0) + dens(N));
    for (int i = 1; i < N; ++i) s += dens(i);
    return 2.0 * pi * s * dr;
}

double RadialProfile::bps_residual() const {
    const int N = int(r.size()) - 1;
    double m = 0.0;
    for (int i = 1; i <= N; ++i) {
        double ri = r[i];
        double fp = deriv(f, i, dr), ap = deriv(a, i, dr);
        double b1 = fp - std::abs(double(n)) * f[i] * (1.0 - a[i]) / ri;
        double b2 = std::abs(double(n)) * ap / ri - 0.5 * (1.0 - f[i] * f[i]);
        m = std::max({m, std::abs(b1), std::abs(b2)});
    }
    return m;
}

void RadialProfile::check_invariants(double tail_tol) const {
    const int N = int(r.size()) - 1;
    if (n != 0 && std::abs(f[0]) > 1e-14) throw numeric_error("profile: f(0) != 0");
    if (std::abs(a[0]) > 1e-14) throw numeric_error("profile: a(0) != 0");
    for (int i = 0; i <= N; ++i)
        if (f[i] < -1e-12 || f[i] > 1.0 + 1e-9) throw numeric_error("profile: f outside [0,1]");
    if (std::abs(1.0 - f[N]) > tail_tol || std::abs(1.0 - a[N]) > tail_tol)
        throw numeric_error("profile: tails not closed to 1 at r_max");
    for (int i = 1; i <= N; ++i) {
        if (f[i] < f[i - 1] - 1e-9) throw numeric_error("profile: f not monotone");
        if (a[i] < a[i - 1] - 1e-9) throw numeric_error("profile: a not monotone");
    }
}

void RadialProfile::build_splines() const {
    // natural cubic splines on the uniform nodes
    auto build = [&](const std::vector<double>& y, std::vector<double>& m2) {
        const int N = int(y.size()) - 1;
        m2.assign(N + 1, 0.0);
        std::vector<double> c(N + 1, 0.0), dlist(N + 1, 0.0);
        // Thomas for the tridiagonal spline system, natural BCs
        std::vector<double> cp(N + 1, 0.0), dp(N + 1, 0.0);
        for (int i = 1; i < N; ++i) {
            double rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (dr * dr);
            double bcoef = 4.0;
            double acoef = 1.0, ccoef = 1.0;
            if (i == 1) {
                cp[i] = ccoef / bcoef;
                dp[i] = rhs / bcoef;
            } else {
                double m = bcoef - acoef * cp[i - 1];
                cp[i] = ccoef / m;
                dp[i] = (rhs - acoef * dp[i - 1]) / m;
            }
        }
        for (int i = N - 1; i >= 1; --i) m2[i] = dp[i] - cp[i] * m2[i + 1];
    };
    build(f, f_spline_);
    build(a, a_spline_);
}

namespace {
double spline_eval(const std::vector<double>& y, const std::vector<double>& m2, double dr,
                   double rr) {
    const int N = int(y.size()) - 1;
    if (rr <= 0.0) return y[0];
    if (rr >= N * dr) return y[N];
    int i = int(rr / dr);
    if (i >= N) i = N - 1;
    double t = (rr - i * dr) / dr;
    double a = 1.0 - t, b = t;
    return a * y[i] + b * y[i + 1] +
           dr * dr / 6.0 * ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]);
}
} // namespace

double RadialProfile::f_at(double rr) const {
    if (rr >= r_max) return 1.0;
    if (f_spline_.empty()) build_splines();
    return spline_eval(f, f_spline_, dr, rr);
}

double RadialProfile::a_at(double rr) const {
    if (rr >= r_max) return 1.0;
    if (a_spline_.empty()) build_splines();
    return spline_eval(a, a_spline_, dr, rr);
}

namespace {
double spline_deriv(const std::vector<double>& y, const std::vector<double>& m2, double dr,
                    double rr) {
    const int N = int(y.size()) - 1;
    if (rr <= 0.0 || rr >= N * dr) return 0.0;
    int i = int(rr / dr);
    if (i >= N) i = N - 1;
    double t = (rr - i * dr) / dr;
    double a = 1.0 - t, b = t;
    return (y[i + 1] - y[i]) / dr +
           dr / 6.0 * (-(3.0 * a * a - 1.0) * m2[i] + (3.0 * b * b - 1.0) * m2[i + 1]);
}
} // namespace

double RadialProfile::f_deriv_at(double rr) const {
    if (rr >= r_max) return 0.0;
    if (f_spline_.empty()) build_splines();
    return spline_deriv(f, f_spline_, dr, rr);
}

double RadialProfile::a_deriv_at(double rr) const {
    if (rr >= r_max) return 0.0;
    if (a_spline_.empty()) build_splines();
    return spline_deriv(a, a_spline_, dr, rr);
}

} // namespace ahvx
