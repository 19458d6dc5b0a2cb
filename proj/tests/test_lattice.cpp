#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "ahvx/lattice.hpp"
#include "ahvx/vortex2d.hpp"

using namespace ahvx;

namespace {

Grid square(int n, double h, double o) { return Grid::make2d(n, n, h, o, o); }

Config2D sampled(const Grid& g, double eps, double lam,
                 const std::function<cplx(double, double)>& pf,
                 const std::function<void(double, double, double*, double*)>& af) {
    return sample_config(g, eps, lam, pf, af);
}

} // namespace

TEST_CASE("covariant difference: vacuum, pure gauge, linear function") {
    Grid g = square(17, 0.125, -1.0);
    Config2D u = Config2D::vacuum(g, 0.5, 1.0);
    auto d = covariant_diff(u.phi, u.ax, Axis::x, g);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 17; ++j) CHECK(std::abs(d(i, j)) == 0.0);

    // plane wave with matching constant connection is annihilated exactly
    const double k = 1.3;
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            u.phi(i, j) = std::polar(1.0, k * g.x(i));
            u.ax(i, j) = k;
        }
    d = covariant_diff(u.phi, u.ax, Axis::x, g);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 17; ++j) CHECK(std::abs(d(i, j)) < 1e-14);

    // phi = x + iy with A = 0: forward difference along x is exactly 1
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            u.phi(i, j) = cplx(g.x(i), g.y(j));
            u.ax(i, j) = 0.0;
        }
    d = covariant_diff(u.phi, u.ax, Axis::x, g);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 17; ++j) CHECK(std::abs(d(i, j) - 1.0) < 1e-13);

    Field2<cplx> wrong(5, 5);
    CHECK_THROWS_AS(covariant_diff(wrong, u.ax, Axis::x, g), shape_error);
}

TEST_CASE("curvature: d(dq) = 0 at O(h^2), constant field exact, vacuum zero") {
    auto q = [](double x, double y) { return std::sin(1.1 * x) * std::cos(0.7 * y) + 0.3 * x; };
    auto dq = [&](double x, double y, double* ax, double* ay) {
        *ax = 1.1 * std::cos(1.1 * x) * std::cos(0.7 * y) + 0.3;
        *ay = -0.7 * std::sin(1.1 * x) * std::sin(0.7 * y);
    };
    // midpoint-sampled links (not the exact integral): curl vanishes at O(h^2)
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
        int n = lev == 0 ? 21 : 41;
        Grid g = square(n, 2.0 / (n - 1), -1.0);
        Config2D u = Config2D::vacuum(g, 0.5, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double ax, ay;
                dq(g.x(i) + 0.5 * g.h, g.y(j), &ax, &ay);
                u.ax(i, j) = ax;
                dq(g.x(i), g.y(j) + 0.5 * g.h, &ax, &ay);
                u.ay(i, j) = ay;
            }
        Field2<double> f = curvature(u);
        double m = 0.0;
        for (int i = 0; i < n - 1; ++i)
            for (int j = 0; j < n - 1; ++j) m = std::max(m, std::abs(f(i, j)));
        sup[lev] = m;
    }
    CHECK(sup[0] / sup[1] > 3.0);
    CHECK(sup[1] < 2e-3);

    // symmetric-gauge constant field: the hand circulation of (-yB/2, xB/2)
    // around any square of side h is exactly B h^2
    const double B = 0.85;
    Grid g = square(21, 0.1, -1.0);
    Config2D u = Config2D::vacuum(g, 0.5, 1.0);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            u.ax(i, j) = -g.y(j) * B / 2.0;
            u.ay(i, j) = (g.x(i) + 0.0) * B / 2.0;
            // links sample the linear 1-form at midpoints, which integrates it
            // exactly; the x-link midpoint shares y with the site
            u.ay(i, j) = g.x(i) * B / 2.0;
        }
    Field2<double> f = curvature(u);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) CHECK(f(i, j) == doctest::Approx(B).epsilon(1e-12));

    Config2D v = Config2D::vacuum(g, 0.5, 1.0);
    Field2<double> f0 = curvature(v);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) CHECK(f0(i, j) == 0.0);
}

TEST_CASE("current: real field, phase gradient, exact gauge invariance") {
    Grid g = square(33, 0.0625, -1.0);
    auto pf_real = [](double x, double y) { return cplx(0.7 + 0.2 * x * y, 0.0); };
    auto af0 = [](double, double, double* ax, double* ay) { *ax = *ay = 0.0; };
    Config2D u = sampled(g, 0.5, 1.0, pf_real, af0);
    auto [jx, jy] = current(u);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            CHECK(std::abs(jx(i, j)) < 1e-14);
            CHECK(std::abs(jy(i, j)) < 1e-14);
        }

    // phi = e^{i theta(x)}: j approximates grad theta
    auto th = [](double x, double y) { return 0.8 * x - 0.5 * y + 0.3 * x * y; };
    Config2D w = sampled(g, 0.5, 1.0,
                         [&](double x, double y) { return std::polar(1.0, th(x, y)); }, af0);
    auto [jx2, jy2] = current(w);
    double m = 0.0;
    for (int i = 8; i < 24; ++i)
        for (int j = 8; j < 24; ++j) {
            double x = g.x(i) + 0.5 * g.h, y = g.y(j);
            m = std::max(m, std::abs(jx2(i, j) - (0.8 + 0.3 * y)));
        }
    CHECK(m < 2e-3); // O(h^2) at the midpoint

    // the transported link current is exactly gauge invariant
    Field2<double> chi(33, 33);
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j) chi(i, j) = 0.4 * std::sin(g.x(i)) - 0.7 * g.y(j);
    Config2D w2 = w;
    gauge_transform(w2, chi);
    auto [jx3, jy3] = current(w2);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) CHECK(std::abs(jx3(i, j) - jx2(i, j)) < 1e-12);
}

TEST_CASE("vorticity vanishes for pure gauges and obeys the pointwise bound") {
    Grid g = square(33, 0.0625, -1.0);
    // exact lattice pure gauge: links are finite differences of a sampled chi
    Field2<double> chi(33, 33);
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j)
            chi(i, j) = 0.9 * std::sin(1.3 * g.x(i)) * std::cos(0.6 * g.y(j));
    Config2D u = Config2D::vacuum(g, 0.5, 1.2);
    gauge_transform(u, chi);
    Field2<double> om = vorticity(u);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) CHECK(std::abs(om(i, j)) < 1e-12);

    // |omega| <= max(1, 1/lambda) e + O(h^2) on smooth random data
    Rng rng(42);
    for (double lam : {0.6, 1.0, 2.5}) {
        double c1 = rng.uniform(-1, 1), c2 = rng.uniform(-1, 1);
        auto pf = [&](double x, double y) {
            return cplx(0.8 + 0.25 * std::sin(x + c1), 0.3 * std::cos(y - c2));
        };
        auto af = [&](double x, double y, double* ax, double* ay) {
            *ax = 0.4 * std::sin(y + c2);
            *ay = 0.6 * std::cos(x * 0.7);
        };
        double worst[2];
        for (int lev = 0; lev < 2; ++lev) {
            int n = lev ? 65 : 33;
            Grid gg = square(n, 2.0 / (n - 1), -1.0);
            Config2D v = sampled(gg, 0.5, lam, pf, af);
            Field2<double> o = vorticity(v);
            Field2<double> e = energy_density_2d(v);
            double viol = 0.0;
            for (int i = 1; i < n - 1; ++i)
                for (int j = 1; j < n - 1; ++j) {
                    double os = 0.25 * (o(i, j) + o(i - 1, j) + o(i, j - 1) + o(i - 1, j - 1));
                    viol = std::max(viol,
                                    std::abs(os) - std::max(1.0, 1.0 / lam) * e(i, j));
                }
            worst[lev] = std::max(viol, 0.0);
        }
        CHECK(worst[1] <= std::max(worst[0] / 2.0, 1e-10));
    }
}

TEST_CASE("energy: vacuum zero, exact gauge invariance, winding chi rejected") {
    Grid g = square(41, 0.05, -1.0);
    Config2D u = Config2D::vacuum(g, 0.4, 1.0);
    CHECK(total_energy_2d(u) == 0.0);

    RadialProfile p = solve_profile(1, 1.0, 12.0, 1e-10, 1.0 / 32.0);
    double eps = 1.0 / 12.0;
    Grid g2 = square(97, eps / 4.0, -12.0 * eps);
    Config2D v = profile_to_lattice(p, g2, 0.0, 0.0, eps);
    double e0 = total_energy_2d(v);

    // constant chi: links gain exactly zero; the density moves only by the
    // rounding of the phase rotation of phi
    Field2<double> chi(97, 97, 0.37);
    Config2D v1 = v;
    gauge_transform(v1, chi);
    CHECK(std::equal(v.ax.v.begin(), v.ax.v.end(), v1.ax.v.begin()));
    CHECK(std::equal(v.ay.v.begin(), v.ay.v.end(), v1.ay.v.begin()));
    Field2<double> d0 = energy_density_2d(v);
    Field2<double> d1 = energy_density_2d(v1);
    double emax = 0.0;
    for (auto e : d0.v) emax = std::max(emax, e);
    for (int i = 0; i < 97; ++i)
        for (int j = 0; j < 97; ++j) CHECK(std::abs(d0(i, j) - d1(i, j)) < 1e-14 * emax);

    // random smooth chi: relative energy change below 1e-12
    Rng rng(7);
    for (int i = 0; i < 97; ++i)
        for (int j = 0; j < 97; ++j)
            chi(i, j) = 0.8 * std::sin(3.0 * g2.x(i) + 1.0) * std::cos(2.0 * g2.y(j));
    Config2D v2 = v;
    gauge_transform(v2, chi);
    CHECK(std::abs(total_energy_2d(v2) - e0) < 1e-12 * e0);

    // winding (multivalued) chi is rejected: branch jump exceeds pi
    Field2<double> bad(97, 97);
    for (int i = 0; i < 97; ++i)
        for (int j = 0; j < 97; ++j) bad(i, j) = std::atan2(g2.y(j), g2.x(i));
    Config2D v3 = v;
    CHECK_THROWS_AS(gauge_transform(v3, bad), numeric_error);
}

TEST_CASE("winding degree: trivial, identity map, profile, error paths") {
    Grid g = square(33, 0.125, -2.0);
    Field2<cplx> one(33, 33, cplx(1, 0));
    auto loop = rect_loop(g, 16, 16, 8, 8);
    CHECK(winding_degree(one, loop).degree == 0);

    Field2<cplx> idmap(33, 33);
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j) idmap(i, j) = cplx(g.x(i), g.y(j));
    idmap(16, 16) = cplx(1e-6, 0); // avoid the exact zero at the center site
    WindingResult w = winding_degree(idmap, loop);
    CHECK(w.degree == 1);
    CHECK(w.residual < 1e-12);

    Field2<cplx> z(33, 33, cplx(0, 0));
    CHECK_THROWS_AS(winding_degree(z, loop), numeric_error);

    // n = 2 equivariant profile at radius 10 eps: degree by phase summation
    RadialProfile p2 = solve_profile(2, 1.0, 14.0, 1e-10, 1.0 / 32.0);
    double eps = 0.1;
    Grid g2 = square(113, eps / 4.0, -14.0 * eps);
    Config2D v = profile_to_lattice(p2, g2, 0.0, 0.0, eps);
    auto loop2 = rect_loop(g2, 56, 56, 40, 40);
    CHECK(winding_degree(v.phi, loop2).degree == 2);
}

TEST_CASE("quantization against the measured boundary-energy bound") {
    RadialProfile p = solve_profile(1, 1.0, 16.0, 1e-10, 1.0 / 64.0);
    double eps = 1.0 / 12.0, h = eps / 4.0;
    Grid g = square(8 * 16 + 1, h, -16.0 * eps);
    Config2D u = profile_to_lattice(p, g, 0.0, 0.0, eps);
    int c = (g.nx() - 1) / 2;
    for (int radius_cores : {4, 6}) {
        int s = radius_cores * 4;
        double om = omega_integral_rect(u, c, c, s, s);
        WindingResult w = winding_degree(u.phi, rect_loop(g, c, c, s, s));
        CHECK(w.degree == 1);
        double bdry = boundary_energy_rect(u, c, c, s, s);
        double bound = 2.0 * eps / std::sqrt(u.lambda) * bdry;
        CHECK(std::abs(om - pi * w.degree) <= bound);
    }
}

TEST_CASE("bogomolny split: vacuum trivial, BPS residuals shrink under refinement") {
    Grid g = square(17, 0.1, -0.8);
    Config2D u = Config2D::vacuum(g, 0.5, 1.7);
    BogomolnySplit s = bogomolny_residual(u, +1);
    for (int i = 1; i < 16; ++i)
        for (int j = 1; j < 16; ++j) {
            CHECK(s.r1(i, j) == 0.0);
            CHECK(s.r2(i, j) == 0.0);
            CHECK(s.r3(i, j) == 0.0);
            CHECK(std::abs(s.defect(i, j)) < 1e-15);
        }

    RadialProfile p = solve_profile(1, 1.0, 14.0, 1e-10, 1.0 / 64.0);
    double eps = 0.125;
    double sup1[2];
    for (int lev = 0; lev < 2; ++lev) {
        double h = lev ? eps / 8.0 : eps / 4.0;
        int half = int(std::lround(14.0 * eps / h));
        Grid gg = square(2 * half + 1, h, -half * h);
        Config2D v = profile_to_lattice(p, gg, 0.0, 0.0, eps);
        BogomolnySplit sp = bogomolny_residual(v, +1);
        double m = 0.0;
        for (int i = 1; i < gg.nx() - 1; ++i)
            for (int j = 1; j < gg.ny() - 1; ++j)
                m = std::max({m, sp.r1(i, j), sp.r2(i, j)});
        sup1[lev] = m;
    }
    // first-order residual densities vanish on the BPS solution up to O(h^2)
    CHECK(sup1[1] < sup1[0] / 2.5);
}

TEST_CASE("reductions are thread-count independent") {
    RadialProfile p = solve_profile(1, 1.0, 12.0, 1e-10, 1.0 / 32.0);
    double eps = 1.0 / 10.0;
    Grid g = square(97, eps / 4.0, -12.0 * eps);
    Config2D u = profile_to_lattice(p, g, 0.0, 0.0, eps);
    par::set_thread_count(1);
    double e1 = total_energy_2d(u);
    par::set_thread_count(2);
    double e2 = total_energy_2d(u);
    par::set_thread_count(0);
    CHECK(e1 == e2);
}
