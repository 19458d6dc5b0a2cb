#include "doctest.h"

#include <cmath>

#include "ahvx/diagnostics.hpp"
#include "ahvx/evolve.hpp"
#include "ahvx/initdata.hpp"
#include "ahvx/vortex2d.hpp"

using namespace ahvx;

namespace {
Grid centered(double half_extent, double h) {
    int half = int(std::lround(half_extent / h));
    return Grid::make2d(2 * half + 1, 2 * half + 1, h, -half * h, -half * h);
}
Snapshot2D snap_of(const State2D& s) {
    Snapshot2D sn;
    sn.t = s.t;
    sn.phi = s.phi;
    sn.pi = s.pi;
    sn.arho = s.ax;
    sn.az = s.ay;
    sn.erho = s.ex;
    sn.ez = s.ey;
    return sn;
}
} // namespace

TEST_CASE("accelerations: vacuum, exact pure gauge, uniform modulus") {
    Grid g = centered(1.0, 0.05);
    Config2D u = Config2D::vacuum(g, 0.2, 1.3);
    State2D s = State2D::rest(u, Geometry2D::flat);
    Accel2D a;
    rhs(s, a);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            CHECK(std::abs(a.phi(i, j)) == 0.0);
            CHECK(a.ax(i, j) == 0.0);
            CHECK(a.ay(i, j) == 0.0);
        }

    // exact lattice pure gauge is static to rounding
    Field2<double> chi(g.nx(), g.ny());
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            chi(i, j) = 1.2 * std::sin(2.0 * g.x(i)) * std::cos(1.5 * g.y(j));
    Config2D pg = Config2D::vacuum(g, 0.2, 1.3);
    gauge_transform(pg, chi);
    State2D sp = State2D::rest(pg, Geometry2D::flat);
    rhs(sp, a);
    double m = 0.0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            m = std::max({m, std::abs(a.phi(i, j)), std::abs(a.ax(i, j)),
                          std::abs(a.ay(i, j))});
    CHECK(m < 1e-10);

    // uniform |phi| = 1 + delta: the potential force alone, by hand
    double delta = 0.07, eps = 0.3, lam = 1.7;
    Config2D um = Config2D::vacuum(g, eps, lam);
    for (auto& v : um.phi.v) v = cplx(1.0 + delta, 0.0);
    State2D su = State2D::rest(um, Geometry2D::flat);
    rhs(su, a);
    double expect = -lam / (2.0 * eps * eps) * ((1 + delta) * (1 + delta) - 1.0) * (1 + delta);
    for (int i = 2; i < g.nx() - 2; ++i)
        for (int j = 2; j < g.ny() - 2; ++j)
            CHECK(a.phi(i, j).real() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("leapfrog: vacuum stability, CFL guard, exact time reversal") {
    Grid g = centered(0.8, 0.05);
    State2D s = State2D::rest(Config2D::vacuum(g, 0.2, 1.0), Geometry2D::flat);
    Stepper2D st(std::move(s));
    for (int k = 0; k < 10000; ++k) st.step(0.02);
    double drift = 0.0;
    for (auto& v : st.state.phi.v) drift = std::max(drift, std::abs(v - cplx(1, 0)));
    CHECK(drift < 1e-12);

    CHECK_THROWS_AS(st.step(1.0), numeric_error);

    // perturbed state: forward then backward recovers the start
    RadialProfile p = solve_profile(1, 1.0, 12.0, 1e-10, 1.0 / 32.0);
    double eps = 0.1;
    Grid g2 = centered(12.0 * eps, eps / 4.0);
    Config2D u = profile_to_lattice(p, g2, 0.0, 0.0, eps);
    State2D s2 = State2D::rest(u, Geometry2D::flat);
    Field2<cplx> phi0 = s2.phi;
    Stepper2D st2(std::move(s2));
    double dt = 0.5 * g2.h;
    for (int k = 0; k < 1000; ++k) st2.step(dt);
    st2.reverse_velocities();
    for (int k = 0; k < 1000; ++k) st2.step(dt);
    double m = 0.0;
    for (std::size_t i = 0; i < phi0.v.size(); ++i)
        m = std::max(m, std::abs(st2.state.phi.v[i] - phi0.v[i]));
    CHECK(m < 1e-8);
}

TEST_CASE("a 2d vortex at rest stays put (translation-invariant string)") {
    RadialProfile p = solve_profile(1, 1.0, 14.0, 1e-10, 1.0 / 64.0);
    double eps = 0.125, h = eps / 4.0;
    Grid g = centered(14.0 * eps, h);
    Config2D u = profile_to_lattice(p, g, 0.0, 0.0, eps);
    State2D s = State2D::rest(u, Geometry2D::flat);
    Stepper2D st(std::move(s));
    double dt = 0.4 * h;
    double T = 10.0 * eps;
    int n = int(T / dt);
    CoreTrack c0 = track_core(snap_of(st.state), g, 1);
    for (int k = 0; k < n; ++k) st.step(dt);
    CoreTrack c1 = track_core(snap_of(st.state), g, 1);
    CHECK(std::hypot(c1.rho - c0.rho, c1.z - c0.z) < 0.1 * eps);
}

TEST_CASE("gauss residual: definition check and boundedness along a run") {
    Grid g = centered(0.8, 0.05);
    State2D s = State2D::rest(Config2D::vacuum(g, 0.25, 1.0), Geometry2D::flat);
    // injected random link velocities: the residual is exactly the divergence
    Rng rng(5);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            s.ex(i, j) = rng.uniform(-1, 1);
            s.ey(i, j) = rng.uniform(-1, 1);
        }
    GaussReport r = gauss_residual(s);
    double ee = s.epsilon * s.epsilon;
    for (int i = 1; i < g.nx() - 1; ++i)
        for (int j = 1; j < g.ny() - 1; ++j) {
            double div = (s.ex(i, j) - s.ex(i - 1, j) + s.ey(i, j) - s.ey(i, j - 1)) / g.h;
            CHECK(r.residual(i, j) == doctest::Approx(ee * div).epsilon(1e-12));
        }

    // vortex run: residual stays at rounding level while the boundary is
    // causally silent
    RadialProfile p = solve_profile(1, 1.0, 16.0, 1e-10, 1.0 / 32.0);
    double eps = 0.1;
    Grid g2 = centered(16.0 * eps, eps / 4.0);
    State2D s2 = State2D::rest(profile_to_lattice(p, g2, 0.0, 0.0, eps), Geometry2D::flat);
    double E0 = total_energy(s2);
    Stepper2D st(std::move(s2));
    for (int k = 0; k < 100; ++k) st.step(0.4 * g2.h); // cone stays inside the grid
    CHECK(gauss_residual(st.state).l2 < 1e-6 * E0);
    CHECK(std::abs(total_energy(st.state) - E0) < 1e-4 * E0);
    // once reflections off the frozen rim set in, the residual may grow, but
    // at most linearly in t
    for (int k = 0; k < 400; ++k) st.step(0.4 * g2.h); // reflections under way
    double g_half = gauss_residual(st.state).l2;
    double t_half = st.state.t;
    for (int k = 0; k < 500; ++k) st.step(0.4 * g2.h);
    double g_full = gauss_residual(st.state).l2;
    CHECK(g_full < 1e-3 * E0);
    CHECK(g_full <= std::max(2.5 * (st.state.t / t_half) * g_half, 1e-9 * E0));
}

TEST_CASE("time-independent gauge transformations commute with the flow") {
    RadialProfile p = solve_profile(1, 1.0, 12.0, 1e-10, 1.0 / 32.0);
    double eps = 0.1;
    Grid g = centered(12.0 * eps, eps / 4.0);
    State2D s = State2D::rest(profile_to_lattice(p, g, 0.0, 0.0, eps), Geometry2D::flat);
    Field2<double> chi(g.nx(), g.ny());
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            chi(i, j) = 0.8 * std::sin(g.x(i) / eps * 0.3) * std::cos(g.y(j) / eps * 0.2);

    State2D s_a = s; // transform then evolve
    gauge_transform_state(s_a, chi);
    Stepper2D sta(std::move(s_a));
    Stepper2D stb(std::move(s)); // evolve then transform
    for (int k = 0; k < 20; ++k) {
        sta.step(0.4 * g.h);
        stb.step(0.4 * g.h);
    }
    State2D s_b = stb.state;
    gauge_transform_state(s_b, chi);
    double m = 0.0;
    for (std::size_t i = 0; i < s_b.phi.v.size(); ++i)
        m = std::max(m, std::abs(s_b.phi.v[i] - sta.state.phi.v[i]));
    CHECK(m < 1e-10);
}

TEST_CASE("light-cone monitor: silence outside the cone, breach when the support lies") {
    // data that is exactly pure gauge outside a compact set (surgery output)
    RadialProfile p = solve_profile(1, 1.0, 12.0, 1e-10, 1.0 / 32.0);
    double eps = 0.2, h = eps / 4.0;
    Grid g = centered(12.0 * eps, h);
    Config2D u0 = profile_to_lattice(p, g, 0.0, 0.0, eps);
    ExtensionResult ext = extend_pure_gauge(u0, 4.0 * eps, 0.0, 0.0);
    State2D s = State2D::rest(ext.u, Geometry2D::flat);
    double support = 5.0 * eps + 2.0 * h; // pure gauge beyond 5 eps
    LightConeMonitor mon;
    mon.init(s, support, 0.0, 0.0, 8.0 * h);
    // understated support: the monitor watches genuinely active cells
    LightConeMonitor bad;
    bad.init(s, 0.5 * eps, 0.0, 0.0, 1.0 * h);
    Stepper2D st(std::move(s));
    for (int k = 0; k < 40; ++k) st.step(0.5 * h); // t = eps, cone well inside
    mon.sample(st.state);
    bad.sample(st.state);
    CHECK(mon.max_change < 1e-8);
    CHECK(bad.max_change > 1e3 * std::max(mon.max_change, 1e-300));
}

TEST_CASE("axis parity mode keeps smooth axisymmetric data regular") {
    double h = 0.05;
    Grid g = Grid::make2d(41, 41, h, 0.0, -1.0);
    Config2D u = Config2D::vacuum(g, 0.3, 1.0);
    for (int i = 0; i < 41; ++i)
        for (int j = 0; j < 41; ++j) {
            double rho = g.x(i), z = g.y(j);
            u.phi(i, j) = 1.0 + 0.05 * std::exp(-(rho * rho + z * z) / 0.1);
        }
    State2D s = State2D::rest(u, Geometry2D::axisym);
    s.axis_parity = true;
    s.default_masks();
    double E0 = total_energy(s);
    Stepper2D st(std::move(s));
    for (int k = 0; k < 640; ++k) st.step(0.25 * h);
    for (auto& v : st.state.phi.v) CHECK(std::isfinite(v.real()));
    CHECK(std::abs(total_energy(st.state) - E0) < 5e-3 * E0);
}

TEST_CASE("axisymmetric ring: radius decreases, 3d energy conserved") {
    RadialProfile p = solve_profile(1, 1.0, 16.0, 1e-10, 1.0 / 32.0);
    double R0 = 1.0, eps = 1.0 / 16.0, h = eps / 4.0;
    TruncatedVortex tv = truncate_profile(p, eps, 12.0 * eps, 3.9, 1e-2);
    int nr = int(std::lround(1.9 / h)) + 1;
    int nz = 2 * int(std::lround(0.8 / h)) + 1;
    Grid g = Grid::make2d(nr, nz, h, 0.0, -0.5 * (nz - 1) * h);
    State2D s = assemble_axisym(tv, R0, g, nullptr);
    double E0 = total_energy(s);
    Stepper2D st(std::move(s));
    double dt = 0.5 * h;
    int n = int(0.35 / dt);
    for (int k = 0; k < n; ++k) st.step(dt);
    CHECK(std::abs(total_energy(st.state) - E0) < 2e-4 * E0);
    CoreTrack c = track_core(snap_of(st.state), g, 1);
    CHECK(c.rho < R0 - 0.01); // the ring is collapsing
    CHECK(c.rho > 0.5 * R0);
}

TEST_CASE("3d: vacuum and pure-gauge staticity, gauss definition, short ring run") {
    Grid g3 = Grid::make3d(20, 20, 20, 0.1, -1.0, -1.0, -1.0);
    State3D s;
    s.grid = g3;
    s.epsilon = 0.3;
    s.lambda = 1.0;
    s.phi = Field3<cplx>(20, 20, 20, cplx(1, 0));
    s.pi = Field3<cplx>(20, 20, 20, cplx(0, 0));
    for (int d = 0; d < 3; ++d) {
        s.a[d] = Field3<double>(20, 20, 20, 0.0);
        s.e[d] = Field3<double>(20, 20, 20, 0.0);
    }
    // pure gauge: chi sampled, links as exact differences
    auto chi = [](double x, double y, double z) {
        return 0.7 * std::sin(x + 0.5 * y) * std::cos(z);
    };
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k) {
                double x = g3.x(i), y = g3.y(j), z = g3.z(k);
                s.phi(i, j, k) = std::polar(1.0, chi(x, y, z));
                if (i < 19) s.a[0](i, j, k) = (chi(x + 0.1, y, z) - chi(x, y, z)) / 0.1;
                if (j < 19) s.a[1](i, j, k) = (chi(x, y + 0.1, z) - chi(x, y, z)) / 0.1;
                if (k < 19) s.a[2](i, j, k) = (chi(x, y, z + 0.1) - chi(x, y, z)) / 0.1;
            }
    Accel3D acc;
    rhs3d(s, acc);
    double m = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j)
            for (int k = 0; k < 20; ++k) {
                m = std::max(m, std::abs(acc.phi(i, j, k)));
                for (int d = 0; d < 3; ++d) m = std::max(m, std::abs(acc.a[d](i, j, k)));
            }
    CHECK(m < 1e-10);
    CHECK(gauss_residual3d(s).linf < 1e-14);

    // a short coarse ring run in full 3d stays conservative
    RadialProfile p = solve_profile(1, 1.0, 16.0, 1e-10, 1.0 / 32.0);
    double eps = 1.0 / 12.0, h = eps / 2.0;
    TruncatedVortex tv = truncate_profile(p, eps, 6.0 * eps, 1.9, 0.5);
    Worldsheet ws = build_surface(ClosedCurve::circle(1.0), 0.2);
    ChartParams cp;
    cp.n1 = 192;
    NormalChart ch = build_chart(ws, cp);
    int n = int(std::lround(3.0 / h)) + 1;
    Grid gg = Grid::make3d(n, n, int(std::lround(1.6 / h)) + 1, h, -1.5, -1.5, -0.8);
    State3D s3 = assemble3d(ch, tv, gg, nullptr);
    double E0 = total_energy3d(s3);
    Stepper3D st(std::move(s3));
    for (int k = 0; k < 20; ++k) st.step(0.4 * h);
    // two cells per core radius: coarse-resolution bounds
    CHECK(std::abs(total_energy3d(st.state) - E0) < 5e-3 * E0);
    CHECK(gauss_residual3d(st.state).l2 < 5e-3 * E0);
}
