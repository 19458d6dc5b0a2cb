#include "doctest.h"

#include <cmath>

#include "ahvx/worldsheet.hpp"

using namespace ahvx;

namespace {
ClosedCurve wobbly_circle(uint64_t seed, double amp) {
    Rng rng(seed);
    double ph[8];
    for (auto& p : ph) p = rng.uniform(0, 2 * pi);
    std::vector<Vec3> pts(256);
    for (int i = 0; i < 256; ++i) {
        double th = 2.0 * pi * i / 256;
        Vec3 x{std::cos(th), std::sin(th), 0.0};
        for (int k = 2; k <= 5; ++k) {
            double ck = amp * std::cos(k * th + ph[k - 2]) / (k * k * k);
            x[0] += ck * std::cos(th);
            x[1] += ck * std::sin(th);
            x[2] += amp * std::sin(k * th + ph[k + 2]) / (k * k * k);
        }
        pts[i] = x;
    }
    return arclength_reparametrize(pts, 48, 1e-9);
}
} // namespace

TEST_CASE("arclength reparametrization: circle length, sampling independence") {
    // uniform-angle circle
    std::vector<Vec3> pts(128);
    double R = 1.7;
    for (int i = 0; i < 128; ++i) {
        double th = 2.0 * pi * i / 128;
        pts[i] = {R * std::cos(th), R * std::sin(th), 0.0};
    }
    ClosedCurve c1 = arclength_reparametrize(pts, 32, 1e-9);
    CHECK(std::abs(c1.L - 2.0 * pi * R) < 1e-8);
    CHECK(c1.max_speed_defect() < 1e-9);

    // non-uniform sampling density of the same circle gives the same point
    // set up to a phase shift
    std::vector<Vec3> pts2(128);
    for (int i = 0; i < 128; ++i) {
        double u = 2.0 * pi * i / 128;
        double th = u + 0.4 * std::sin(u); // denser near th = pi
        pts2[i] = {R * std::cos(th), R * std::sin(th), 0.0};
    }
    ClosedCurve c2 = arclength_reparametrize(pts2, 32, 1e-9);
    CHECK(std::abs(c2.L - c1.L) < 1e-7);
    // align phases via the first point of c2
    Vec3 p0 = c2.eval(0.0);
    double th0 = std::atan2(p0[1], p0[0]);
    double shift = th0 * R;
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
        double s = c1.L * i / 64;
        Vec3 a = c2.eval(s);
        Vec3 b = c1.eval(s + shift);
        worst = std::max(worst, norm3(a - b));
    }
    CHECK(worst < 1e-6);

    // figure-eight rejection
    std::vector<Vec3> fig(256);
    for (int i = 0; i < 256; ++i) {
        double t = 2.0 * pi * i / 256;
        fig[i] = {std::sin(2 * t), std::sin(t), 0.0};
    }
    CHECK_THROWS_AS(arclength_reparametrize(fig, 48, 1e-9), numeric_error);
}

TEST_CASE("circle worldsheet: closed-form gamma and collapse window") {
    double R0 = 1.0;
    Worldsheet ws = build_surface(ClosedCurve::circle(R0), 1.2);
    for (double y0 : {0.0, 0.35, 0.8, 1.15})
        for (double y1 : {0.0, 1.0, 3.0, 5.5}) {
            double g[2][2];
            ws.gamma(y0, y1, g);
            double cc = std::cos(y0 / R0) * std::cos(y0 / R0);
            CHECK(std::abs(g[0][0] + cc) < 1e-8);
            CHECK(std::abs(g[1][1] - cc) < 1e-8);
            CHECK(std::abs(g[0][1]) < 1e-8);
        }
    // any curve at y0 = 0: gamma = diag(-1, 1), zero initial velocity
    ClosedCurve c = wobbly_circle(5, 0.3);
    Worldsheet w2 = build_surface(c, 0.2 * c.L);
    for (double y1 : {0.1, 2.0, 4.0}) {
        double g[2][2];
        w2.gamma(0.0, y1, g);
        CHECK(std::abs(g[0][0] + 1.0) < 1e-8);
        CHECK(std::abs(g[1][1] - 1.0) < 1e-8);
        Vec3 v, ignore;
        w2.dh(0.0, y1, &v, &ignore);
        CHECK(norm3(v) < 1e-9);
    }
    // the ring collapses at y0 = pi R0 / 2: requesting beyond must fail and
    // the error names the admissible window
    CHECK_THROWS_WITH_AS(build_surface(ClosedCurve::circle(R0), 1.6),
                         doctest::Contains("largest admissible"), numeric_error);
}

TEST_CASE("conformal and mean-curvature residuals on random curves") {
    for (uint64_t seed : {11ull, 12ull, 13ull}) {
        ClosedCurve c = wobbly_circle(seed, 0.25);
        Worldsheet ws = build_surface(c, 0.22 * c.L);
        CHECK(ws.conformal_residual() < 1e-8);
        CHECK(ws.mean_curvature_residual() < 1e-8);
    }
}

TEST_CASE("injected perturbation shows up in the mean curvature") {
    Worldsheet ws = build_surface(ClosedCurve::circle(1.0), 0.9);
    CHECK(ws.mean_curvature_residual() < 1e-10);
    Worldsheet wsp = ws;
    wsp.pert = {0.01, 1.0, 0.2, 3, {0, 0, 1}};
    double r = wsp.mean_curvature_residual();
    CHECK(r > 1e-3);
    CHECK(r < 1.0);
}
