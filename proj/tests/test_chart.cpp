#include "doctest.h"

#include <cmath>

#include "ahvx/chart.hpp"

using namespace ahvx;

namespace {
ClosedCurve nonplanar_curve(uint64_t seed) {
    Rng rng(seed);
    double p1 = rng.uniform(0, 6), p2 = rng.uniform(0, 6);
    std::vector<Vec3> pts(256);
    for (int i = 0; i < 256; ++i) {
        double th = 2.0 * pi * i / 256;
        Vec3 x{std::cos(th), std::sin(th), 0.12 * std::sin(2 * th + p1)};
        x[0] += 0.05 * std::cos(3 * th + p2);
        pts[i] = x;
    }
    return arclength_reparametrize(pts, 48, 1e-9);
}
} // namespace

TEST_CASE("frame: orthonormality, spatiality at y0 = 0, circle hand values") {
    Worldsheet ws = build_surface(ClosedCurve::circle(1.0), 1.0);
    NormalChart ch = build_chart(ws);
    CHECK(std::abs(ch.holonomy_angle) < 1e-10); // planar curve

    double fd = 0.0;
    for (int i = 0; i <= 16; ++i)
        for (int j = 0; j < 32; ++j)
            fd = std::max(fd, ch.frame_defect(-0.95 + 1.9 * i / 16.0, ws.period() * j / 32));
    CHECK(fd < 1e-8);

    // y0 = 0: purely spatial frames; nu1 radial, nu2 = z-hat for the planar curve
    for (double y1 : {0.0, 0.9, 2.2, 5.0}) {
        FrameSample f = ch.frame(0.0, y1);
        CHECK(std::abs(f.n1[0]) < 1e-10);
        CHECK(std::abs(f.n2[0]) < 1e-10);
        double al = y1 / 1.0;
        CHECK(f.n1[1] == doctest::Approx(std::cos(al)).epsilon(1e-9));
        CHECK(f.n1[2] == doctest::Approx(std::sin(al)).epsilon(1e-9));
        CHECK(f.n2[3] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(f.n2[1]) < 1e-10);
    }
    // off the initial slice the frame picks up the boost component
    FrameSample f = ch.frame(0.5, 0.0);
    CHECK(f.n1[0] == doctest::Approx(-std::tan(0.5)).epsilon(1e-8));
    CHECK(f.n1[1] == doctest::Approx(1.0 / std::cos(0.5)).epsilon(1e-8));

    // nonplanar curve: same invariants via dense sampling
    ClosedCurve c = nonplanar_curve(3);
    Worldsheet w2 = build_surface(c, 0.2 * c.L);
    NormalChart ch2 = build_chart(w2);
    double fd2 = 0.0;
    for (int i = 0; i <= 10; ++i)
        for (int j = 0; j < 24; ++j)
            fd2 = std::max(fd2,
                           ch2.frame_defect(w2.T1 * (2.0 * i / 10 - 1.0), c.L * j / 24.0));
    CHECK(fd2 < 1e-8);
}

TEST_CASE("chart round trip and on-sheet values") {
    Worldsheet ws = build_surface(ClosedCurve::circle(1.0), 0.9);
    NormalChart ch = build_chart(ws);
    // psi at y^nu = 0 is H
    double y0v[4] = {0.3, 2.0, 0.0, 0.0};
    Vec4 x = ch.psi(y0v);
    Vec4 Hx = ws.H(0.3, 2.0);
    for (int d = 0; d < 4; ++d) CHECK(x[d] == doctest::Approx(Hx[d]).epsilon(1e-12));

    Rng rng(99);
    for (int k = 0; k < 20; ++k) {
        double y[4] = {rng.uniform(-0.7, 0.7), rng.uniform(0.0, ws.period()),
                       rng.uniform(-0.12, 0.12), rng.uniform(-0.12, 0.12)};
        Vec4 xx = ch.psi(y);
        InverseResult ir = ch.inverse(xx, 0.3);
        REQUIRE(ir.converged);
        CHECK(ir.in_tube);
        double dy1 = std::abs(ir.y[1] - y[1]);
        dy1 = std::min(dy1, ws.period() - dy1);
        CHECK(std::abs(ir.y[0] - y[0]) < 1e-9);
        CHECK(dy1 < 1e-9);
        CHECK(std::abs(ir.y[2] - y[2]) < 1e-9);
        CHECK(std::abs(ir.y[3] - y[3]) < 1e-9);
    }

    // spatial distance at t = 0 equals |y^nu| (circle geometry)
    double yv[4] = {0.0, 1.2, 0.1, -0.05};
    Vec4 p = ch.psi(yv);
    double rr = std::hypot(p[1], p[2]);
    double d0 = std::hypot(rr - 1.0, p[3]);
    CHECK(d0 == doctest::Approx(std::hypot(0.1, 0.05)).epsilon(1e-10));

    // far point: definitive not-in-tube
    InverseResult out = ch.inverse({0.0, 3.0, 3.0, 2.0}, 0.3);
    CHECK(!out.in_tube);
}

TEST_CASE("metric: block structure on the sheet, structure constant, frame rotation") {
    Worldsheet ws = build_surface(ClosedCurve::circle(1.0), 0.9);
    NormalChart ch = build_chart(ws);
    double y[4] = {0.4, 1.0, 0.0, 0.0};
    ChartMetric m = ch.metric(y);
    double cc = std::cos(0.4) * std::cos(0.4);
    CHECK(m.g[0][0] == doctest::Approx(-cc).epsilon(1e-9));
    CHECK(m.g[1][1] == doctest::Approx(cc).epsilon(1e-9));
    CHECK(m.g[2][2] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(m.g[3][3] == doctest::Approx(1.0).epsilon(1e-8));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (a != b) CHECK(std::abs(m.g[a][b]) < 1e-9);
    // Jacobian determinant at y^nu = 0 equals sqrt(-det gamma)
    CHECK(m.sqrt_mg == doctest::Approx(cc).epsilon(1e-9));

    // off-sheet block deviation grows at most linearly: |g - blockdiag| <= K |ynu|
    double K = 0.0;
    for (double r : {0.05, 0.1, 0.2}) {
        double yr[4] = {0.4, 1.0, r, 0.0};
        ChartMetric mr = ch.metric_basic(yr);
        double dev = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double blk = 0.0;
                if (a == b) blk = (a == 0 ? -cc : (a == 1 ? cc : 1.0));
                dev = std::max(dev, std::abs(mr.g[a][b] - blk));
            }
        K = std::max(K, dev / r);
    }
    CHECK(K < 10.0);

    // a constant SO(2) frame rotation leaves g, sqrt(-g) and b unchanged
    ChartParams cp;
    cp.frame_angle = 0.83;
    NormalChart chr = build_chart(ws, cp);
    double yr[4] = {0.25, 2.6, 0.11, -0.07};
    // the rotated chart parametrizes the same tube with rotated y^nu
    double ca = std::cos(cp.frame_angle), sa = std::sin(cp.frame_angle);
    double yrot[4] = {yr[0], yr[1], ca * yr[2] + sa * yr[3], -sa * yr[2] + ca * yr[3]};
    Vec4 x1 = ch.psi(yr);
    Vec4 x2 = chr.psi(yrot);
    for (int d = 0; d < 4; ++d) CHECK(std::abs(x1[d] - x2[d]) < 1e-9);
    ChartMetric m1 = ch.metric(yr);
    ChartMetric m2 = chr.metric(yrot);
    CHECK(std::abs(m1.sqrt_mg - m2.sqrt_mg) < 1e-8);
    double bn1 = std::hypot(m1.b[2], m1.b[3]), bn2 = std::hypot(m2.b[2], m2.b[3]);
    CHECK(std::abs(bn1 - bn2) < 1e-7);

    // at the focal point the chart degenerates and the metric call reports it
    double ybad[4] = {0.0, 1.0, -1.0, 0.0};
    CHECK_THROWS_AS(ch.metric_basic(ybad), numeric_error);
}

TEST_CASE("validity radii: circle caps, ellipse curvature cap, certificate") {
    // short window: the cap is half the initial curvature radius
    Worldsheet ws = build_surface(ClosedCurve::circle(1.0), 0.1);
    NormalChart ch = build_chart(ws);
    ValidityReport rep = validity_radii(ch);
    CHECK(rep.rho0 <= 0.5 + 1e-9);
    CHECK(rep.rho0 > 0.4);
    CHECK(rep.certificate_passed);
    CHECK(rep.T1 == doctest::Approx(0.1));

    // 2:1 ellipse: rho0 below the smallest curvature radius b^2/a = 0.5
    std::vector<Vec3> pts(256);
    for (int i = 0; i < 256; ++i) {
        double th = 2.0 * pi * i / 256;
        pts[i] = {2.0 * std::cos(th), 1.0 * std::sin(th), 0.0};
    }
    ClosedCurve ell = arclength_reparametrize(pts, 96, 1e-9);
    Worldsheet wse = build_surface(ell, 0.05 * ell.L);
    NormalChart che = build_chart(wse);
    ValidityReport repe = validity_radii(che);
    CHECK(repe.min_curvature_radius < 0.52);
    CHECK(repe.rho0 <= repe.min_curvature_radius + 1e-9);
}
