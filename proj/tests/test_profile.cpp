#include "doctest.h"

#include <cmath>

#include "ahvx/profile.hpp"

using namespace ahvx;

TEST_CASE("BPS energies: E(n,1) = n pi under quadrature") {
    RadialProfile p1 = solve_profile(1, 1.0, 20.0, 1e-10, 1.0 / 64.0);
    CHECK(p1.energy() == doctest::Approx(pi).epsilon(5e-3));
    CHECK(std::abs(p1.energy() / pi - 1.0) < 5e-4);
    RadialProfile p2 = solve_profile(2, 1.0, 20.0, 1e-10, 1.0 / 64.0);
    CHECK(std::abs(p2.energy() / (2.0 * pi) - 1.0) < 5e-4);
}

TEST_CASE("first-order equations hold at lambda = 1 and tighten under refinement") {
    RadialProfile a = solve_profile(1, 1.0, 16.0, 1e-10, 1.0 / 32.0);
    RadialProfile b = solve_profile(1, 1.0, 16.0, 1e-10, 1.0 / 64.0);
    CHECK(b.bps_residual() < a.bps_residual() / 2.5);
    CHECK(b.bps_residual() < 1e-3);
}

TEST_CASE("profile invariants and tails") {
    for (auto [n, lam] : {std::pair{1, 1.0}, {2, 1.0}, {1, 2.0}, {1, 0.5}, {3, 1.0}}) {
        RadialProfile p = solve_profile(n, lam, 20.0, 1e-10, 1.0 / 32.0);
        p.check_invariants();
        CHECK(std::abs(p.f.back() - 1.0) < 1e-4);
        CHECK(std::abs(p.a.back() - 1.0) < 1e-4);
        CHECK(p.f[0] == 0.0);
        CHECK(p.a[0] == 0.0);
    }
}

TEST_CASE("rejection and non-convergence paths") {
    CHECK_THROWS_AS(solve_profile(0, 1.0), numeric_error);
    CHECK_THROWS_AS(solve_profile(1, -1.0), numeric_error);
    CHECK_THROWS_AS(solve_profile(1, 1.0, 5.0), numeric_error); // r_max below 10
    // an absurd tolerance cannot be reached; the error carries the residual
    CHECK_THROWS_WITH_AS(solve_profile(1, 1.0, 20.0, 1e-40, 1.0 / 16.0),
                         doctest::Contains("residual"), numeric_error);
}

TEST_CASE("spline evaluation matches nodes and saturates beyond r_max") {
    RadialProfile p = solve_profile(1, 1.0, 14.0, 1e-10, 1.0 / 32.0);
    for (int i : {5, 50, 200}) CHECK(p.f_at(p.r[i]) == doctest::Approx(p.f[i]).epsilon(1e-12));
    CHECK(p.f_at(20.0) == 1.0);
    CHECK(p.a_at(100.0) == 1.0);
    // derivative consistency against finite differences of the spline value
    double r0 = 2.3, d = 1e-6;
    CHECK(p.f_deriv_at(r0) ==
          doctest::Approx((p.f_at(r0 + d) - p.f_at(r0 - d)) / (2 * d)).epsilon(1e-5));
}
