#ifndef AHVX_PROFILE_HPP
#define AHVX_PROFILE_HPP

#include <vector>

#include "ahvx/util.hpp"

namespace ahvx {

// Equivariant vortex profile phi = f(r) e^{i n theta}, A = n a(r) dtheta,
// solved in core units (epsilon = 1) on [0, r_max].
struct RadialProfile {
    int n = 1;
    double lambda = 1.0;
    double r_max = 20.0;
    double dr = 1.0 / 64.0;
    std::vector<double> r, f, a;
    double residual = 0.0; // final max-norm equation residual

    double energy() const;         // total 2d energy (quadrature)
    double second_moment() const;  // integral of r^2 e(r) dA
    double f_at(double rr) const;  // cubic-spline evaluation, ==1 beyond r_max
    double a_at(double rr) const;
    double f_deriv_at(double rr) const; // spline derivative, ==0 beyond r_max
    double a_deriv_at(double rr) const;

    // max over nodes of the two first-order (Bogomol'nyi) residuals; only
    // meaningful at lambda = 1.
    double bps_residual() const;

    void check_invariants(double tail_tol = 1e-4) const;

  private:
    friend RadialProfile solve_profile(int, double, double, double, double);
    mutable std::vector<double> f_spline_, a_spline_; // second derivatives
    void build_splines() const;
};

// Damped-Newton solution of the coupled radial boundary-value problem with
// f(0)=a(0)=0 and an exponential-decay (Robin) closure at r_max. Throws on
// non-convergence (message carries the last residual) and for n = 0.
RadialProfile solve_profile(int n, double lambda, double r_max = 20.0, double tol = 1e-10,
                            double dr = 1.0 / 64.0);

} // namespace ahvx

#endif
