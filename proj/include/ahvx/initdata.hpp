#ifndef AHVX_INITDATA_HPP
#define AHVX_INITDATA_HPP

#include "ahvx/chart.hpp"
#include "ahvx/evolve.hpp"
#include "ahvx/profile.hpp"
#include "ahvx/vortex2d.hpp"

namespace ahvx {

// Equivariant minimizer truncated to an exact pure gauge outside rho1/2:
// unchanged inside s = rho1/3, modulus and angular connection interpolated to
// the vacuum across s < r < s+eps, exactly phi = e^{i m theta}, A = m dtheta
// beyond. All samplers take normal-plane coordinates (y2, y3).
struct TruncatedVortex {
    int m = 1;
    double epsilon = 1.0, lambda = 1.0;
    double rho1 = 0.0, s = 0.0;
    RadialProfile profile;
    double f_s = 1.0, a_s = 1.0;    // boundary data frozen at the surgery circle
    double annulus_energy = 0.0;    // energy added by the surgery band
    double energy_total = 0.0;      // 2d energy of the truncated configuration
    double e_ref = 0.0;             // reference minimizer energy (fine quadrature)
    double second_moment = 0.0;     // int |y|^2 e of the profile (core units)

    cplx phi(double y2, double y3) const;
    void oneform(double y2, double y3, double* a2, double* a3) const; // (A_2, A_3)
    bool pure_gauge_beyond(double r) const { return r >= s + epsilon; }

    // radial samplers of the truncated configuration (for profile comparisons)
    double modulus(double r) const;
    double fnu(double r) const;       // F_23
    double e_nu(double r) const;      // 2d energy density
};

// min_core_radii guards the surgery radius s = rho1/3 against the core scale;
// tail_energy_bound rejects truncations that add more than the stated
// fraction of the reference energy.
TruncatedVortex truncate_profile(const RadialProfile& p, double epsilon, double rho1,
                                 double min_core_radii = 8.0, double tail_energy_bound = 1e-3);

// Lattice-level truncation of an arbitrary centered 2d configuration
// (delegates to the pure-gauge extension surgery at rho1/3).
struct TruncateResult {
    Config2D u;
    double annulus_energy = 0.0;
    int winding = 0;
};
TruncateResult truncate_minimizer(const Config2D& u2d, double rho1, double min_core_radii = 8.0,
                                  double tail_energy_bound = 1e-3);

// Solid angle subtended by a closed polygonal loop at x (triangle-fan sum,
// defined mod 4 pi, which is all e^{i m Omega / 2} needs).
double solid_angle(const std::vector<Vec3>& loop, const Vec3& x);

struct AssembleReport {
    double total_energy = 0.0;
    double tube_energy = 0.0;          // energy within the tube radius rho1/2
    double exterior_max_density = 0.0; // max site density outside the tube
    double gauss_linf = 0.0;
    int winding_transverse = 0;
    double e_ref = 0.0;                // per unit length reference
    double overlap_mismatch = 0.0;     // tube vs exterior phase on the overlap
};

// Axisymmetric assembly on the (rho, z) half-plane: the t=0 circle chart is
// the isometry (y2, y3) = (rho - R0, z), so the tube data is placed exactly
// and the exterior carries the winding-m phase m atan2(z, rho - R0).
State2D assemble_axisym(const TruncatedVortex& tv, double R0, const Grid& grid,
                        AssembleReport* rep = nullptr);

// Full-3D assembly through the chart at t=0. Tube sites pull the truncated
// configuration back through psi0^{-1}; the exterior carries
// q = (m/2) Omega + chi(|y^nu|) wrap(m theta - (m/2) Omega), which matches
// the tube phase identically where chi = 1. Pure-gauge links are exact
// lattice phase differences, so unpierced plaquettes are flat to rounding.
State3D assemble3d(const NormalChart& chart, const TruncatedVortex& tv, const Grid& grid3,
                   AssembleReport* rep = nullptr);

} // namespace ahvx

#endif
