#ifndef AHVX_VORTEX2D_HPP
#define AHVX_VORTEX2D_HPP

#include <functional>
#include <string>
#include <vector>

#include "ahvx/lattice.hpp"
#include "ahvx/profile.hpp"

namespace ahvx {

// Radially decreasing weight (1 - r^3/R^3)^2 entering the confinement
// functional: f(0)=1, f(R)=0, 0 >= f' >= -C r^2 with C = 6/R^3.
struct WeightFunction {
    double R = 1.0;
    double C = 6.0;
    double operator()(double r) const {
        if (r <= 0.0) return 1.0;
        if (r >= R) return 0.0;
        double t = 1.0 - r * r * r / (R * R * R);
        return t * t;
    }
    double deriv(double r) const {
        if (r <= 0.0 || r >= R) return 0.0;
        double t = 1.0 - r * r * r / (R * R * R);
        return -6.0 * r * r / (R * R * R) * t;
    }
};

WeightFunction make_weight(double R);

// Build a configuration from analytic closures: phi sampled at sites, links
// carrying the Gauss-quadrature line integral of the 1-form (x,y)->(Ax,Ay).
Config2D sample_config(const Grid& g, double eps, double lam,
                       const std::function<cplx(double, double)>& phi_fn,
                       const std::function<void(double, double, double*, double*)>& A_fn);

// D^nu_m(U; R) = pi m - int f(|y - center|) omega(U).
double confinement(const Config2D& u, int m, const WeightFunction& w, double cx, double cy);

// Sample the equivariant ansatz phi = f(r/eps) e^{i n theta}, A = n a(r/eps) dtheta
// onto a lattice; links carry the line integral of the analytic 1-form
// (Gauss quadrature). Throws if the grid does not cover center +- r_max*eps.
Config2D profile_to_lattice(const RadialProfile& p, const Grid& grid, double cx, double cy,
                            double epsilon);

// Product ansatz for several unit-type profiles at given centers (seed for
// multi-vortex minimization). Windings add.
struct VortexSeed {
    const RadialProfile* profile;
    double cx, cy;
};
Config2D superpose_vortices(const std::vector<VortexSeed>& seeds, const Grid& grid,
                            double epsilon, double lambda);

// Pure-gauge extension surgery (the tilde-U construction): keeps u inside
// B(s), interpolates modulus to 1 and the angular connection to q'(theta)
// over s < r < s+eps, and is exactly phi = e^{i q(theta)}, A = q' dtheta
// outside. Fields beyond r >= s+eps are an exact lattice pure gauge (zero
// plaquettes, zero covariant differences to rounding).
struct ExtensionResult {
    Config2D u;
    double annulus_energy = 0.0; // measured over the surgery band
    int winding = 0;             // degree carried by the boundary phase
};
ExtensionResult extend_pure_gauge(const Config2D& u, double s, double cx = 0.0, double cy = 0.0,
                                  int modes = 32);

// Heavy-ball (accelerated) descent on the discrete 2d energy with a frozen
// pure-gauge boundary ring pinning the homotopy class.
struct MinimizeSchedule {
    int max_iter = 20000;
    double grad_tol = 1e-3;      // max-norm of the per-volume gradient
    double energy_tol = 1e-10;   // relative energy plateau per check window
    double beta = 0.95;          // momentum
    double alpha_safety = 0.9;   // fraction of the stability step bound
    int check_every = 200;       // energy/winding monitoring cadence
    double ring_margin = 0.0;    // extra gap between ring and grid edge
};

struct MinimizeResult {
    Config2D u;
    double energy = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    int winding = 0;
};

MinimizeResult minimize2d(int n, double lambda, const Grid& grid, const Config2D& seed,
                          const MinimizeSchedule& sched = {});

// Convenience: equivariant seed built internally.
MinimizeResult minimize2d_equivariant(int n, double lambda, double epsilon, double extent_cores,
                                      double h_over_eps, const MinimizeSchedule& sched = {});

struct EnergyTableEntry {
    int n;
    double lambda;
    double energy;
    double grid_h;
    double grid_extent;
    double residual; // solver gradient norm at exit
};

struct EnergyTable {
    double lambda;
    std::vector<EnergyTableEntry> entries; // n = 1..n_max
    // smallest splitting sum and the existence-criterion margin for N
    double min_splitting(int N) const;
    double criterion_margin(int N) const; // min_splitting(N) - E_N  (>0 <=> criterion holds)
    double energy_of(int n) const;        // symmetric in n
};

struct EnergyTableParams {
    double epsilon = 1.0;
    double h_over_eps = 0.25;
    double extent_cores = 20.0; // half-extent of the grid in units of eps (per |n| scaled inside)
    MinimizeSchedule sched;
};

EnergyTable energy_table(double lambda, int n_max, const EnergyTableParams& params = {});

void write_energy_table_csv(const std::string& path, const EnergyTable& t);
void write_profile_csv(const std::string& path, const RadialProfile& p);

} // namespace ahvx

#endif
