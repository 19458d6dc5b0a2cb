#ifndef AHVX_EVOLVE_HPP
#define AHVX_EVOLVE_HPP

#include "ahvx/field.hpp"
#include "ahvx/lattice.hpp"

namespace ahvx {

// Temporal-gauge state (A0 = 0) on a 2D grid: either a flat plane (the
// translation-invariant string cross-section) or the axisymmetric (rho, z)
// half-plane, where the cell measure is rho drho dz and the axis column
// rho = 0 is either frozen or updated with parity ghosts.
enum class Geometry2D { flat, axisym };

struct State2D {
    Grid grid;
    Geometry2D geom = Geometry2D::flat;
    double epsilon = 1.0, lambda = 1.0;
    double t = 0.0;
    Field2<cplx> phi, pi;        // Higgs field and its time derivative
    Field2<double> ax, ay;       // gauge links (x/rho and y/z families)
    Field2<double> ex, ey;       // link time derivatives
    Field2<char> upd_site, upd_ax, upd_ay; // 1 = dynamical, 0 = frozen
    bool axis_parity = false;    // regularized axis update (smooth data only)

    static State2D rest(const Config2D& u, Geometry2D geom);
    Config2D as_config() const; // spatial part as a 2d configuration
    double radial_weight(double x) const { return geom == Geometry2D::axisym ? x : 1.0; }
    void default_masks(int frozen_layers = 1);
};

struct Accel2D {
    Field2<cplx> phi;
    Field2<double> ax, ay;
};

// Accelerations of the second-order system (the beta = 0 component of the
// field equations is the Gauss constraint and is monitored, not integrated).
void rhs(const State2D& s, Accel2D& a);

// One velocity-Verlet step; throws if dt violates the CFL bound cfl*h.
struct Stepper2D {
    explicit Stepper2D(State2D s);
    State2D state;
    double cfl = 0.5;
    void step(double dt);
    void reverse_velocities();

  private:
    Accel2D acc_;
    bool acc_fresh_ = false;
};

struct GaussReport {
    Field2<double> residual;
    double l2 = 0.0;  // sqrt(int residual^2 dV)
    double linf = 0.0;
};
GaussReport gauss_residual(const State2D& s);

double total_energy(const State2D& s);
Field2<double> energy_density(const State2D& s); // site field, natural averaging

// Frozen-boundary bookkeeping: the initial fields are retained and the
// largest change inside the analytically silent region (farther from the
// initial support than t plus a margin) is tracked.
struct LightConeMonitor {
    Field2<double> support_dist; // distance to the initial energy support
    State2D initial;
    double margin = 0.0;
    double max_change = 0.0;
    void init(const State2D& s, double support_radius, double ccx, double ccy, double margin_);
    void sample(const State2D& s);
};

// time-independent lattice gauge transformation of the state
void gauge_transform_state(State2D& s, const Field2<double>& chi);

// --- full 3D -------------------------------------------------------------

struct State3D {
    Grid grid;
    double epsilon = 1.0, lambda = 1.0;
    double t = 0.0;
    Field3<cplx> phi, pi;
    Field3<double> a[3]; // link families x, y, z
    Field3<double> e[3];
    int frozen_layers = 1;

    bool dyn_site(int i, int j, int k) const {
        int f = frozen_layers;
        return i >= f && j >= f && k >= f && i < grid.nx() - f && j < grid.ny() - f &&
               k < grid.nz() - f;
    }
};

struct Accel3D {
    Field3<cplx> phi;
    Field3<double> a[3];
};

void rhs3d(const State3D& s, Accel3D& acc);

struct Stepper3D {
    explicit Stepper3D(State3D s);
    State3D state;
    double cfl = 0.5;
    void step(double dt);
    void reverse_velocities();

  private:
    Accel3D acc_;
    bool acc_fresh_ = false;
};

struct GaussNorms {
    double l2 = 0.0;
    double linf = 0.0;
};

double total_energy3d(const State3D& s);
Field3<double> energy_density3d(const State3D& s);
GaussNorms gauss_residual3d(const State3D& s, Field3<double>* field_out = nullptr);

} // namespace ahvx

#endif
