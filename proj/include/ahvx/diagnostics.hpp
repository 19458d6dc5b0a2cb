#ifndef AHVX_DIAGNOSTICS_HPP
#define AHVX_DIAGNOSTICS_HPP

#include <optional>

#include "ahvx/chart.hpp"
#include "ahvx/evolve.hpp"
#include "ahvx/initdata.hpp"

namespace ahvx {

// Stored axisymmetric run history: slim snapshots at a fixed cadence, with
// cubic time interpolation (Hermite where the stored time derivative is the
// partner field, Lagrange otherwise).
struct Snapshot2D {
    double t = 0.0;
    Field2<cplx> phi, pi;
    Field2<double> arho, az, erho, ez;
};

struct SnapshotSeries {
    Grid grid;
    double epsilon = 1.0, lambda = 1.0;
    std::vector<Snapshot2D> snaps;

    void push(const State2D& s);
    double t_min() const { return snaps.front().t; }
    double t_max() const { return snaps.back().t; }
};

// interpolated lab-frame sample in the (rho, z) half-plane
struct LabSample {
    cplx phi, pi;
    cplx dphi_drho, dphi_dz;
    double arho = 0, az = 0, erho = 0, ez = 0;
    double f_rz = 0; // curvature F_{rho z}
};

class SeriesInterp {
  public:
    explicit SeriesInterp(const SnapshotSeries& ss) : ss_(ss) {}
    LabSample eval(double t, double rho, double z) const;
    // coarse-stencil comparison used as the interpolation-error estimate
    double error_estimate(double t, double rho, double z) const;
    double epsilon() const { return ss_.epsilon; }
    double lambda() const { return ss_.lambda; }

  private:
    const SnapshotSeries& ss_;
};

// One pulled-back cross-section U(y1) sampled on a polar grid over the
// normal disk B(rho). All entries are chart components.
struct CrossSection {
    double y1 = 0.0;
    double rho = 0.0;
    int nr = 0, nth = 0;
    std::vector<cplx> phi;
    std::vector<double> a2, a3;    // pulled-back connection
    std::vector<double> jpa2, jpa3; // j + A (enters the vorticity)
    std::vector<double> e_nu;      // 2d normal energy density
    std::vector<double> e_g;       // e_{eps,lambda}(U, g)
    std::vector<double> dtau2;     // |D_tau phi|^2
    std::vector<double> ftau2;     // |F_tau|^2
    std::vector<double> f23;       // F_{23}
    double interp_error = 0.0;

    double node_r(int k) const { return rho * (k + 0.5) / nr; }
    double node_th(int l) const { return 2.0 * pi * l / nth; }
    double node_weight(int k) const {
        double dr = rho / nr, dth = 2.0 * pi / nth;
        return node_r(k) * dr * dth;
    }
    int idx(int k, int l) const { return k * nth + l; }
    int winding() const; // phase winding on the outermost node ring
};

struct ZetaParams {
    double rho1 = 0.0;      // fixed tube radius; disks are rho1/2
    double kappa2 = 1.0;
    int m = 1;
    double e_ref = 0.0;     // reference 2d minimizer energy
    int nr = 72, nth = 96;  // disk quadrature
};

// Pull one cross-section at chart coordinates (s, y1). The chart time slice
// is tilted, so field values come from time interpolation of the series.
CrossSection pullback_cross_section(const SeriesInterp& interp, const NormalChart& chart,
                                    double s, double y1, const ZetaParams& zp);

struct ZetaSlice {
    double s = 0.0;
    double zeta1 = 0.0;
    double zeta2 = 0.0;
    double zeta3 = 0.0;
    double zeta3_tau = 0.0;    // |D_tau|^2 + eps^2 |F_tau|^2 part alone
    double zeta3_moment = 0.0; // |y^nu|^2 e^nu part alone
    double disk_energy = 0.0;  // int e^nu over the disk (per unit length)
    double confinement = 0.0;  // D^nu_m of the section (signed)
    int winding = 0;
    double interp_error = 0.0;
};

// Axisymmetric: every y1 gives the same section, so one pullback per slice.
ZetaSlice zeta_slice(const SeriesInterp& interp, const NormalChart& chart, double s,
                     const ZetaParams& zp);

// Gauge-invariant surrogate distance to the reference vortex profile:
// int | |phi| - |phi_ref| |^2 + eps^2 int |F_23 - F_ref|^2 + int |e^nu - e_ref|
// over the disk, times the string length.
double profile_comparison(const CrossSection& cs, const TruncatedVortex& ref, double length);

// exterior / weighted-tube energies of one stored snapshot (axisymmetric)
struct TubeSplit {
    double exterior = 0.0;      // int e over the complement of N1
    double weighted = 0.0;      // int (d^nu)^2 e over N1
    double interior = 0.0;      // int e over N1
};
TubeSplit tube_split(const Snapshot2D& snap, const Grid& grid, double eps, double lam,
                     const NormalChart& chart, double rho1, double T0);

struct CoreTrack {
    double t = 0.0;
    double rho = 0.0, z = 0.0; // sub-plaquette core estimate
    double error_bar = 0.0;    // h/2
};
// axisymmetric core tracking via the winding plaquette + bilinear zero
CoreTrack track_core(const Snapshot2D& snap, const Grid& grid, int m);

// per-cross-section winding centroid for a 3d state (mode: full 3d)
struct CoreSection3D {
    double y1;
    int winding;
    double c2, c3; // centroid of |phi| minimum in normal coordinates
};
std::vector<CoreSection3D> track_cores_3d(const State3D& s, const NormalChart& chart,
                                          double rho_track, int nsections);

// |R(t) - R0 cos(t/R0)| series and max relative error
struct NambuGotoCompare {
    std::vector<double> t, err;
    double max_rel_err = 0.0;
};
NambuGotoCompare compare_nambu_goto(const std::vector<CoreTrack>& track, double R0);

// kappa2 calibration: smallest sampled constant making
// (1+kappa2 |ynu|^2) e(U,g) >= c (|Dtau|^2 + eps^2 |Ftau|^2) + (1+|ynu|^2) e^nu
// over random field data on the chart domain.
double measure_kappa2(const NormalChart& chart, double rho1, double eps, double lambda,
                      double c = 0.25, int samples = 4000, uint64_t seed = 12345);

} // namespace ahvx

#endif
