#ifndef AHVX_PIPELINE_HPP
#define AHVX_PIPELINE_HPP

#include <string>

#include "ahvx/diagnostics.hpp"
#include "ahvx/initdata.hpp"

namespace ahvx {

// Collapsing-ring scenario: circle of radius R0 with winding-m initial data,
// axisymmetric evolution, chart diagnostics.
struct RingConfig {
    double R0 = 1.0;
    double lambda = 1.0;
    int m = 1;
    double epsilon = 1.0 / 40.0;
    double h_over_eps = 0.25;
    double rho1 = 0.0;            // 0 -> 30 epsilon
    double T_run = 0.5;           // in units of R0
    double cfl = 0.5;
    int snap_every = 8;           // steps between stored snapshots
    double T1_chart = 0.6;        // chart window (units of R0)
    double kappa2 = 1.0;
    double min_core_radii = 8.0;  // truncation guard rho1/3 >= this * eps
    double tail_bound = 1e-3;     // truncation tail energy bound (fraction of E_ref)
    double grid_rho_max = 2.2;    // units of R0
    double grid_z_half = 1.1;
    double monitor_margin_cells = 4.0;
    int zeta_slices = 14;
    int chart_n1 = 256;
    bool time_reversal_check = false;

    void validate() const; // lists every violated field
};

struct RingRun {
    RingConfig cfg;
    double rho1 = 0.0;
    TruncatedVortex tv;
    NormalChart chart;
    AssembleReport assemble_rep;
    SnapshotSeries series;

    // run monitors
    double energy0 = 0.0, energy_drift = 0.0;
    double gauss_l2_max = 0.0;
    double monitor_max = 0.0;
    double reversal_error = -1.0; // -1 when the check was not run

    // per-snapshot series
    std::vector<double> t_snap, energy_series, gauss_series;
    std::vector<double> exterior_series, weighted_series, interior_series;
    std::vector<CoreTrack> cores;
    NambuGotoCompare ng;

    // chart-slice diagnostics
    double s_data = 0.0;
    std::vector<ZetaSlice> zetas;
    double zeta3_time_integral = 0.0;
    double weighted_time_integral = 0.0;
    double exterior_at_t03 = 0.0;
    double profile_surrogate_at_s03 = 0.0;
    double zeta2_max = 0.0;
    double prop1_C = 0.0; // fitted lower-bound constant over the certified slices
    double kappa2_measured = 0.0;
};

RingRun run_ring_scenario(const RingConfig& cfg);

// analysis only (used by the CLI `analyze` on stored series)
void analyze_ring(RingRun& run);

// write the run's CSV / SVG artifacts into out_dir (must exist)
void write_ring_outputs(const RingRun& run, const std::string& out_dir,
                        const std::string& prefix);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// The acceptance suite; artifacts land in out_dir when non-empty.
std::vector<CriterionResult> run_acceptance(const std::string& out_dir);

std::string version_string();

} // namespace ahvx

#endif
