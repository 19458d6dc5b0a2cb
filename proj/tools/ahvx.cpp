// Command-line front end: configuration-driven pipeline orchestration.
//
// Exit codes: 0 success, 1 configuration validation, 2 numerical failure,
// 3 acceptance failure (report mode).

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ahvx/output.hpp"
#include "ahvx/pipeline.hpp"
#include "ahvx/snapshot.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace ahvx;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw numeric_error("cannot open config file " + path);
    json j;
    is >> j;
    return j;
}

RingConfig ring_from_json(const json& j) {
    RingConfig c;
    if (!j.contains("ring")) return c;
    const json& r = j["ring"];
    auto get = [&](const char* k, double& v) { if (r.contains(k)) v = r[k].get<double>(); };
    get("R0", c.R0);
    get("lambda", c.lambda);
    get("epsilon", c.epsilon);
    get("h_over_eps", c.h_over_eps);
    get("rho1", c.rho1);
    get("T_run", c.T_run);
    get("cfl", c.cfl);
    get("T1_chart", c.T1_chart);
    get("kappa2", c.kappa2);
    get("min_core_radii", c.min_core_radii);
    get("tail_bound", c.tail_bound);
    get("grid_rho_max", c.grid_rho_max);
    get("grid_z_half", c.grid_z_half);
    if (r.contains("m")) c.m = r["m"].get<int>();
    if (r.contains("snap_every")) c.snap_every = r["snap_every"].get<int>();
    if (r.contains("zeta_slices")) c.zeta_slices = r["zeta_slices"].get<int>();
    if (r.contains("time_reversal_check")) c.time_reversal_check = r["time_reversal_check"].get<bool>();
    return c;
}

json ring_manifest(const RingConfig& c, int threads) {
    json m;
    m["R0"] = c.R0;
    m["lambda"] = c.lambda;
    m["m"] = c.m;
    m["epsilon"] = c.epsilon;
    m["h_over_eps"] = c.h_over_eps;
    m["rho1"] = c.rho1 > 0 ? c.rho1 : 30.0 * c.epsilon;
    m["T_run"] = c.T_run;
    m["cfl"] = c.cfl;
    m["snap_every"] = c.snap_every;
    m["T1_chart"] = c.T1_chart;
    m["kappa2"] = c.kappa2;
    m["grid_rho_max"] = c.grid_rho_max;
    m["grid_z_half"] = c.grid_z_half;
    m["version"] = version_string();
    m["threads"] = threads;
    m["reduction"] = "fixed-chunk pairwise (thread-count independent)";
    // the circle curve is determined by R0; hash its defining data
    double curve_data[2] = {c.R0, 2.0 * ahvx::pi * c.R0};
    m["curve_hash"] = fnv1a_hex(curve_data, sizeof(curve_data));
    return m;
}

void write_series_snapshots(const SnapshotSeries& ss, const std::string& dir, json& manifest) {
    fs::create_directories(dir);
    json files = json::array();
    char name[64];
    for (std::size_t k = 0; k < ss.snaps.size(); ++k) {
        const Snapshot2D& sn = ss.snaps[k];
        json entry;
        entry["t"] = sn.t;
        auto put = [&](const char* tag, auto const& field, FieldKind kind) {
            std::snprintf(name, sizeof(name), "snap_%04zu_%s.ahvx", k, tag);
            write_field2((fs::path(dir) / name).string(), ss.grid, field, kind);
            entry[tag] = name;
        };
        put("phi", sn.phi, FieldKind::higgs);
        put("pi", sn.pi, FieldKind::pi_higgs);
        put("arho", sn.arho, FieldKind::gauge_x);
        put("az", sn.az, FieldKind::gauge_y);
        put("erho", sn.erho, FieldKind::e_x);
        put("ez", sn.ez, FieldKind::e_y);
        files.push_back(entry);
    }
    manifest["snapshots"] = files;
}

SnapshotSeries read_series_snapshots(const std::string& dir, const json& manifest) {
    SnapshotSeries ss;
    ss.epsilon = manifest["epsilon"].get<double>();
    ss.lambda = manifest["lambda"].get<double>();
    for (const auto& entry : manifest["snapshots"]) {
        Snapshot2D sn;
        sn.t = entry["t"].get<double>();
        Grid g;
        FieldKind k;
        sn.phi = read_field2_complex((fs::path(dir) / entry["phi"].get<std::string>()).string(), g, k);
        ss.grid = g;
        sn.pi = read_field2_complex((fs::path(dir) / entry["pi"].get<std::string>()).string(), g, k);
        sn.arho = read_field2((fs::path(dir) / entry["arho"].get<std::string>()).string(), g, k);
        sn.az = read_field2((fs::path(dir) / entry["az"].get<std::string>()).string(), g, k);
        sn.erho = read_field2((fs::path(dir) / entry["erho"].get<std::string>()).string(), g, k);
        sn.ez = read_field2((fs::path(dir) / entry["ez"].get<std::string>()).string(), g, k);
        ss.snaps.push_back(std::move(sn));
    }
    return ss;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"abelian Higgs vortex laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int threads = 0;
    std::uint64_t seed = 12345;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker thread count (0 = hardware)");
    app.add_option("--seed", seed, "seed for randomized property tests");

    auto* cmd_profile = app.add_subcommand("profile", "solve an equivariant vortex profile");
    int pn = 1;
    double plam = 1.0, prmax = 20.0, pdr = 1.0 / 64.0, ptol = 1e-10;
    cmd_profile->add_option("--n", pn, "winding");
    cmd_profile->add_option("--lambda", plam, "coupling");
    cmd_profile->add_option("--rmax", prmax, "radial extent (core units)");
    cmd_profile->add_option("--dr", pdr, "radial step");
    cmd_profile->add_option("--tol", ptol, "residual tolerance");

    auto* cmd_min = app.add_subcommand("minimize2d", "2d energy table over homotopy classes");
    double mlam = 1.0;
    int mnmax = 3;
    cmd_min->add_option("--lambda", mlam, "coupling");
    cmd_min->add_option("--nmax", mnmax, "largest winding");

    auto* cmd_surface = app.add_subcommand("surface", "build a worldsheet and validity report");
    double sR0 = 1.0, sT = 0.6;
    std::string curve_csv;
    cmd_surface->add_option("--R0", sR0, "circle radius");
    cmd_surface->add_option("--T", sT, "requested half-window");
    cmd_surface->add_option("--curve", curve_csv, "curve CSV (points or Fourier rows)");

    auto* cmd_init = app.add_subcommand("init", "assemble ring initial data");
    auto* cmd_evolve = app.add_subcommand("evolve", "run the ring evolution, write snapshots");
    auto* cmd_analyze = app.add_subcommand("analyze", "diagnostics from stored snapshots");
    std::string analyze_dir;
    cmd_analyze->add_option("--run", analyze_dir, "directory holding snapshots + manifest")
        ->required();
    auto* cmd_report = app.add_subcommand("report", "acceptance suite with JSON/SVG outputs");

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) par::set_thread_count(threads);

    try {
        json cfg = load_config(config_path);
        fs::create_directories(out_dir);

        if (cmd_profile->parsed()) {
            RadialProfile p = solve_profile(pn, plam, prmax, ptol, pdr);
            p.check_invariants();
            std::string path = (fs::path(out_dir) / "profile.csv").string();
            write_profile_csv(path, p);
            std::cout << "n=" << pn << " lambda=" << plam << " energy=" << p.energy()
                      << " residual=" << p.residual << " -> " << path << "\n";
            return 0;
        }
        if (cmd_min->parsed()) {
            EnergyTableParams tp;
            if (cfg.contains("minimize2d")) {
                const json& m = cfg["minimize2d"];
                if (m.contains("epsilon")) tp.epsilon = m["epsilon"].get<double>();
                if (m.contains("h_over_eps")) tp.h_over_eps = m["h_over_eps"].get<double>();
                if (m.contains("extent_cores")) tp.extent_cores = m["extent_cores"].get<double>();
                if (m.contains("max_iter")) tp.sched.max_iter = m["max_iter"].get<int>();
            }
            EnergyTable t = energy_table(mlam, mnmax, tp);
            std::string path = (fs::path(out_dir) / "energy_table.csv").string();
            write_energy_table_csv(path, t);
            for (const auto& e : t.entries)
                std::cout << "n=" << e.n << " E=" << e.energy << " (E/n pi = "
                          << e.energy / (e.n * pi) << ")\n";
            std::cout << "-> " << path << "\n";
            return 0;
        }
        if (cmd_surface->parsed()) {
            ClosedCurve c = curve_csv.empty() ? ClosedCurve::circle(sR0)
                                              : load_curve_csv(curve_csv);
            Worldsheet ws = build_surface(c, sT);
            NormalChart ch = build_chart(ws);
            ValidityReport rep = validity_radii(ch);
            json j;
            j["L"] = c.L;
            j["T1"] = rep.T1;
            j["c0"] = rep.c0;
            j["rho0"] = rep.rho0;
            j["min_curvature_radius"] = rep.min_curvature_radius;
            j["min_self_distance"] = rep.min_self_distance;
            j["certificate_passed"] = rep.certificate_passed;
            j["conformal_residual"] = ws.conformal_residual();
            j["mean_curvature_residual"] = ws.mean_curvature_residual();
            std::ofstream os((fs::path(out_dir) / "surface.json").string());
            os << j.dump(2) << "\n";
            std::cout << j.dump(2) << "\n";
            write_curve_fourier_csv((fs::path(out_dir) / "curve_fourier.csv").string(), c);
            return 0;
        }
        if (cmd_init->parsed() || cmd_evolve->parsed()) {
            RingConfig rc = ring_from_json(cfg);
            rc.validate();
            json manifest = ring_manifest(rc, par::thread_count());
            if (cmd_init->parsed()) {
                // assemble only; dump the t=0 fields and the manifest
                RadialProfile prof = solve_profile(rc.m, rc.lambda, 24.0, 1e-10, 1.0 / 64.0);
                double r1 = rc.rho1 > 0 ? rc.rho1 : 30.0 * rc.epsilon;
                TruncatedVortex tv =
                    truncate_profile(prof, rc.epsilon, r1, rc.min_core_radii, rc.tail_bound);
                double h = rc.h_over_eps * rc.epsilon;
                int nr = int(std::lround(rc.grid_rho_max * rc.R0 / h)) + 1;
                int nz = 2 * int(std::lround(rc.grid_z_half * rc.R0 / h)) + 1;
                Grid grid = Grid::make2d(nr, nz, h, 0.0, -0.5 * (nz - 1) * h);
                AssembleReport rep;
                State2D s = assemble_axisym(tv, rc.R0, grid, &rep);
                SnapshotSeries ss;
                ss.push(s);
                write_series_snapshots(ss, out_dir, manifest);
                manifest["assemble"] = {{"total_energy", rep.total_energy},
                                        {"tube_energy", rep.tube_energy},
                                        {"exterior_max_density", rep.exterior_max_density},
                                        {"gauss_linf", rep.gauss_linf},
                                        {"winding_transverse", rep.winding_transverse},
                                        {"e_ref", rep.e_ref},
                                        {"truncation_annulus_energy", tv.annulus_energy}};
                std::ofstream os((fs::path(out_dir) / "manifest.json").string());
                os << manifest.dump(2) << "\n";
                std::cout << "initial data written to " << out_dir << " (E = "
                          << rep.total_energy << ")\n";
                return 0;
            }
            RingRun run = run_ring_scenario(rc);
            write_series_snapshots(run.series, out_dir, manifest);
            manifest["monitors"] = {{"energy0", run.energy0},
                                    {"energy_drift", run.energy_drift},
                                    {"gauss_l2_max", run.gauss_l2_max},
                                    {"lightcone_max_change", run.monitor_max},
                                    {"reversal_error", run.reversal_error}};
            std::ofstream os((fs::path(out_dir) / "manifest.json").string());
            os << manifest.dump(2) << "\n";
            write_ring_outputs(run, out_dir, "ring_");
            std::cout << "run complete: drift " << run.energy_drift << ", gauss "
                      << run.gauss_l2_max << ", monitor " << run.monitor_max << "\n";
            return 0;
        }
        if (cmd_analyze->parsed()) {
            std::ifstream mi((fs::path(analyze_dir) / "manifest.json").string());
            if (!mi) throw numeric_error("analyze: no manifest.json in " + analyze_dir);
            json manifest;
            mi >> manifest;
            RingConfig rc;
            rc.R0 = manifest["R0"].get<double>();
            rc.lambda = manifest["lambda"].get<double>();
            rc.m = manifest["m"].get<int>();
            rc.epsilon = manifest["epsilon"].get<double>();
            rc.h_over_eps = manifest["h_over_eps"].get<double>();
            rc.rho1 = manifest["rho1"].get<double>();
            rc.T_run = manifest["T_run"].get<double>();
            rc.T1_chart = manifest["T1_chart"].get<double>();
            rc.kappa2 = manifest["kappa2"].get<double>();
            RingRun run;
            run.cfg = rc;
            run.rho1 = rc.rho1;
            run.series = read_series_snapshots(analyze_dir, manifest);
            RadialProfile prof = solve_profile(rc.m, rc.lambda, 24.0, 1e-10, 1.0 / 64.0);
            run.tv = truncate_profile(prof, rc.epsilon, rc.rho1, 0.0, 1.0);
            Worldsheet ws = build_surface(ClosedCurve::circle(rc.R0), rc.T1_chart * rc.R0);
            run.chart = build_chart(ws);
            run.t_snap.clear();
            run.energy_series.clear();
            run.gauss_series.clear();
            for (const auto& sn : run.series.snaps) {
                run.t_snap.push_back(sn.t);
                run.energy_series.push_back(0.0);
                run.gauss_series.push_back(0.0);
            }
            analyze_ring(run);
            write_ring_outputs(run, out_dir, "analysis_");
            json j;
            j["s_data"] = run.s_data;
            j["zeta3_time_integral"] = run.zeta3_time_integral;
            j["weighted_time_integral"] = run.weighted_time_integral;
            j["exterior_at_t03"] = run.exterior_at_t03;
            j["zeta2_max"] = run.zeta2_max;
            j["ng_max_rel_err"] = run.ng.max_rel_err;
            j["kappa2_measured"] = run.kappa2_measured;
            std::ofstream os((fs::path(out_dir) / "analysis.json").string());
            os << j.dump(2) << "\n";
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (cmd_report->parsed()) {
            auto results = run_acceptance(out_dir);
            json j;
            j["version"] = version_string();
            j["threads"] = par::thread_count();
            json arr = json::array();
            bool all = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ": " << r.name << " — "
                          << r.detail << "\n";
                arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                               {"detail", r.detail}});
                all = all && r.pass;
            }
            j["criteria"] = arr;
            j["all_pass"] = all;
            std::ofstream os((fs::path(out_dir) / "acceptance.json").string());
            os << j.dump(2) << "\n";
            std::cout << (all ? "acceptance suite: all criteria passed\n"
                              : "acceptance suite: FAILURES present\n");
            return all ? 0 : 3;
        }
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::string w = e.what();
        return w.find("invalid ring configuration") != std::string::npos ||
                       w.find("config") != std::string::npos
                   ? 1
                   : 2;
    } catch (const shape_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
