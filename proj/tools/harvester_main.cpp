// Command-line front end. Subcommands:
//   potential | optimal-angle | bifurcate | basin | areas | chaos-test
// Values may come from a flat key = value config file (--config);
// command-line flags always win.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "harvester/commands.hpp"

namespace {

using harvester::KeyValueConfig;
namespace cli = harvester::cli;

struct ScenarioFlags {
    CLI::Option* opts[14] = {};
    std::string preset;
    double xi = 0, chi = 0, lambda = 0, kappa = 0, p = 0, delta = 0,
           phi_deg = 0, f = 0, omega = 0, x0 = 0, xdot0 = 0, v0 = 0,
           phase0_deg = 0;

    void attach(CLI::App* app) {
        opts[0] = app->add_option("--preset", preset,
                                  "named parameter preset (paper-s3)");
        opts[1] = app->add_option("--xi", xi, "damping ratio");
        opts[2] = app->add_option("--chi", chi, "piezoelectric coupling (mechanical)");
        opts[3] = app->add_option("--lambda", lambda, "reciprocal time constant");
        opts[4] = app->add_option("--kappa", kappa, "piezoelectric coupling (electrical)");
        opts[5] = app->add_option("--p", p, "equivalent dimensionless gravity");
        opts[6] = app->add_option("--delta", delta, "quadratic-nonlinearity coefficient");
        opts[7] = app->add_option("--phi-deg", phi_deg, "sloping angle, degrees");
        opts[8] = app->add_option("--f", f, "excitation amplitude");
        opts[9] = app->add_option("--omega", omega, "excitation frequency");
        opts[10] = app->add_option("--x0", x0, "initial displacement");
        opts[11] = app->add_option("--xdot0", xdot0, "initial velocity");
        opts[12] = app->add_option("--v0", v0, "initial voltage");
        opts[13] = app->add_option("--phase0-deg", phase0_deg,
                                   "initial forcing phase, degrees");
    }

    cli::ScenarioOptions collect() const {
        cli::ScenarioOptions s;
        if (opts[0]->count()) s.preset = preset;
        const auto take = [](CLI::Option* o, double v) {
            return o->count() ? std::optional<double>(v) : std::nullopt;
        };
        s.xi = take(opts[1], xi);
        s.chi = take(opts[2], chi);
        s.lambda = take(opts[3], lambda);
        s.kappa = take(opts[4], kappa);
        s.p = take(opts[5], p);
        s.delta = take(opts[6], delta);
        s.phi_deg = take(opts[7], phi_deg);
        s.f = take(opts[8], f);
        s.omega = take(opts[9], omega);
        s.x0 = take(opts[10], x0);
        s.xdot0 = take(opts[11], xdot0);
        s.v0 = take(opts[12], v0);
        s.phase0_deg = take(opts[13], phase0_deg);
        return s;
    }
};

KeyValueConfig load_config(const std::string& path) {
    return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
}

// config fallback for a scalar flag the user did not pass
template <typename T>
void config_fill(const KeyValueConfig& cfg, CLI::Option* opt, const char* key,
                 T& value) {
    if (opt->count() || !cfg.has(key)) return;
    if constexpr (std::is_same_v<T, std::string>)
        value = cfg.get_string(key);
    else if constexpr (std::is_floating_point_v<T>)
        value = static_cast<T>(cfg.get_double(key));
    else
        value = static_cast<T>(cfg.get_int(key));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and nonlinear analysis of bistable"
                 " piezo-magneto-elastic energy harvesters"};
    app.require_subcommand(1);

    std::string config_path;

    // ------------------------------------------------------------ potential
    auto* sc_potential = app.add_subcommand(
        "potential", "tabulate potential energy and restoring force");
    ScenarioFlags potential_scenario;
    potential_scenario.attach(sc_potential);
    cli::PotentialOptions potential_opt;
    auto* pot_cfg = sc_potential->add_option("--config", config_path,
                                             "key = value config file");
    auto* pot_xmin = sc_potential->add_option("--x-min", potential_opt.x_min,
                                              "grid start (default -2)");
    auto* pot_xmax = sc_potential->add_option("--x-max", potential_opt.x_max,
                                              "grid end (default 2)");
    auto* pot_n = sc_potential->add_option("--points", potential_opt.n_points,
                                           "grid size (default 401)");
    sc_potential->add_option("--out", potential_opt.out, "output CSV path")
        ->required();

    // -------------------------------------------------------- optimal-angle
    auto* sc_angle = app.add_subcommand(
        "optimal-angle", "compensating sloping angle for a quadratic asymmetry");
    cli::OptimalAngleOptions angle_opt;
    auto* ang_cfg = sc_angle->add_option("--config", config_path,
                                         "key = value config file");
    auto* ang_delta = sc_angle->add_option("--delta", angle_opt.delta,
                                           "quadratic-nonlinearity coefficient");
    auto* ang_p = sc_angle->add_option("--p", angle_opt.p,
                                       "equivalent dimensionless gravity");

    // ------------------------------------------------------------ bifurcate
    auto* sc_bif = app.add_subcommand(
        "bifurcate", "forward/backward bifurcation diagram sweep");
    ScenarioFlags bif_scenario;
    bif_scenario.attach(sc_bif);
    cli::BifurcateOptions bif_opt;
    auto* bif_cfg = sc_bif->add_option("--config", config_path,
                                       "key = value config file");
    auto* bif_sweep = sc_bif->add_option(
        "--sweep", bif_opt.parameter, "swept parameter: amplitude|frequency|angle");
    auto* bif_from = sc_bif->add_option("--from", bif_opt.from,
                                        "sweep start (angle sweeps: degrees)");
    auto* bif_to = sc_bif->add_option("--to", bif_opt.to,
                                      "sweep end (angle sweeps: degrees)");
    auto* bif_points = sc_bif->add_option("--points", bif_opt.points,
                                          "sweep points (default 1200)");
    auto* bif_dir = sc_bif->add_option("--direction", bif_opt.direction,
                                       "forward|backward (default forward)");
    auto* bif_cycles = sc_bif->add_option("--cycles", bif_opt.cycles,
                                          "forcing cycles per point (default 1000)");
    auto* bif_tail = sc_bif->add_option("--tail-fraction", bif_opt.tail_fraction,
                                        "steady-state fraction (default 0.1)");
    sc_bif->add_option("--out", bif_opt.out, "output CSV path")->required();

    // ---------------------------------------------------------------- basin
    auto* sc_basin = app.add_subcommand(
        "basin", "basin-of-attraction map with attractor registry");
    ScenarioFlags basin_scenario;
    basin_scenario.attach(sc_basin);
    cli::BasinCliOptions basin_opt;
    auto* bas_cfg = sc_basin->add_option("--config", config_path,
                                         "key = value config file");
    auto* bas_x0min = sc_basin->add_option("--x0-min", basin_opt.grid.x_lo,
                                           "displacement grid start (default -3)");
    auto* bas_x0max = sc_basin->add_option("--x0-max", basin_opt.grid.x_hi,
                                           "displacement grid end (default 3)");
    auto* bas_xd0min = sc_basin->add_option("--xdot0-min", basin_opt.grid.xd_lo,
                                            "velocity grid start (default -3)");
    auto* bas_xd0max = sc_basin->add_option("--xdot0-max", basin_opt.grid.xd_hi,
                                            "velocity grid end (default 3)");
    auto* bas_v0 = sc_basin->add_option("--grid-v0", basin_opt.grid.v0,
                                        "fixed initial voltage (default 0)");
    auto* bas_nx = sc_basin->add_option("--nx", basin_opt.grid.nx,
                                        "grid resolution in x0 (default 200)");
    auto* bas_ny = sc_basin->add_option("--ny", basin_opt.grid.ny,
                                        "grid resolution in xdot0 (default 200)");
    auto* bas_cycles = sc_basin->add_option("--cycles", basin_opt.cycles,
                                            "forcing cycles per cell (default 1000)");
    auto* bas_chaosfrac = sc_basin->add_option(
        "--chaos-fraction", basin_opt.chaos_fraction,
        "trailing fraction fed to the 0-1 test (default 0.5)");
    auto* bas_fpfrac = sc_basin->add_option(
        "--fingerprint-fraction", basin_opt.fingerprint_fraction,
        "trailing fraction fingerprinted (default 0.1)");
    auto* bas_ctol = sc_basin->add_option("--cluster-tol", basin_opt.cluster_tol,
                                          "orbit clustering radius (default 1e-3)");
    auto* bas_mtol = sc_basin->add_option("--match-tol", basin_opt.match_tol,
                                          "registry matching tolerance (default 1e-2)");
    auto* bas_nc = sc_basin->add_option("--n-c", basin_opt.chaos.n_c,
                                        "0-1 test c draws (default 100)");
    auto* bas_cut = sc_basin->add_option("--cut-fraction", basin_opt.chaos.cut_fraction,
                                         "0-1 test MSD lag fraction (default 0.1)");
    auto* bas_kc = sc_basin->add_option("--k-chaotic", basin_opt.chaos.k_chaotic,
                                        "chaotic threshold (default 0.8)");
    auto* bas_kr = sc_basin->add_option("--k-regular", basin_opt.chaos.k_regular,
                                        "regular threshold (default 0.2)");
    auto* bas_csup = sc_basin->add_option("--c-support", basin_opt.chaos.c_support,
                                          "0-1 test c support: full|restricted");
    auto* bas_seed = sc_basin->add_option("--seed", basin_opt.seed,
                                          "0-1 test RNG seed (required)");
    auto* bas_workers = sc_basin->add_option("--workers", basin_opt.workers,
                                             "worker threads (default: hardware)");
    sc_basin->add_option("--out", basin_opt.out, "basin CSV path")->required();
    sc_basin->add_option("--registry-out", basin_opt.registry_out,
                         "registry CSV path (default: <out>.registry.csv)");

    // ---------------------------------------------------------------- areas
    auto* sc_areas = app.add_subcommand(
        "areas", "relative basin areas, from saved maps or inline scenarios");
    ScenarioFlags areas_scenario;
    areas_scenario.attach(sc_areas);
    cli::AreasOptions areas_opt;
    std::string amplitudes_csv;
    auto* are_cfg = sc_areas->add_option("--config", config_path,
                                         "key = value config file");
    sc_areas->add_option("--in", areas_opt.inputs,
                         "basin CSV, 'path' or 'name=path' (repeatable)");
    auto* are_amp = sc_areas->add_option(
        "--amplitudes", amplitudes_csv,
        "comma-separated excitation amplitudes (inline mode)");
    auto* are_x0min = sc_areas->add_option("--x0-min", areas_opt.grid.x_lo, "");
    auto* are_x0max = sc_areas->add_option("--x0-max", areas_opt.grid.x_hi, "");
    auto* are_xd0min = sc_areas->add_option("--xdot0-min", areas_opt.grid.xd_lo, "");
    auto* are_xd0max = sc_areas->add_option("--xdot0-max", areas_opt.grid.xd_hi, "");
    auto* are_nx = sc_areas->add_option("--nx", areas_opt.grid.nx, "");
    auto* are_ny = sc_areas->add_option("--ny", areas_opt.grid.ny, "");
    auto* are_cycles = sc_areas->add_option("--cycles", areas_opt.cycles, "");
    auto* are_seed = sc_areas->add_option("--seed", areas_opt.seed, "");
    auto* are_workers = sc_areas->add_option("--workers", areas_opt.workers, "");
    sc_areas->add_option("--out", areas_opt.out, "output CSV path")->required();

    // ----------------------------------------------------------- chaos-test
    auto* sc_chaos = app.add_subcommand(
        "chaos-test", "0-1 test verdict for a series file or inline scenario");
    ScenarioFlags chaos_scenario;
    chaos_scenario.attach(sc_chaos);
    cli::ChaosTestOptions chaos_opt;
    std::string series_path;
    auto* cha_cfg = sc_chaos->add_option("--config", config_path,
                                         "key = value config file");
    auto* cha_series = sc_chaos->add_option("--series", series_path,
                                            "series file, one value per line");
    auto* cha_cycles = sc_chaos->add_option("--cycles", chaos_opt.cycles,
                                            "forcing cycles (inline mode)");
    auto* cha_frac = sc_chaos->add_option("--input-fraction",
                                          chaos_opt.input_fraction,
                                          "trailing fraction tested (default 0.5)");
    auto* cha_nc = sc_chaos->add_option("--n-c", chaos_opt.chaos.n_c, "");
    auto* cha_cut = sc_chaos->add_option("--cut-fraction",
                                         chaos_opt.chaos.cut_fraction, "");
    auto* cha_kc = sc_chaos->add_option("--k-chaotic", chaos_opt.chaos.k_chaotic, "");
    auto* cha_kr = sc_chaos->add_option("--k-regular", chaos_opt.chaos.k_regular, "");
    auto* cha_csup = sc_chaos->add_option("--c-support", chaos_opt.chaos.c_support, "");
    auto* cha_seed = sc_chaos->add_option("--seed", chaos_opt.seed,
                                          "0-1 test RNG seed (required)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_potential->parsed()) {
            const KeyValueConfig cfg = load_config(config_path);
            potential_opt.scenario = potential_scenario.collect();
            potential_opt.scenario.fill_from_config(cfg);
            config_fill(cfg, pot_xmin, "x_min", potential_opt.x_min);
            config_fill(cfg, pot_xmax, "x_max", potential_opt.x_max);
            config_fill(cfg, pot_n, "points", potential_opt.n_points);
            (void)pot_cfg;
            cli::cmd_potential(potential_opt);
        } else if (sc_angle->parsed()) {
            const KeyValueConfig cfg = load_config(config_path);
            config_fill(cfg, ang_delta, "delta", angle_opt.delta);
            config_fill(cfg, ang_p, "p", angle_opt.p);
            if (!ang_delta->count() && !cfg.has("delta"))
                throw std::runtime_error("optimal-angle: --delta is required");
            if (!ang_p->count() && !cfg.has("p"))
                throw std::runtime_error("optimal-angle: --p is required");
            (void)ang_cfg;
            cli::cmd_optimal_angle(angle_opt, std::cout);
        } else if (sc_bif->parsed()) {
            const KeyValueConfig cfg = load_config(config_path);
            bif_opt.scenario = bif_scenario.collect();
            bif_opt.scenario.fill_from_config(cfg);
            config_fill(cfg, bif_sweep, "sweep", bif_opt.parameter);
            config_fill(cfg, bif_from, "from", bif_opt.from);
            config_fill(cfg, bif_to, "to", bif_opt.to);
            config_fill(cfg, bif_points, "points", bif_opt.points);
            config_fill(cfg, bif_dir, "direction", bif_opt.direction);
            config_fill(cfg, bif_cycles, "cycles", bif_opt.cycles);
            config_fill(cfg, bif_tail, "tail_fraction", bif_opt.tail_fraction);
            if (!bif_from->count() && !cfg.has("from"))
                throw std::runtime_error("bifurcate: --from is required");
            if (!bif_to->count() && !cfg.has("to"))
                throw std::runtime_error("bifurcate: --to is required");
            (void)bif_cfg;
            cli::cmd_bifurcate(bif_opt);
        } else if (sc_basin->parsed()) {
            const KeyValueConfig cfg = load_config(config_path);
            basin_opt.scenario = basin_scenario.collect();
            basin_opt.scenario.fill_from_config(cfg);
            config_fill(cfg, bas_x0min, "x0_min", basin_opt.grid.x_lo);
            config_fill(cfg, bas_x0max, "x0_max", basin_opt.grid.x_hi);
            config_fill(cfg, bas_xd0min, "xdot0_min", basin_opt.grid.xd_lo);
            config_fill(cfg, bas_xd0max, "xdot0_max", basin_opt.grid.xd_hi);
            config_fill(cfg, bas_v0, "grid_v0", basin_opt.grid.v0);
            config_fill(cfg, bas_nx, "nx", basin_opt.grid.nx);
            config_fill(cfg, bas_ny, "ny", basin_opt.grid.ny);
            config_fill(cfg, bas_cycles, "cycles", basin_opt.cycles);
            config_fill(cfg, bas_chaosfrac, "chaos_fraction",
                        basin_opt.chaos_fraction);
            config_fill(cfg, bas_fpfrac, "fingerprint_fraction",
                        basin_opt.fingerprint_fraction);
            config_fill(cfg, bas_ctol, "cluster_tol", basin_opt.cluster_tol);
            config_fill(cfg, bas_mtol, "match_tol", basin_opt.match_tol);
            config_fill(cfg, bas_nc, "n_c", basin_opt.chaos.n_c);
            config_fill(cfg, bas_cut, "cut_fraction", basin_opt.chaos.cut_fraction);
            config_fill(cfg, bas_kc, "k_chaotic", basin_opt.chaos.k_chaotic);
            config_fill(cfg, bas_kr, "k_regular", basin_opt.chaos.k_regular);
            config_fill(cfg, bas_csup, "c_support", basin_opt.chaos.c_support);
            config_fill(cfg, bas_seed, "seed", basin_opt.seed);
            config_fill(cfg, bas_workers, "workers", basin_opt.workers);
            basin_opt.seed_set = bas_seed->count() > 0 || cfg.has("seed");
            cli::cmd_basin(basin_opt);
        } else if (sc_areas->parsed()) {
            const KeyValueConfig cfg = load_config(config_path);
            areas_opt.scenario = areas_scenario.collect();
            areas_opt.scenario.fill_from_config(cfg);
            config_fill(cfg, are_amp, "amplitudes", amplitudes_csv);
            config_fill(cfg, are_x0min, "x0_min", areas_opt.grid.x_lo);
            config_fill(cfg, are_x0max, "x0_max", areas_opt.grid.x_hi);
            config_fill(cfg, are_xd0min, "xdot0_min", areas_opt.grid.xd_lo);
            config_fill(cfg, are_xd0max, "xdot0_max", areas_opt.grid.xd_hi);
            config_fill(cfg, are_nx, "nx", areas_opt.grid.nx);
            config_fill(cfg, are_ny, "ny", areas_opt.grid.ny);
            config_fill(cfg, are_cycles, "cycles", areas_opt.cycles);
            config_fill(cfg, are_seed, "seed", areas_opt.seed);
            config_fill(cfg, are_workers, "workers", areas_opt.workers);
            areas_opt.seed_set = are_seed->count() > 0 || cfg.has("seed");
            if (!amplitudes_csv.empty()) {
                std::stringstream ss(amplitudes_csv);
                std::string token;
                while (std::getline(ss, token, ','))
                    areas_opt.amplitudes.push_back(std::stod(token));
            }
            (void)are_cfg;
            cli::cmd_areas(areas_opt);
        } else if (sc_chaos->parsed()) {
            const KeyValueConfig cfg = load_config(config_path);
            chaos_opt.scenario = chaos_scenario.collect();
            chaos_opt.scenario.fill_from_config(cfg);
            config_fill(cfg, cha_series, "series", series_path);
            config_fill(cfg, cha_cycles, "cycles", chaos_opt.cycles);
            config_fill(cfg, cha_frac, "input_fraction", chaos_opt.input_fraction);
            config_fill(cfg, cha_nc, "n_c", chaos_opt.chaos.n_c);
            config_fill(cfg, cha_cut, "cut_fraction", chaos_opt.chaos.cut_fraction);
            config_fill(cfg, cha_kc, "k_chaotic", chaos_opt.chaos.k_chaotic);
            config_fill(cfg, cha_kr, "k_regular", chaos_opt.chaos.k_regular);
            config_fill(cfg, cha_csup, "c_support", chaos_opt.chaos.c_support);
            config_fill(cfg, cha_seed, "seed", chaos_opt.seed);
            chaos_opt.seed_set = cha_seed->count() > 0 || cfg.has("seed");
            if (!series_path.empty()) chaos_opt.series_file = series_path;
            cli::cmd_chaos_test(chaos_opt, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
