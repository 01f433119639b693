// Implementations behind the command-line interface. Each command is a
// plain function over an options struct so the test suite can drive the
// exact code path the binary uses; the binary itself only parses argv.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "harvester/basins.hpp"
#include "harvester/bifurcation.hpp"
#include "harvester/chaos01.hpp"
#include "harvester/config.hpp"
#include "harvester/csv.hpp"
#include "harvester/integrator.hpp"
#include "harvester/model.hpp"

namespace harvester::cli {

/// Model parameters and initial condition for one run, assembled from
/// (lowest to highest precedence) built-in defaults, a named preset,
/// config-file keys, and command-line flags. Angles are degrees here;
/// conversion to radians happens in assemble().
struct ScenarioOptions {
    std::optional<std::string> preset;
    std::optional<double> xi, chi, lambda, kappa, p, delta, phi_deg, f, omega;
    std::optional<double> x0, xdot0, v0, phase0_deg;

    void fill_from_config(const KeyValueConfig& cfg) {
        const auto fill = [&](std::optional<double>& slot, const char* key) {
            if (!slot && cfg.has(key)) slot = cfg.get_double(key);
        };
        if (!preset && cfg.has("preset")) preset = cfg.get_string("preset");
        fill(xi, "xi");
        fill(chi, "chi");
        fill(lambda, "lambda");
        fill(kappa, "kappa");
        fill(p, "p");
        fill(delta, "delta");
        fill(phi_deg, "phi_deg");
        fill(f, "f");
        fill(omega, "omega");
        fill(x0, "x0");
        fill(xdot0, "xdot0");
        fill(v0, "v0");
        fill(phase0_deg, "phase0_deg");
    }

    std::pair<HarvesterParams, InitialCondition> assemble() const {
        HarvesterParams params;
        InitialCondition ic;
        if (preset) apply_preset(*preset, params, ic);
        if (xi) params.xi = *xi;
        if (chi) params.chi = *chi;
        if (lambda) params.lambda = *lambda;
        if (kappa) params.kappa = *kappa;
        if (p) params.p = *p;
        if (delta) params.delta = *delta;
        if (phi_deg) params.phi = deg_to_rad(*phi_deg);
        if (f) params.f = *f;
        if (omega) params.omega = *omega;
        if (x0) ic.state0.x = *x0;
        if (xdot0) ic.state0.xdot = *xdot0;
        if (v0) ic.state0.v = *v0;
        if (phase0_deg)
            ic.phase0 = InitialCondition::normalize_phase(deg_to_rad(*phase0_deg));
        return {params, ic};
    }
};

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

inline std::string format_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline void require(bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error(message);
}

}  // namespace detail

// ---------------------------------------------------------------- potential

struct PotentialOptions {
    ScenarioOptions scenario;
    double x_min = -2.0;
    double x_max = 2.0;
    int n_points = 401;
    std::string out;
};

/// CSV of (x, U(x), F_r(x)) over a regular x grid.
inline void cmd_potential(const PotentialOptions& opt) {
    detail::require(opt.x_min < opt.x_max, "potential: need x_min < x_max");
    detail::require(opt.n_points >= 2, "potential: need at least 2 points");
    const auto [params, ic] = opt.scenario.assemble();
    (void)ic;
    auto out = detail::open_output(opt.out);
    out << "x,potential,restoring_force\n";
    for (int i = 0; i < opt.n_points; ++i) {
        const double x = opt.x_min + (opt.x_max - opt.x_min) *
                                         static_cast<double>(i) /
                                         static_cast<double>(opt.n_points - 1);
        out << format_double(x) << ',' << format_double(potential_energy(params, x))
            << ',' << format_double(restoring_force(params, x)) << '\n';
    }
}

// ------------------------------------------------------------ optimal-angle

struct OptimalAngleOptions {
    double delta = 0.0;
    double p = 0.0;
};

/// Prints the compensating sloping angle in degrees, four decimals.
inline void cmd_optimal_angle(const OptimalAngleOptions& opt, std::ostream& os) {
    os << detail::format_fixed4(rad_to_deg(optimal_angle(opt.delta, opt.p)))
       << '\n';
}

// ---------------------------------------------------------------- bifurcate

struct BifurcateOptions {
    ScenarioOptions scenario;
    std::string parameter = "amplitude";  // amplitude | frequency | angle
    double from = 0.0;                    // angle sweeps: degrees
    double to = 0.0;
    int points = 1200;
    std::string direction = "forward";
    int cycles = 1000;
    double tail_fraction = 0.1;
    std::string out;
};

inline SweepParameter parse_sweep_parameter(const std::string& s) {
    if (s == "amplitude") return SweepParameter::Amplitude;
    if (s == "frequency") return SweepParameter::Frequency;
    if (s == "angle") return SweepParameter::Angle;
    throw std::runtime_error(
        "unknown sweep parameter '" + s +
        "' (expected amplitude, frequency, or angle)");
}

inline SweepDirection parse_sweep_direction(const std::string& s) {
    if (s == "forward") return SweepDirection::Forward;
    if (s == "backward") return SweepDirection::Backward;
    throw std::runtime_error("unknown sweep direction '" + s +
                             "' (expected forward or backward)");
}

/// Writes the diagram as CSV rows (param value, sample index, voltage
/// sample, status) in sweep order, 12 significant digits. A point whose
/// integration diverged contributes a single row flagged "divergent"
/// and the sweep continues from the last bounded state.
inline void cmd_bifurcate(const BifurcateOptions& opt) {
    auto [params, ic] = opt.scenario.assemble();
    SweepSpec spec;
    spec.parameter = parse_sweep_parameter(opt.parameter);
    spec.direction = parse_sweep_direction(opt.direction);
    const bool angle = spec.parameter == SweepParameter::Angle;
    spec.lo = angle ? deg_to_rad(opt.from) : opt.from;
    spec.hi = angle ? deg_to_rad(opt.to) : opt.to;
    spec.n_points = opt.points;
    spec.n_cycles = opt.cycles;
    spec.tail_fraction = opt.tail_fraction;
    if (spec.parameter != SweepParameter::Frequency)
        detail::require(params.omega > 0,
                        "bifurcate: omega must be set (flag --omega or config)");

    const BifurcationDiagram diagram =
        sweep(params, spec, ic, IntegratorConfig{}, DivergencePolicy::FlagAndContinue);

    auto out = detail::open_output(opt.out);
    const char* param_col = angle ? "phi_deg"
                            : spec.parameter == SweepParameter::Amplitude ? "f"
                                                                          : "omega";
    out << param_col << ",sample_index,v_sample,status\n";
    for (std::size_t i = 0; i < diagram.values.size(); ++i) {
        const double shown =
            angle ? rad_to_deg(diagram.values[i]) : diagram.values[i];
        const std::string value_str = format_double(shown, 12);
        if (diagram.diverged[i]) {
            out << value_str << ",-1,,divergent\n";
            continue;
        }
        for (std::size_t s = 0; s < diagram.samples[i].size(); ++s)
            out << value_str << ',' << s << ','
                << format_double(diagram.samples[i][s], 12) << ",ok\n";
    }
}

// -------------------------------------------------------------------- basin

struct ChaosCliOptions {
    int n_c = 100;
    double cut_fraction = 0.1;
    double k_chaotic = 0.8;
    double k_regular = 0.2;
    std::string c_support = "full";  // full | restricted

    Chaos01Config make(std::uint64_t seed) const {
        Chaos01Config cfg;
        cfg.n_c = n_c;
        cfg.cut_fraction = cut_fraction;
        cfg.k_chaotic = k_chaotic;
        cfg.k_regular = k_regular;
        cfg.seed = seed;
        if (c_support == "restricted") {
            const auto [lo, hi] = restricted_c_support();
            cfg.c_lo = lo;
            cfg.c_hi = hi;
        } else if (c_support != "full") {
            throw std::runtime_error("c_support must be 'full' or 'restricted'");
        }
        return cfg;
    }
};

struct BasinCliOptions {
    ScenarioOptions scenario;
    GridSpec grid;
    int cycles = 1000;
    double chaos_fraction = 0.5;
    double fingerprint_fraction = 0.1;
    double cluster_tol = 1e-3;
    double match_tol = 1e-2;
    ChaosCliOptions chaos;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 0;
    std::string out;
    std::string registry_out;  // empty: derived from out
};

inline std::string derive_registry_path(const std::string& out) {
    const std::filesystem::path p(out);
    std::filesystem::path q = p;
    q.replace_extension();
    return q.string() + ".registry" + p.extension().string();
}

inline BasinMap run_basin(const BasinCliOptions& opt) {
    detail::require(opt.seed_set, "basin: --seed is required");
    const auto [params, ic] = opt.scenario.assemble();
    (void)ic;  // basins use the grid point as the initial condition
    BasinOptions bopt;
    bopt.n_cycles = opt.cycles;
    bopt.chaos_fraction = opt.chaos_fraction;
    bopt.fingerprint_fraction = opt.fingerprint_fraction;
    bopt.cluster_tol = opt.cluster_tol;
    bopt.match_tol = opt.match_tol;
    bopt.workers = opt.workers;
    return compute_basins(params, opt.grid, bopt, opt.chaos.make(opt.seed));
}

inline void write_basin_csv(const BasinMap& map, const std::string& path) {
    auto out = detail::open_output(path);
    out << "x0,xdot0,label,k\n";
    for (std::size_t cell = 0; cell < map.labels.size(); ++cell) {
        const int ix = static_cast<int>(cell % static_cast<std::size_t>(map.grid.nx));
        const int iy = static_cast<int>(cell / static_cast<std::size_t>(map.grid.nx));
        out << format_double(map.grid.x_at(ix)) << ','
            << format_double(map.grid.xd_at(iy)) << ',' << map.label_string(cell)
            << ',' << format_double(map.k_stats[cell]) << '\n';
    }
}

inline void write_registry_csv(const BasinMap& map, const std::string& path) {
    auto out = detail::open_output(path);
    out << "class_id,color,period,well,single_well,energy,points\n";
    for (const RegistryEntry& e : map.registry.entries()) {
        out << e.id << ',' << e.color << ',' << e.fp.period << ','
            << to_string(e.fp.well) << ',' << (e.fp.single_well ? 1 : 0) << ','
            << to_string(e.fp.energy) << ',';
        for (std::size_t i = 0; i < e.fp.points.size(); ++i) {
            if (i) out << ';';
            out << format_double(e.fp.points[i][0]) << ' '
                << format_double(e.fp.points[i][1]);
        }
        out << '\n';
    }
}

/// Basin map + attractor registry, two files.
inline void cmd_basin(const BasinCliOptions& opt) {
    const BasinMap map = run_basin(opt);
    write_basin_csv(map, opt.out);
    write_registry_csv(map, opt.registry_out.empty()
                                ? derive_registry_path(opt.out)
                                : opt.registry_out);
}

// -------------------------------------------------------------------- areas

struct AreasOptions {
    // file mode: basin CSVs, each "path" or "name=path"
    std::vector<std::string> inputs;
    // inline mode: one scenario swept over excitation amplitudes
    ScenarioOptions scenario;
    std::vector<double> amplitudes;
    GridSpec grid;
    int cycles = 1000;
    double chaos_fraction = 0.5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 0;
    ChaosCliOptions chaos;
    std::string out;
};

namespace detail {

inline std::map<std::string, double> areas_from_csv(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open basin CSV: " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)),
            "empty basin CSV: " + path);
    // locate the label column
    std::size_t label_col = std::string::npos;
    {
        std::stringstream header(line);
        std::string field;
        for (std::size_t col = 0; std::getline(header, field, ','); ++col)
            if (field == "label") label_col = col;
    }
    require(label_col != std::string::npos,
            "basin CSV has no 'label' column: " + path);
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string field, label;
        for (std::size_t col = 0; std::getline(row, field, ','); ++col)
            if (col == label_col) label = field;
        require(!label.empty(), "basin CSV row without label: " + path);
        ++counts[label];
        ++total;
    }
    require(total > 0, "basin CSV has no data rows: " + path);
    std::map<std::string, double> out;
    for (const auto& [label, n] : counts)
        out[label] = static_cast<double>(n) / static_cast<double>(total);
    return out;
}

}  // namespace detail

/// Stacked-fraction table (scenario, class, fraction), one row per
/// class present in each scenario; fractions per scenario sum to one.
inline void cmd_areas(const AreasOptions& opt) {
    std::vector<std::pair<std::string, std::map<std::string, double>>> table;

    if (!opt.inputs.empty()) {
        detail::require(opt.amplitudes.empty(),
                        "areas: give either --in files or --amplitudes, not both");
        for (const std::string& spec : opt.inputs) {
            std::string name, path;
            const std::size_t eq = spec.find('=');
            if (eq != std::string::npos) {
                name = spec.substr(0, eq);
                path = spec.substr(eq + 1);
            } else {
                path = spec;
                name = std::filesystem::path(spec).stem().string();
            }
            table.emplace_back(name, detail::areas_from_csv(path));
        }
    } else {
        detail::require(!opt.amplitudes.empty(),
                        "areas: need --in files or an --amplitudes list");
        detail::require(opt.seed_set, "areas: --seed is required");
        for (double amplitude : opt.amplitudes) {
            BasinCliOptions basin;
            basin.scenario = opt.scenario;
            basin.scenario.f = amplitude;
            basin.grid = opt.grid;
            basin.cycles = opt.cycles;
            basin.chaos_fraction = opt.chaos_fraction;
            basin.chaos = opt.chaos;
            basin.seed = opt.seed;
            basin.seed_set = true;
            basin.workers = opt.workers;
            const BasinMap map = run_basin(basin);
            table.emplace_back("f=" + format_double(amplitude, 1),
                               relative_areas(map));
        }
    }

    auto out = detail::open_output(opt.out);
    out << "scenario,class,fraction\n";
    for (const auto& [name, areas] : table)
        for (const auto& [label, fraction] : areas)
            out << name << ',' << label << ',' << format_double(fraction) << '\n';
}

// --------------------------------------------------------------- chaos-test

struct ChaosTestOptions {
    std::optional<std::string> series_file;  // one value per line
    ScenarioOptions scenario;                // inline mode
    int cycles = 1000;
    double input_fraction = 0.5;
    ChaosCliOptions chaos;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

namespace detail {

inline std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open series file: " + path);
    std::vector<double> series;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        const std::string token = line.substr(first, last - first + 1);
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(token, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        require(pos == token.size(), path + ":" + std::to_string(line_no) +
                                         ": not a number: " + token);
        series.push_back(v);
    }
    return series;
}

}  // namespace detail

/// Prints "K=<4 decimals> class=<regular|chaotic|inconclusive>".
inline Chaos01Result cmd_chaos_test(const ChaosTestOptions& opt,
                                    std::ostream& os) {
    detail::require(opt.seed_set, "chaos-test: --seed is required");
    std::vector<double> series;
    if (opt.series_file) {
        series = detail::read_series(*opt.series_file);
    } else {
        const auto [params, ic] = opt.scenario.assemble();
        const PoincareSeries full =
            poincare(params, ic, static_cast<std::size_t>(opt.cycles));
        series = steady_tail(full, opt.input_fraction).voltages();
    }
    const Chaos01Result result = classify(series, opt.chaos.make(opt.seed));
    os << "K=" << detail::format_fixed4(result.k_median)
       << " class=" << to_string(result.cls) << '\n';
    return result;
}

}  // namespace harvester::cli
