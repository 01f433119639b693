// Basin-of-attraction maps over initial-condition grids: per-cell 0-1
// classification, attractor fingerprinting, a registry with stable
// class ids and display colors, and relative-area statistics.
//
// Cells are evaluated by a worker pool; the per-cell results are merged
// into the registry afterwards in grid-scan order, so labels and class
// ids do not depend on the worker count.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "harvester/bifurcation.hpp"
#include "harvester/chaos01.hpp"
#include "harvester/integrator.hpp"
#include "harvester/model.hpp"

namespace harvester {

struct GridSpec {
    double x_lo = -3.0, x_hi = 3.0;
    double xd_lo = -3.0, xd_hi = 3.0;
    double v0 = 0.0;
    int nx = 200, ny = 200;

    void validate() const {
        if (!(x_lo < x_hi) || !(xd_lo < xd_hi))
            throw std::invalid_argument("grid: need lo < hi on both axes");
        if (nx < 2 || ny < 2) throw std::invalid_argument("grid: need nx, ny >= 2");
    }
    std::size_t cells() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    }
    double x_at(int i) const {
        return x_lo + (x_hi - x_lo) * static_cast<double>(i) /
                          static_cast<double>(nx - 1);
    }
    double xd_at(int j) const {
        return xd_lo + (xd_hi - xd_lo) * static_cast<double>(j) /
                           static_cast<double>(ny - 1);
    }
};

enum class Well { Left, Right, InterWell };
enum class EnergyClass { Low, High };

inline const char* to_string(Well w) {
    switch (w) {
        case Well::Left: return "left";
        case Well::Right: return "right";
        case Well::InterWell: return "inter";
    }
    return "?";
}

inline const char* to_string(EnergyClass e) {
    return e == EnergyClass::High ? "high" : "low";
}

struct AttractorFingerprint {
    int period = 1;
    std::vector<std::array<double, 2>> points;  // sorted (x, xdot) centroids
    Well well = Well::InterWell;
    bool single_well = false;  // monostable parameter regime
    EnergyClass energy = EnergyClass::Low;
};

namespace detail {

/// Smallest achievable maximum pairwise distance over perfect matchings
/// of two equal-size point sets (bottleneck assignment; the sets here
/// hold at most max_period points, so the simple augmenting-path search
/// is plenty).
inline double bottleneck_distance(const std::vector<std::array<double, 2>>& a,
                                  const std::vector<std::array<double, 2>>& b) {
    const std::size_t n = a.size();
    if (n != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<double> dist(n * n);
    std::vector<double> cand;
    cand.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dist[i * n + j] = std::hypot(a[i][0] - b[j][0], a[i][1] - b[j][1]);
            cand.push_back(dist[i * n + j]);
        }
    std::sort(cand.begin(), cand.end());

    const auto feasible = [&](double thresh) {
        std::vector<int> match_b(n, -1);
        std::vector<char> seen(n);
        const auto augment = [&](auto&& self, std::size_t i) -> bool {
            for (std::size_t j = 0; j < n; ++j) {
                if (seen[j] || dist[i * n + j] > thresh) continue;
                seen[j] = 1;
                if (match_b[j] < 0 ||
                    self(self, static_cast<std::size_t>(match_b[j]))) {
                    match_b[j] = static_cast<int>(i);
                    return true;
                }
            }
            return false;
        };
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(seen.begin(), seen.end(), 0);
            if (!augment(augment, i)) return false;
        }
        return true;
    };

    std::size_t lo = 0, hi = cand.size() - 1;
    if (!feasible(cand[hi])) return std::numeric_limits<double>::infinity();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return cand[lo];
}

/// Greedy clustering in the (x, xdot) plane with radius tol; returns
/// centroids sorted by x then xdot.
inline std::vector<std::array<double, 2>> cluster_plane(
    std::span<const State> tail, double tol) {
    std::vector<std::array<double, 2>> anchors;
    std::vector<std::array<double, 2>> sums;
    std::vector<std::size_t> counts;
    for (const State& s : tail) {
        bool placed = false;
        for (std::size_t c = 0; c < anchors.size(); ++c) {
            if (std::hypot(s.x - anchors[c][0], s.xdot - anchors[c][1]) <= tol) {
                sums[c][0] += s.x;
                sums[c][1] += s.xdot;
                ++counts[c];
                placed = true;
                break;
            }
        }
        if (!placed) {
            anchors.push_back({s.x, s.xdot});
            sums.push_back({s.x, s.xdot});
            counts.push_back(1);
        }
    }
    std::vector<std::array<double, 2>> centroids(anchors.size());
    for (std::size_t c = 0; c < anchors.size(); ++c)
        centroids[c] = {sums[c][0] / static_cast<double>(counts[c]),
                        sums[c][1] / static_cast<double>(counts[c])};
    std::sort(centroids.begin(), centroids.end());
    return centroids;
}

}  // namespace detail

/// Identifies the attractor a steady Poincare tail has settled on.
/// Well membership comes from the sign pattern of the steady x samples
/// relative to the middle equilibrium; in a monostable regime (single
/// equilibrium) the membership is the side of that equilibrium and is
/// flagged single_well, with the force extrema (x1, x2) standing in as
/// the structural boundary for the energy class.
inline AttractorFingerprint fingerprint(std::span<const State> tail,
                                        std::span<const double> eqs,
                                        double cluster_tol,
                                        std::pair<double, double> x_extrema) {
    if (tail.empty()) throw std::invalid_argument("fingerprint: empty tail");
    if (eqs.size() != 1 && eqs.size() != 3)
        throw std::invalid_argument("fingerprint: need 1 or 3 equilibria");

    AttractorFingerprint fp;
    fp.points = detail::cluster_plane(tail, cluster_tol);
    fp.period = static_cast<int>(fp.points.size());

    double x_min = tail[0].x, x_max = tail[0].x;
    for (const State& s : tail) {
        x_min = std::min(x_min, s.x);
        x_max = std::max(x_max, s.x);
    }

    if (eqs.size() == 3) {
        const double mid = eqs[1];
        if (x_min > mid) {
            fp.well = Well::Right;
        } else if (x_max < mid) {
            fp.well = Well::Left;
        } else {
            fp.well = Well::InterWell;
        }
        if (fp.well == Well::InterWell) {
            fp.energy = EnergyClass::High;
        } else {
            const double center = fp.well == Well::Right ? eqs[2] : eqs[0];
            const double excursion =
                std::max(std::abs(x_min - center), std::abs(x_max - center));
            fp.energy = excursion > 0.5 * std::abs(center - mid)
                            ? EnergyClass::High
                            : EnergyClass::Low;
        }
    } else {
        fp.single_well = true;
        fp.well = eqs[0] > 0 ? Well::Right : Well::Left;
        fp.energy = (x_max > x_extrema.first && x_min < x_extrema.second)
                        ? EnergyClass::High
                        : EnergyClass::Low;
    }
    return fp;
}

struct RegistryEntry {
    int id = 0;
    AttractorFingerprint fp;
    std::string color;
    double rep_x0 = 0.0, rep_xdot0 = 0.0;  // first cell that discovered it
    std::size_t cells = 0;
};

class AttractorRegistry {
public:
    explicit AttractorRegistry(double match_tol = 1e-2) : match_tol_(match_tol) {}

    double match_tol() const { return match_tol_; }
    const std::vector<RegistryEntry>& entries() const { return entries_; }

    bool matches(const AttractorFingerprint& a,
                 const AttractorFingerprint& b) const {
        return a.period == b.period &&
               detail::bottleneck_distance(a.points, b.points) <= match_tol_;
    }

    /// Index of the entry this fingerprint matches, or -1.
    int find(const AttractorFingerprint& fp) const {
        for (const auto& e : entries_)
            if (matches(e.fp, fp)) return e.id;
        return -1;
    }

    /// Match-or-register; class ids are assigned in first-discovery
    /// order and stay stable within a run.
    int insert(const AttractorFingerprint& fp, double rep_x0, double rep_xdot0) {
        const int found = find(fp);
        if (found >= 0) {
            ++entries_[static_cast<std::size_t>(found)].cells;
            return found;
        }
        RegistryEntry e;
        e.id = static_cast<int>(entries_.size());
        e.fp = fp;
        e.color = pick_color(fp);
        e.rep_x0 = rep_x0;
        e.rep_xdot0 = rep_xdot0;
        e.cells = 1;
        entries_.push_back(std::move(e));
        return entries_.back().id;
    }

private:
    std::string pick_color(const AttractorFingerprint& fp) const {
        std::string preferred;
        if (fp.period == 1 && fp.energy == EnergyClass::High)
            preferred = "green";
        else if (fp.period == 1 && fp.well == Well::Right)
            preferred = "red";
        else if (fp.period == 1 && fp.well == Well::Left)
            preferred = "blue";
        if (!preferred.empty() && !color_taken(preferred)) return preferred;
        static constexpr const char* palette[] = {
            "yellow", "purple", "cyan", "magenta",
            "pink",   "orange", "teal", "olive"};
        for (const char* c : palette)
            if (!color_taken(c)) return c;
        return "class" + std::to_string(entries_.size());
    }

    bool color_taken(const std::string& c) const {
        for (const auto& e : entries_)
            if (e.color == c) return true;
        return false;
    }

    double match_tol_;
    std::vector<RegistryEntry> entries_;
};

struct CellLabel {
    enum class Kind { Attractor, Chaotic, Inconclusive, Divergent };
    Kind kind = Kind::Inconclusive;
    int class_id = -1;  // valid iff kind == Attractor
};

struct BasinMap {
    GridSpec grid;
    HarvesterParams params;
    std::vector<CellLabel> labels;  // scan order: iy * nx + ix
    std::vector<double> k_stats;    // NaN for divergent cells
    AttractorRegistry registry{1e-2};

    std::string label_string(std::size_t cell) const {
        const CellLabel& l = labels[cell];
        switch (l.kind) {
            case CellLabel::Kind::Chaotic: return "chaotic";
            case CellLabel::Kind::Inconclusive: return "inconclusive";
            case CellLabel::Kind::Divergent: return "divergent";
            case CellLabel::Kind::Attractor:
                return registry.entries()[static_cast<std::size_t>(l.class_id)]
                    .color;
        }
        return "?";
    }
};

struct BasinOptions {
    int n_cycles = 1000;
    double chaos_fraction = 0.5;        // trailing part fed to the 0-1 test
    double fingerprint_fraction = 0.1;  // trailing part fingerprinted
    double cluster_tol = 1e-3;
    double match_tol = 1e-2;
    unsigned workers = 0;  // 0 = hardware concurrency
    IntegratorConfig integrator{};
};

namespace detail {

struct CellResult {
    CellLabel::Kind kind = CellLabel::Kind::Divergent;
    double k = std::numeric_limits<double>::quiet_NaN();
    std::optional<AttractorFingerprint> fp;
};

}  // namespace detail

/// Computes the basin map: each grid cell is integrated n_cycles
/// forcing periods from (x0, xdot0, v0), the steady voltage tail is
/// classified with the 0-1 test, and regular cells are fingerprinted
/// and matched into the registry. Deterministic for a fixed seed
/// regardless of worker count.
inline BasinMap compute_basins(const HarvesterParams& params,
                               const GridSpec& grid, const BasinOptions& opts,
                               const Chaos01Config& chaos_cfg) {
    grid.validate();
    chaos_cfg.validate();
    if (!(params.omega > 0))
        throw std::invalid_argument("compute_basins: omega must be positive");
    const auto chaos_len = static_cast<std::size_t>(
        std::ceil(opts.chaos_fraction * opts.n_cycles));
    if (chaos_len < 100)
        throw std::invalid_argument(
            "compute_basins: chaos_fraction * n_cycles must be >= 100 samples");

    const std::vector<double> eqs = equilibria(params);
    const std::pair<double, double> x_ext = force_extrema(params);

    const std::size_t n_cells = grid.cells();
    std::vector<detail::CellResult> results(n_cells);

    const auto eval_cell = [&](std::size_t cell) {
        const int ix = static_cast<int>(cell % static_cast<std::size_t>(grid.nx));
        const int iy = static_cast<int>(cell / static_cast<std::size_t>(grid.nx));
        const InitialCondition ic{{grid.x_at(ix), grid.xd_at(iy), grid.v0}, 0.0};
        detail::CellResult& r = results[cell];
        PoincareSeries series;
        try {
            series = poincare(params, ic,
                              static_cast<std::size_t>(opts.n_cycles),
                              opts.integrator);
        } catch (const DivergenceError&) {
            r.kind = CellLabel::Kind::Divergent;
            return;
        }
        const PoincareSeries chaos_tail = steady_tail(series, opts.chaos_fraction);
        const Chaos01Result verdict =
            classify(chaos_tail.voltages(), chaos_cfg);
        r.k = verdict.k_median;
        switch (verdict.cls) {
            case DynClass::Chaotic:
                r.kind = CellLabel::Kind::Chaotic;
                break;
            case DynClass::Inconclusive:
                r.kind = CellLabel::Kind::Inconclusive;
                break;
            case DynClass::Regular: {
                r.kind = CellLabel::Kind::Attractor;
                const PoincareSeries fp_tail =
                    steady_tail(series, opts.fingerprint_fraction);
                r.fp = fingerprint(fp_tail.samples, eqs, opts.cluster_tol, x_ext);
                break;
            }
        }
    };

    unsigned workers = opts.workers > 0 ? opts.workers
                                        : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n_cells));

    if (workers <= 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell) eval_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t cell = next.fetch_add(1);
                    if (cell >= n_cells) return;
                    try {
                        eval_cell(cell);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // Deterministic merge in grid-scan order.
    BasinMap map;
    map.grid = grid;
    map.params = params;
    map.registry = AttractorRegistry(opts.match_tol);
    map.labels.resize(n_cells);
    map.k_stats.resize(n_cells);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const detail::CellResult& r = results[cell];
        map.k_stats[cell] = r.k;
        CellLabel label;
        label.kind = r.kind;
        if (r.kind == CellLabel::Kind::Attractor) {
            const int ix =
                static_cast<int>(cell % static_cast<std::size_t>(grid.nx));
            const int iy =
                static_cast<int>(cell / static_cast<std::size_t>(grid.nx));
            label.class_id =
                map.registry.insert(*r.fp, grid.x_at(ix), grid.xd_at(iy));
        }
        map.labels[cell] = label;
    }
    return map;
}

/// Occupied-area fraction per label (registry colors plus the chaotic /
/// inconclusive / divergent specials); fractions over all present
/// labels sum to one.
inline std::map<std::string, double> relative_areas(const BasinMap& map) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t cell = 0; cell < map.labels.size(); ++cell)
        ++counts[map.label_string(cell)];
    std::map<std::string, double> out;
    for (const auto& [label, n] : counts)
        out[label] =
            static_cast<double>(n) / static_cast<double>(map.labels.size());
    return out;
}

}  // namespace harvester
