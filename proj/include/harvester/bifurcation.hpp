// Forward/backward sweep engine: steady-state Poincare voltage samples
// versus excitation amplitude, excitation frequency, or sloping angle,
// with state continuation between sweep points.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harvester/integrator.hpp"
#include "harvester/model.hpp"

namespace harvester {

enum class SweepParameter { Amplitude, Frequency, Angle };
enum class SweepDirection { Forward, Backward };

inline const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Amplitude: return "amplitude";
        case SweepParameter::Frequency: return "frequency";
        case SweepParameter::Angle: return "angle";
    }
    return "?";
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::Amplitude;
    double lo = 0.0;
    double hi = 1.0;          // angle sweeps: radians (degrees only at I/O)
    int n_points = 1200;
    SweepDirection direction = SweepDirection::Forward;
    int n_cycles = 1000;
    double tail_fraction = 0.1;

    void validate() const {
        if (!(lo < hi)) throw std::invalid_argument("sweep: need lo < hi");
        if (n_points < 2) throw std::invalid_argument("sweep: need n_points >= 2");
        if (n_cycles < 1) throw std::invalid_argument("sweep: need n_cycles >= 1");
        if (!(tail_fraction > 0) || tail_fraction > 1)
            throw std::invalid_argument("sweep: tail_fraction in (0, 1]");
    }

    /// Regularly spaced values of the swept parameter, in sweep order.
    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i)
            v[static_cast<std::size_t>(i)] =
                lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(n_points - 1);
        if (direction == SweepDirection::Backward)
            std::reverse(v.begin(), v.end());
        return v;
    }
};

struct BifurcationDiagram {
    std::vector<double> values;                    // in sweep order
    std::vector<std::vector<double>> samples;      // steady voltage tail per value
    std::vector<bool> diverged;                    // per value
    SweepDirection direction = SweepDirection::Forward;
    SweepParameter parameter = SweepParameter::Amplitude;
    HarvesterParams base;
};

/// Integration blew up at one sweep point (Throw policy).
class SweepDivergence : public std::runtime_error {
public:
    SweepDivergence(double param_value, double time)
        : std::runtime_error("sweep diverged at parameter value " +
                             std::to_string(param_value) + " (t = " +
                             std::to_string(time) + ")"),
          param_value_(param_value),
          time_(time) {}
    double param_value() const noexcept { return param_value_; }
    double time() const noexcept { return time_; }

private:
    double param_value_;
    double time_;
};

enum class DivergencePolicy { Throw, FlagAndContinue };

/// Optional replacement for the model right-hand side (testing hook);
/// receives the per-point parameters, the initial forcing phase, time
/// and state.
using RhsOverride = std::function<ode::Vec<3>(
    const HarvesterParams&, double phase0, double t, const ode::Vec<3>&)>;

namespace detail {

inline HarvesterParams with_value(HarvesterParams p, SweepParameter which,
                                  double v) {
    switch (which) {
        case SweepParameter::Amplitude: p.f = v; break;
        case SweepParameter::Frequency: p.omega = v; break;
        case SweepParameter::Angle: p.phi = v; break;
    }
    return p;
}

}  // namespace detail

/// Runs the sweep: at each parameter value, integrate n_cycles forcing
/// periods from the carried state (ic0 at the first point), keep the
/// steady voltage tail, and carry the final state to the next point.
/// Each point spans an integer number of its own forcing cycles, so the
/// accumulated forcing phase advances by an exact multiple of 2*pi and
/// the carried phase offset is unchanged.
inline BifurcationDiagram sweep(const HarvesterParams& base,
                                const SweepSpec& spec,
                                const InitialCondition& ic0,
                                const IntegratorConfig& cfg = {},
                                DivergencePolicy policy = DivergencePolicy::Throw,
                                const RhsOverride& rhs_override = {}) {
    spec.validate();
    BifurcationDiagram diagram;
    diagram.values = spec.values();
    diagram.direction = spec.direction;
    diagram.parameter = spec.parameter;
    diagram.base = base;
    diagram.samples.reserve(diagram.values.size());
    diagram.diverged.reserve(diagram.values.size());

    State carried = ic0.state0;
    const double phase0 = InitialCondition::normalize_phase(ic0.phase0);

    for (double value : diagram.values) {
        const HarvesterParams p =
            detail::with_value(base, spec.parameter, value);
        if (!(p.omega > 0))
            throw std::invalid_argument("sweep: omega must stay positive");
        const double period = p.forcing_period();
        const auto n = static_cast<std::size_t>(spec.n_cycles);

        PoincareSeries series;
        series.period = period;
        series.times.reserve(n);
        series.samples.reserve(n);
        std::size_t k = 1;
        const auto sampler = [&](const ode::DenseStep<3>& s) {
            while (k <= n) {
                const double tk = static_cast<double>(k) * period;
                if (tk > s.t1) break;
                series.times.push_back(tk);
                series.samples.push_back(detail::to_state(s.eval(tk)));
                ++k;
            }
        };

        try {
            const double t_end = static_cast<double>(n) * period;
            const auto ctrl = cfg.step_control(period);
            ode::Vec<3> y_final;
            if (rhs_override) {
                y_final = ode::integrate_dopri5<3>(
                    [&](double t, const ode::Vec<3>& y) {
                        return rhs_override(p, phase0, t, y);
                    },
                    detail::to_vec(carried), 0.0, t_end, ctrl, sampler);
            } else {
                y_final = ode::integrate_dopri5<3>(detail::model_rhs(p, phase0),
                                                   detail::to_vec(carried), 0.0,
                                                   t_end, ctrl, sampler);
            }
            diagram.samples.push_back(
                steady_tail(series, spec.tail_fraction).voltages());
            diagram.diverged.push_back(false);
            carried = detail::to_state(y_final);
        } catch (const DivergenceError& e) {
            if (policy == DivergencePolicy::Throw)
                throw SweepDivergence(value, e.time());
            diagram.samples.emplace_back();
            diagram.diverged.push_back(true);
            // continue from the last state that did not blow up
        }
    }
    return diagram;
}

/// Greedy 1-D clustering with radius tol over the sorted samples;
/// the cluster count if it does not exceed max_period, otherwise empty
/// (not periodic at this resolution).
inline std::optional<int> cluster_periodicity(std::vector<double> samples,
                                              double tol = 1e-3,
                                              int max_period = 16) {
    if (samples.empty())
        throw std::invalid_argument("cluster_periodicity: empty sample set");
    std::sort(samples.begin(), samples.end());
    int clusters = 1;
    double anchor = samples.front();
    for (double v : samples) {
        if (v - anchor > tol) {
            ++clusters;
            anchor = v;
            if (clusters > max_period) return std::nullopt;
        }
    }
    return clusters;
}

}  // namespace harvester
