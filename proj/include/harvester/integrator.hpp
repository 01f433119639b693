// Time integration of the harvester ODEs with stroboscopic (Poincare)
// sampling at exact forcing-period multiples via dense output, and
// steady-state tail extraction.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "harvester/model.hpp"
#include "harvester/ode.hpp"

namespace harvester {

using ode::DivergenceError;
using ode::StepSizeUnderflow;

struct IntegratorConfig {
    double rtol = 1e-6;
    double atol = 1e-9;
    double max_step = 0.0;  // 0 = one twentieth of the forcing period
    double divergence_bound = 1e6;

    ode::StepControl step_control(double forcing_period) const {
        ode::StepControl c;
        if (!(rtol > 0) || !(atol > 0) || max_step < 0)
            throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
        c.rtol = rtol;
        c.atol = atol;
        c.max_step = max_step > 0 ? max_step : forcing_period / 20.0;
        c.divergence_bound = divergence_bound;
        return c;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

/// Stroboscopic samples of one trajectory, one per forcing cycle,
/// taken at t = k * period for k = 1..cycles.
struct PoincareSeries {
    double period = 0.0;
    std::vector<double> times;
    std::vector<State> samples;

    std::size_t cycles() const { return samples.size(); }

    std::vector<double> voltages() const {
        std::vector<double> out(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].v;
        return out;
    }
};

namespace detail {

inline ode::Vec<3> to_vec(const State& s) { return {s.x, s.xdot, s.v}; }
inline State to_state(const ode::Vec<3>& y) { return {y[0], y[1], y[2]}; }

inline auto model_rhs(const HarvesterParams& p, double phase0) {
    return [p, phase0](double t, const ode::Vec<3>& y) -> ode::Vec<3> {
        const State d = rhs(p, t, to_state(y), phase0);
        return {d.x, d.xdot, d.v};
    };
}

}  // namespace detail

/// Adaptive 5(4) integration over [0, t_end]; records the state after
/// every accepted step (first entry is the initial condition, last is
/// the solution at exactly t_end).
inline Trajectory integrate(const HarvesterParams& p, const InitialCondition& ic,
                            double t_end, const IntegratorConfig& cfg = {}) {
    if (!(p.omega > 0)) throw std::invalid_argument("omega must be positive");
    const double phase0 = InitialCondition::normalize_phase(ic.phase0);
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(ic.state0);
    ode::integrate_dopri5<3>(
        detail::model_rhs(p, phase0), detail::to_vec(ic.state0), 0.0, t_end,
        cfg.step_control(p.forcing_period()), [&](const ode::DenseStep<3>& s) {
            traj.times.push_back(s.t1);
            traj.states.push_back(detail::to_state(s.y1));
        });
    return traj;
}

/// Integrates n_cycles forcing periods and returns the state at
/// t = k * period, k = 1..n_cycles, each sample interpolated from the
/// dense output of the step that covers it.
inline PoincareSeries poincare(const HarvesterParams& p,
                               const InitialCondition& ic,
                               std::size_t n_cycles,
                               const IntegratorConfig& cfg = {}) {
    if (!(p.omega > 0)) throw std::invalid_argument("omega must be positive");
    if (n_cycles < 1) throw std::invalid_argument("poincare: n_cycles >= 1");
    const double phase0 = InitialCondition::normalize_phase(ic.phase0);
    const double period = p.forcing_period();
    const double t_end = static_cast<double>(n_cycles) * period;

    PoincareSeries series;
    series.period = period;
    series.times.reserve(n_cycles);
    series.samples.reserve(n_cycles);

    std::size_t k = 1;
    ode::integrate_dopri5<3>(
        detail::model_rhs(p, phase0), detail::to_vec(ic.state0), 0.0, t_end,
        cfg.step_control(period), [&](const ode::DenseStep<3>& s) {
            while (k <= n_cycles) {
                const double tk = static_cast<double>(k) * period;
                if (tk > s.t1) break;
                series.times.push_back(tk);
                series.samples.push_back(detail::to_state(s.eval(tk)));
                ++k;
            }
        });
    return series;
}

/// Final ceil(fraction * cycles) samples of a series.
inline PoincareSeries steady_tail(const PoincareSeries& s, double fraction = 0.1) {
    if (s.samples.empty()) throw std::invalid_argument("steady_tail: empty series");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("steady_tail: fraction must be in (0, 1]");
    const auto n = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(s.samples.size())));
    PoincareSeries tail;
    tail.period = s.period;
    tail.times.assign(s.times.end() - n, s.times.end());
    tail.samples.assign(s.samples.end() - n, s.samples.end());
    return tail;
}

/// Fixed-step classical RK4 cross-check mode.
inline Trajectory integrate_rk4(const HarvesterParams& p,
                                const InitialCondition& ic, double t_end,
                                std::uint64_t steps_per_period = 512,
                                double divergence_bound = 1e6) {
    if (!(p.omega > 0)) throw std::invalid_argument("omega must be positive");
    const double phase0 = InitialCondition::normalize_phase(ic.phase0);
    const auto n_steps = static_cast<std::uint64_t>(
        std::ceil(t_end / p.forcing_period() * static_cast<double>(steps_per_period)));
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(ic.state0);
    ode::integrate_rk4<3>(detail::model_rhs(p, phase0), detail::to_vec(ic.state0),
                          0.0, t_end, n_steps, divergence_bound,
                          [&](double t, const ode::Vec<3>& y) {
                              traj.times.push_back(t);
                              traj.states.push_back(detail::to_state(y));
                          });
    return traj;
}

}  // namespace harvester
