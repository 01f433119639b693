// Generic explicit Runge-Kutta integration: adaptive Dormand-Prince 5(4)
// with dense output, plus a classical fixed-step RK4 for cross-checks.
//
// The steppers are templated on the state dimension and on any callable
// right-hand side f(t, y) -> dy/dt, so test systems with known analytic
// solutions can be driven through the exact same code path as the
// production model.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace harvester::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Integration failed because the state left the divergence bound.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(double t)
        : std::runtime_error("trajectory diverged at t = " + std::to_string(t)),
          time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Step size collapsed below the representable resolution of the
/// current time; the problem is effectively stiff for this scheme.
class StepSizeUnderflow : public std::runtime_error {
public:
    explicit StepSizeUnderflow(double t)
        : std::runtime_error("step size underflow (stiffness) at t = " +
                             std::to_string(t)),
          time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

struct StepControl {
    double rtol = 1e-6;
    double atol = 1e-9;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0 = choose automatically
    double divergence_bound = 1e6;
    std::uint64_t max_steps = 500'000'000;
};

/// One accepted step together with its continuous extension.
/// eval(t) is the standard quartic interpolant of the 5(4) pair,
/// valid for t in [t0, t1]; eval(t0) == y0 and eval(t1) == y1 exactly.
template <std::size_t N>
struct DenseStep {
    double t0, t1;
    Vec<N> y0, y1;
    std::array<Vec<N>, 5> rcont;

    Vec<N> eval(double t) const {
        const double h = t1 - t0;
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        Vec<N> out;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = rcont[0][i] +
                     theta * (rcont[1][i] +
                              theta1 * (rcont[2][i] +
                                        theta * (rcont[3][i] +
                                                 theta1 * rcont[4][i])));
        return out;
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113,
                        a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                        c5 = 8.0 / 9;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

inline constexpr double safety = 0.9;
inline constexpr double beta = 0.04;   // Lund stabilization
inline constexpr double fac_min = 0.2;
inline constexpr double fac_max = 10.0;

template <std::size_t N>
bool out_of_bounds(const Vec<N>& y, double bound) {
    for (double c : y)
        if (!std::isfinite(c) || std::abs(c) > bound) return true;
    return false;
}

// Hairer's starting-step heuristic (deterministic).
template <std::size_t N, class Rhs>
double initial_step_guess(Rhs&& rhs, double t0, const Vec<N>& y0,
                          const Vec<N>& k1, const StepControl& c) {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sk = c.atol + c.rtol * std::abs(y0[i]);
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6
                                              : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, c.max_step);

    Vec<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h * k1[i];
    const Vec<N> k2 = rhs(t0 + h, y1);

    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sk = c.atol + c.rtol * std::abs(y0[i]);
        der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;

    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = (der12 <= 1e-15)
                          ? std::max(1e-6, h * 1e-3)
                          : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, c.max_step});
}

}  // namespace detail

/// Integrate y' = rhs(t, y) from t0 to t1 (t1 > t0) with the adaptive
/// 5(4) pair. on_step is invoked once per accepted step with the
/// DenseStep covering it. Returns the state at exactly t1 (the final
/// step is clamped onto the endpoint).
template <std::size_t N, class Rhs, class StepCb>
Vec<N> integrate_dopri5(Rhs&& rhs, Vec<N> y, double t0, double t1,
                        const StepControl& ctrl, StepCb&& on_step) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
    if (detail::out_of_bounds<N>(y, ctrl.divergence_bound))
        throw DivergenceError(t0);

    double t = t0;
    Vec<N> k1 = rhs(t, y);
    double h = ctrl.initial_step > 0
                   ? std::min(ctrl.initial_step, ctrl.max_step)
                   : detail::initial_step_guess<N>(rhs, t, y, k1, ctrl);
    double err_old = 1e-4;
    std::uint64_t n_steps = 0;

    while (t < t1) {
        if (++n_steps > ctrl.max_steps)
            throw std::runtime_error("integrate: step budget exhausted");
        h = std::min(h, ctrl.max_step);
        bool last = false;
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h <= std::abs(t) * std::numeric_limits<double>::epsilon() * 4)
            throw StepSizeUnderflow(t);

        using detail::a21, detail::a31, detail::a32, detail::a41, detail::a42,
            detail::a43, detail::a51, detail::a52, detail::a53, detail::a54,
            detail::a61, detail::a62, detail::a63, detail::a64, detail::a65,
            detail::a71, detail::a73, detail::a74, detail::a75, detail::a76;

        Vec<N> w, k2, k3, k4, k5, k6, k7, ynew;
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t + detail::c2 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + detail::c3 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + detail::c4 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                               a54 * k4[i]);
        k5 = rhs(t + detail::c5 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                               a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t + h, w);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                  a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (detail::e1 * k1[i] + detail::e3 * k3[i] +
                     detail::e4 * k4[i] + detail::e5 * k5[i] +
                     detail::e6 * k6[i] + detail::e7 * k7[i]);
            const double sk =
                ctrl.atol +
                ctrl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sk) * (ei / sk);
        }
        err = std::sqrt(err / N);

        const double fac11 = std::pow(err, 0.2 - detail::beta * 0.75);
        if (err <= 1.0) {
            // accepted
            DenseStep<N> step;
            step.t0 = t;
            step.t1 = t + h;
            step.y0 = y;
            step.y1 = ynew;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                step.rcont[0][i] = y[i];
                step.rcont[1][i] = ydiff;
                step.rcont[2][i] = bspl;
                step.rcont[3][i] = ydiff - h * k7[i] - bspl;
                step.rcont[4][i] =
                    h * (detail::d1 * k1[i] + detail::d3 * k3[i] +
                         detail::d4 * k4[i] + detail::d5 * k5[i] +
                         detail::d6 * k6[i] + detail::d7 * k7[i]);
            }

            t = last ? t1 : t + h;
            step.t1 = t;
            y = ynew;
            k1 = k7;  // FSAL

            if (detail::out_of_bounds<N>(y, ctrl.divergence_bound))
                throw DivergenceError(t);
            on_step(step);

            double fac = fac11 / std::pow(err_old, detail::beta);
            fac = std::clamp(fac / detail::safety, 1.0 / detail::fac_max,
                             1.0 / detail::fac_min);
            h = h / fac;
            err_old = std::max(err, 1e-4);
        } else {
            h = h / std::min(1.0 / detail::fac_min, fac11 / detail::safety);
        }
    }
    return y;
}

template <std::size_t N, class Rhs>
Vec<N> integrate_dopri5(Rhs&& rhs, const Vec<N>& y0, double t0, double t1,
                        const StepControl& ctrl) {
    return integrate_dopri5<N>(rhs, y0, t0, t1, ctrl,
                               [](const DenseStep<N>&) {});
}

/// Classical fixed-step RK4 over n_steps equal steps; on_step(t, y) is
/// called after every step. Divergence is checked with the same bound
/// as the adaptive path.
template <std::size_t N, class Rhs, class StepCb>
Vec<N> integrate_rk4(Rhs&& rhs, Vec<N> y, double t0, double t1,
                     std::uint64_t n_steps, double divergence_bound,
                     StepCb&& on_step) {
    if (!(t1 > t0) || n_steps == 0)
        throw std::invalid_argument("integrate_rk4: bad time span");
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        const double t = t0 + h * static_cast<double>(s);
        Vec<N> w;
        const Vec<N> k1 = rhs(t, y);
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + 0.5 * h * k1[i];
        const Vec<N> k2 = rhs(t + 0.5 * h, w);
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + 0.5 * h * k2[i];
        const Vec<N> k3 = rhs(t + 0.5 * h, w);
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * k3[i];
        const Vec<N> k4 = rhs(t + h, w);
        for (std::size_t i = 0; i < N; ++i)
            y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        const double tn = (s + 1 == n_steps) ? t1 : t + h;
        if (detail::out_of_bounds<N>(y, divergence_bound))
            throw DivergenceError(tn);
        on_step(tn, y);
    }
    return y;
}

template <std::size_t N, class Rhs>
Vec<N> integrate_rk4(Rhs&& rhs, const Vec<N>& y0, double t0, double t1,
                     std::uint64_t n_steps, double divergence_bound = 1e6) {
    return integrate_rk4<N>(rhs, y0, t0, t1, n_steps, divergence_bound,
                            [](double, const Vec<N>&) {});
}

}  // namespace harvester::ode
