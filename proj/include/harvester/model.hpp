// Governing equations of the bistable piezo-magneto-elastic harvester:
// right-hand side, restoring force, potential energy, equilibria, and
// the asymmetry-compensating sloping angle.
//
// Everything is dimensionless. The sloping angle is held in radians
// inside this library; conversion to and from degrees happens only at
// I/O boundaries (CLI flags, config files, CSV output).

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace harvester {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct HarvesterParams {
    double xi = 0.0;      // damping ratio (>= 0)
    double chi = 0.0;     // piezoelectric coupling, mechanical equation
    double lambda = 0.0;  // reciprocal time constant (> 0 when voltage active)
    double kappa = 0.0;   // piezoelectric coupling, electrical equation
    double f = 0.0;       // excitation amplitude (>= 0)
    double omega = 1.0;   // excitation frequency (> 0)
    double delta = 0.0;   // quadratic-nonlinearity coefficient
    double p = 0.0;       // equivalent dimensionless gravity (>= 0)
    double phi = 0.0;     // sloping angle, radians

    double forcing_period() const { return two_pi / omega; }
};

struct State {
    double x = 0.0;     // modal displacement
    double xdot = 0.0;  // modal velocity
    double v = 0.0;     // resistor voltage
};

struct InitialCondition {
    State state0{};
    double phase0 = 0.0;  // initial forcing phase, radians, in [0, 2*pi)

    static double normalize_phase(double ph) {
        ph = std::fmod(ph, two_pi);
        return ph < 0 ? ph + two_pi : ph;
    }
};

/// Fixed parameters of the reference simulation campaign; excitation
/// amplitude, frequency and sloping angle are scenario-specific and
/// left at their defaults.
inline HarvesterParams paper_s3_params() {
    HarvesterParams p;
    p.xi = 0.01;
    p.chi = 0.05;
    p.lambda = 0.05;
    p.kappa = 0.5;
    p.p = 0.59;
    p.delta = 0.15;
    return p;
}

inline InitialCondition paper_s3_ic() { return {{1.0, 0.0, 0.0}, 0.0}; }

/// Time derivative of (x, xdot, v). The forcing term is
/// f*cos(omega*t + phase0); the symmetric model is the special case
/// delta = 0, phi = 0.
inline State rhs(const HarvesterParams& p, double t, const State& s,
                 double phase0 = 0.0) {
    State d;
    d.x = s.xdot;
    d.xdot = -2.0 * p.xi * s.xdot +
             0.5 * s.x * (1.0 + 2.0 * p.delta * s.x - s.x * s.x) +
             p.chi * s.v + p.f * std::cos(p.omega * t + phase0) +
             p.p * std::sin(p.phi);
    d.v = -p.lambda * s.v - p.kappa * s.xdot;
    return d;
}

/// F_r(x) = -x(1 + 2*delta*x - x^2)/2 - p*sin(phi); the equation of
/// motion reads xddot + 2*xi*xdot + F_r(x) = chi*v + f*cos(...).
inline double restoring_force(const HarvesterParams& p, double x) {
    return -0.5 * x * (1.0 + 2.0 * p.delta * x - x * x) -
           p.p * std::sin(p.phi);
}

/// Antiderivative of F_r with integration constant 0, so U'(x) = F_r(x)
/// and the symmetric case is the double well with minima U(+-1) = -1/8.
inline double potential_energy(const HarvesterParams& p, double x) {
    const double x2 = x * x;
    return x2 * x2 / 8.0 - p.delta * x2 * x / 3.0 - x2 / 4.0 -
           p.p * std::sin(p.phi) * x;
}

/// Stationary points of the restoring force, i.e. the roots of
/// 3x^2 - 4*delta*x - 1 = 0; returns (x1, x2) with x1 > 0 > x2.
inline std::pair<double, double> force_extrema(const HarvesterParams& p) {
    const double root = std::sqrt(4.0 * p.delta * p.delta + 3.0);
    return {(2.0 * p.delta + root) / 3.0, (2.0 * p.delta - root) / 3.0};
}

/// Two stationary points of F_r merged (or are about to merge): the
/// parameter set sits on a saddle-node boundary and the equilibrium
/// structure is not well defined.
class DegenerateEquilibria : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double bisect_root(const HarvesterParams& p, double lo, double hi) {
    double flo = restoring_force(p, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = restoring_force(p, mid);
        if (std::abs(fm) < 1e-12 && (hi - lo) < 1e-10) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// All real roots of F_r(x) = 0 in [-5, 5], ascending (1 or 3 entries).
/// Roots are located by a dense sign-change scan and refined by
/// bisection to |F_r| < 1e-12.
inline std::vector<double> equilibria(const HarvesterParams& p) {
    constexpr double lo = -5.0, hi = 5.0;
    constexpr int n_scan = 4000;
    std::vector<double> roots;
    double xa = lo, fa = restoring_force(p, xa);
    for (int i = 1; i <= n_scan; ++i) {
        const double xb = lo + (hi - lo) * i / n_scan;
        const double fb = restoring_force(p, xb);
        if (fa == 0.0) {
            roots.push_back(xa);
        } else if ((fa > 0) != (fb > 0)) {
            roots.push_back(detail::bisect_root(p, xa, xb));
        }
        xa = xb;
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(xa);

    for (std::size_t i = 1; i < roots.size(); ++i)
        if (roots[i] - roots[i - 1] < 1e-8)
            throw DegenerateEquilibria("equilibria coincide within 1e-8");
    // A vanishing force extremum means a double root the sign scan
    // cannot see: the saddle-node boundary itself.
    const auto [x1, x2] = force_extrema(p);
    if (std::abs(restoring_force(p, x1)) < 1e-14 ||
        std::abs(restoring_force(p, x2)) < 1e-14)
        throw DegenerateEquilibria("saddle-node boundary: force extremum is a root");
    return roots;
}

/// Sloping angle that balances the restoring force over the two force
/// extrema, sin(phi) = -(8*delta^3 + 9*delta) / (27*p); radians.
inline double optimal_angle(double delta, double p) {
    const double arg = (8.0 * delta * delta * delta + 9.0 * delta) / (27.0 * p);
    if (!(std::abs(arg) <= 1.0))
        throw std::domain_error(
            "optimal_angle: asymmetry too strong to compensate");
    return -std::asin(arg);
}

}  // namespace harvester
