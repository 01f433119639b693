#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "harvester/model.hpp"
#include "oracles.hpp"

using namespace harvester;

namespace {

HarvesterParams symmetric_free() {
    HarvesterParams p;  // xi = chi = lambda = kappa = f = 0
    return p;
}

}  // namespace

TEST_CASE("rhs: double-well fixed point", "[model]") {
    const State d = rhs(symmetric_free(), 0.0, {1.0, 0.0, 0.0});
    CHECK(d.x == 0.0);
    CHECK(d.xdot == 0.0);
    CHECK(d.v == 0.0);
}

TEST_CASE("rhs: only forcing acts at the origin", "[model]") {
    HarvesterParams p = symmetric_free();
    p.f = 0.1;
    const State d = rhs(p, 0.0, {0.0, 0.0, 0.0});
    CHECK(d.x == 0.0);
    CHECK(d.xdot == Catch::Approx(0.1).margin(1e-15));
    CHECK(d.v == 0.0);
}

TEST_CASE("rhs: gravity term of the tilted model", "[model]") {
    HarvesterParams p = symmetric_free();
    p.delta = 0.15;
    p.p = 0.59;
    p.phi = deg_to_rad(-4.95);
    const State d = rhs(p, 0.0, {0.0, 0.0, 0.0});
    // 0.59 * sin(-4.95 deg), evaluated independently
    CHECK(d.xdot == Catch::Approx(-0.05090895582077479).margin(1e-12));
    CHECK(std::abs(d.xdot - (-0.050915)) < 1e-5);
    CHECK(d.x == 0.0);
    CHECK(d.v == 0.0);
}

TEST_CASE("restoring force: symmetric zeros", "[model]") {
    const HarvesterParams p = symmetric_free();
    CHECK(restoring_force(p, 0.0) == 0.0);
    CHECK(restoring_force(p, 1.0) == 0.0);
    CHECK(restoring_force(p, -1.0) == 0.0);
}

TEST_CASE("restoring force at the origin under tilt", "[model]") {
    HarvesterParams p = symmetric_free();
    p.delta = 0.15;
    p.p = 0.59;
    p.phi = deg_to_rad(-4.95);
    CHECK(restoring_force(p, 0.0) ==
          Catch::Approx(0.05090895582077479).margin(1e-12));
}

TEST_CASE("potential: symmetric well depths", "[model]") {
    const HarvesterParams p = symmetric_free();
    CHECK(potential_energy(p, 0.0) == 0.0);
    CHECK(potential_energy(p, 1.0) == Catch::Approx(-0.125).margin(1e-15));
    CHECK(potential_energy(p, -1.0) == Catch::Approx(-0.125).margin(1e-15));
}

TEST_CASE("potential: the positive side is deeper under strong tilt", "[model]") {
    HarvesterParams p = symmetric_free();
    p.delta = 0.15;
    p.p = 0.59;
    p.phi = deg_to_rad(35.0);
    // Lowest value over each half-axis; with this tilt the left well has
    // in fact merged away, which only strengthens the ordering.
    const auto [xr, ur] = oracles::minimize_potential(p, 0.0, 3.0);
    double u_left = potential_energy(p, -3.0);
    for (double x = -3.0; x <= 0.0; x += 1e-3)
        u_left = std::min(u_left, potential_energy(p, x));
    CHECK(ur < u_left);
    CHECK(xr > 0.0);
}

TEST_CASE("potential: compensated wells nearly equal depth", "[model]") {
    HarvesterParams p = symmetric_free();
    p.delta = 0.15;
    p.p = 0.59;
    p.phi = optimal_angle(p.delta, p.p);
    const auto eqs = equilibria(p);
    REQUIRE(eqs.size() == 3);
    const auto [xl, ul] = oracles::minimize_potential(p, -3.0, eqs[1]);
    const auto [xr, ur] = oracles::minimize_potential(p, eqs[1], 3.0);
    // The force-balance condition equalizes force sums, not depths, so a
    // small residual remains.
    CHECK(std::abs(ur - ul) < 2e-4);
    CHECK(std::abs(ur - ul) > 0.0);
}

TEST_CASE("force extrema", "[model]") {
    SECTION("symmetric") {
        const auto [x1, x2] = force_extrema(symmetric_free());
        CHECK(x1 == Catch::Approx(std::sqrt(3.0) / 3.0).margin(1e-15));
        CHECK(x2 == Catch::Approx(-std::sqrt(3.0) / 3.0).margin(1e-15));
    }
    SECTION("delta = 0.15") {
        HarvesterParams p = symmetric_free();
        p.delta = 0.15;
        const auto [x1, x2] = force_extrema(p);
        // quadratic formula on 3x^2 - 4*delta*x - 1
        const double root = std::sqrt(0.6 * 0.6 + 12.0) / 6.0;
        CHECK(x1 == Catch::Approx(0.1 + root).margin(1e-14));
        CHECK(x2 == Catch::Approx(0.1 - root).margin(1e-14));
        CHECK(x1 == Catch::Approx(0.6859465).margin(1e-6));
    }
    SECTION("Vieta: x1 * x2 = -1/3 for any delta") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 200; ++i) {
            HarvesterParams p = symmetric_free();
            p.delta = oracles::uniform(rng, -0.8, 0.8);
            const auto [x1, x2] = force_extrema(p);
            CHECK(std::abs(x1 * x2 + 1.0 / 3.0) < 1e-15);
            CHECK(x1 > 0.0);
            CHECK(x2 < 0.0);
        }
    }
}

TEST_CASE("equilibria: symmetric and tilted", "[model]") {
    SECTION("symmetric") {
        const auto roots = equilibria(symmetric_free());
        REQUIRE(roots.size() == 3);
        CHECK(roots[0] == Catch::Approx(-1.0).margin(1e-10));
        CHECK(roots[1] == Catch::Approx(0.0).margin(1e-10));
        CHECK(roots[2] == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("delta only") {
        HarvesterParams p = symmetric_free();
        p.delta = 0.15;
        const auto roots = equilibria(p);
        REQUIRE(roots.size() == 3);
        // closed form: 0 and delta +- sqrt(delta^2 + 1)
        const double r = std::sqrt(0.15 * 0.15 + 1.0);
        CHECK(roots[0] == Catch::Approx(0.15 - r).margin(1e-10));
        CHECK(roots[1] == Catch::Approx(0.0).margin(1e-10));
        CHECK(roots[2] == Catch::Approx(0.15 + r).margin(1e-10));
    }
    SECTION("optimal tilt") {
        HarvesterParams p = symmetric_free();
        p.delta = 0.15;
        p.p = 0.59;
        p.phi = deg_to_rad(-4.95);
        const auto roots = equilibria(p);
        REQUIRE(roots.size() == 3);
        CHECK(roots[0] == Catch::Approx(-0.9148007).margin(1e-4));
        CHECK(roots[1] == Catch::Approx(0.0998232).margin(1e-4));
        CHECK(roots[2] == Catch::Approx(1.1149775).margin(1e-4));
        // cross-check against a plain dense sign-change scan
        const auto scanned = oracles::scan_roots(p, -5.0, 5.0, 200000);
        REQUIRE(scanned.size() == roots.size());
        for (std::size_t i = 0; i < roots.size(); ++i)
            CHECK(roots[i] == Catch::Approx(scanned[i]).margin(1e-4));
    }
    SECTION("strong tilt is monostable") {
        HarvesterParams p = symmetric_free();
        p.delta = 0.15;
        p.p = 0.59;
        p.phi = deg_to_rad(35.0);
        const auto roots = equilibria(p);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0] > 1.0);
    }
    SECTION("roots bracket sign changes, odd cardinality") {
        std::mt19937_64 rng(23);
        for (int i = 0; i < 100; ++i) {
            HarvesterParams p = symmetric_free();
            p.delta = oracles::uniform(rng, 0.0, 0.4);
            p.p = 0.59;
            p.phi = oracles::uniform(rng, deg_to_rad(-30), deg_to_rad(30));
            std::vector<double> roots;
            try {
                roots = equilibria(p);
            } catch (const DegenerateEquilibria&) {
                continue;  // saddle-node boundary; nothing to check
            }
            CHECK(roots.size() % 2 == 1);
            for (double r : roots) {
                const double before = restoring_force(p, r - 1e-6);
                const double after = restoring_force(p, r + 1e-6);
                CHECK((before > 0) != (after > 0));
            }
        }
    }
    SECTION("saddle-node boundary reports degeneracy") {
        HarvesterParams p = symmetric_free();
        // tilt tuned so the force maximum itself is the root
        const auto [x1, x2] = force_extrema(p);
        const double f_at_max = restoring_force(p, x2);
        p.p = 0.59;
        p.phi = std::asin(f_at_max / p.p);
        CHECK_THROWS_AS(equilibria(p), DegenerateEquilibria);
    }
}

TEST_CASE("optimal angle", "[model]") {
    SECTION("reference value") {
        const double deg = rad_to_deg(optimal_angle(0.15, 0.59));
        CHECK(std::abs(deg - (-4.95)) < 0.01);
    }
    SECTION("no asymmetry, no tilt") {
        CHECK(optimal_angle(0.0, 0.59) == 0.0);
    }
    SECTION("delta = 0.30 against the bisection oracle") {
        const double angle = optimal_angle(0.30, 0.59);
        CHECK(angle == Catch::Approx(oracles::bisect_optimal_angle(0.30, 0.59))
                           .margin(1e-10));
        CHECK(std::abs(rad_to_deg(angle) - (-10.55)) < 0.02);
    }
    SECTION("over-strong asymmetry is rejected") {
        CHECK_THROWS_AS(optimal_angle(0.5, 0.1), std::domain_error);
    }
    SECTION("force balance at the compensating angle") {
        std::mt19937_64 rng(37);
        for (int i = 0; i < 100; ++i) {
            const double delta = oracles::uniform(rng, 0.0, 0.6);
            const double lo =
                (8 * delta * delta * delta + 9 * delta) / 27.0;
            const double p_grav = oracles::uniform(rng, std::max(lo, 0.05), 2.0);
            HarvesterParams params;
            params.delta = delta;
            params.p = p_grav;
            params.phi = optimal_angle(delta, p_grav);
            const auto [x1, x2] = force_extrema(params);
            CHECK(std::abs(restoring_force(params, x1) +
                           restoring_force(params, x2)) < 1e-12);
        }
    }
}

TEST_CASE("symmetric model: F_r odd and U even, exactly", "[model]") {
    const HarvesterParams p = symmetric_free();
    for (int i = 0; i < 1000; ++i) {
        const double x = -3.0 + 6.0 * i / 999.0;
        CHECK(restoring_force(p, -x) == -restoring_force(p, x));
        CHECK(potential_energy(p, -x) == potential_energy(p, x));
    }
}

TEST_CASE("U' matches F_r by central differences", "[model]") {
    HarvesterParams p = symmetric_free();
    p.delta = 0.15;
    p.p = 0.59;
    p.phi = deg_to_rad(-4.95);
    const double h = 1e-5;
    for (int i = 0; i <= 100; ++i) {
        const double x = -2.0 + 4.0 * i / 100.0;
        const double fd =
            (potential_energy(p, x + h) - potential_energy(p, x - h)) / (2 * h);
        CHECK(std::abs(fd - restoring_force(p, x)) < 1e-8);
    }
}

TEST_CASE("model reduction: delta = 0, phi = 0 is the symmetric model exactly",
          "[model]") {
    HarvesterParams p;
    p.xi = 0.01;
    p.chi = 0.05;
    p.lambda = 0.05;
    p.kappa = 0.5;
    p.f = 0.083;
    p.omega = 0.8;
    p.p = 0.59;  // idle: multiplied by sin(0)
    std::mt19937_64 rng(59);
    for (int i = 0; i < 1000; ++i) {
        const double t = oracles::uniform(rng, 0.0, 100.0);
        const State s{oracles::uniform(rng, -3, 3), oracles::uniform(rng, -3, 3),
                      oracles::uniform(rng, -3, 3)};
        const State d = rhs(p, t, s);
        // symmetric right-hand side, written out term by term
        const double xdd = -2.0 * p.xi * s.xdot + 0.5 * s.x * (1.0 - s.x * s.x) +
                           p.chi * s.v + p.f * std::cos(p.omega * t);
        const double vd = -p.lambda * s.v - p.kappa * s.xdot;
        CHECK(d.x == s.xdot);
        CHECK(d.xdot == xdd);
        CHECK(d.v == vd);
    }
}
