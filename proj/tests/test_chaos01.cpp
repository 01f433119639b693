#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "harvester/chaos01.hpp"
#include "oracles.hpp"

using namespace harvester;

namespace {

Chaos01Config seeded(std::uint64_t seed = 20240517) {
    Chaos01Config cfg;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> cosine_series(std::size_t n, double w = 0.3) {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j)
        s[j] = std::cos(w * static_cast<double>(j + 1));
    return s;
}

}  // namespace

TEST_CASE("translation coordinates", "[chaos01]") {
    SECTION("all-zero series") {
        const std::vector<double> zeros(16, 0.0);
        const auto [p, q] = translation_coords(zeros, 1.234);
        for (double v : p) CHECK(v == 0.0);
        for (double v : q) CHECK(v == 0.0);
    }
    SECTION("ones at c = pi/2") {
        const std::vector<double> ones{1.0, 1.0, 1.0};
        const auto [p, q] = translation_coords(ones, std::numbers::pi / 2);
        REQUIRE(p.size() == 3);
        CHECK(p[0] == Catch::Approx(0.0).margin(1e-15));
        CHECK(p[1] == Catch::Approx(-1.0).margin(1e-15));
        CHECK(p[2] == Catch::Approx(-1.0).margin(1e-15));
        CHECK(q[0] == Catch::Approx(1.0).margin(1e-15));
        CHECK(q[1] == Catch::Approx(1.0).margin(1e-15));
        CHECK(q[2] == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("single-term prefix sums are cos c and sin c") {
        const std::vector<double> one{1.0, 0.0};
        const double c = 0.77;
        const auto [p, q] = translation_coords(one, c);
        CHECK(p[0] == std::cos(c));
        CHECK(q[0] == std::sin(c));
    }
}

TEST_CASE("mean square displacement", "[chaos01]") {
    SECTION("constant coordinates give zero displacement") {
        const std::vector<double> p(100, 0.37), q(100, -1.2);
        for (double m : mean_square_displacement(p, q, 0.1))
            CHECK(m == 0.0);
    }
    SECTION("pure drift gives M_n = n^2 exactly") {
        std::vector<double> p(100), q(100, 0.0);
        for (std::size_t j = 0; j < p.size(); ++j)
            p[j] = static_cast<double>(j + 1);
        const auto m = mean_square_displacement(p, q, 0.1);
        REQUIRE(m.size() == 10);
        for (std::size_t n = 1; n <= m.size(); ++n)
            CHECK(m[n - 1] == static_cast<double>(n * n));
    }
    SECTION("bounded series stay bounded as N grows") {
        const auto bound_of = [](std::size_t n) {
            const auto series = cosine_series(n);
            const auto [p, q] = translation_coords(series, 1.1);
            double mx = 0.0;
            for (double m : mean_square_displacement(p, q, 0.1))
                mx = std::max(mx, m);
            return mx;
        };
        const double m1 = bound_of(2000);
        const double m2 = bound_of(4000);
        CHECK(m2 < 4.0 * m1 + 10.0);
    }
    SECTION("too-short series is rejected") {
        const std::vector<double> p(10, 0.0), q(10, 0.0);
        CHECK_THROWS_AS(mean_square_displacement(p, q, 0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("K statistic", "[chaos01]") {
    std::vector<double> lags(10);
    for (std::size_t i = 0; i < lags.size(); ++i)
        lags[i] = static_cast<double>(i + 1);
    SECTION("perfect linear growth") {
        CHECK(k_statistic(lags, lags) == Catch::Approx(1.0).margin(1e-14));
    }
    SECTION("flat displacement uses the zero convention") {
        const std::vector<double> flat(10, 3.3);
        CHECK(k_statistic(flat, lags) == 0.0);
    }
    SECTION("quadratic growth against the reference correlation") {
        std::vector<double> m(10);
        for (std::size_t i = 0; i < m.size(); ++i)
            m[i] = lags[i] * lags[i];
        const double k = k_statistic(m, lags);
        CHECK(k == Catch::Approx(0.9745586289152092).margin(1e-12));
        CHECK(k == Catch::Approx(oracles::pearson(lags, m)).margin(1e-12));
    }
}

TEST_CASE("classification of canonical series", "[chaos01]") {
    SECTION("cosine series is regular") {
        const auto r = classify(cosine_series(5000), seeded());
        CHECK(r.k_median < 0.2);
        CHECK(r.cls == DynClass::Regular);
    }
    SECTION("logistic map at r = 4 is chaotic") {
        const auto r = classify(oracles::logistic_series(5000, 0.3), seeded());
        CHECK(r.k_median > 0.8);
        CHECK(r.cls == DynClass::Chaotic);
    }
    SECTION("short series is an error, not a guess") {
        CHECK_THROWS_AS(classify(cosine_series(99), seeded()),
                        std::invalid_argument);
    }
    SECTION("non-finite observations are rejected") {
        auto s = cosine_series(500);
        s[200] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(classify(s, seeded()), std::invalid_argument);
    }
}

TEST_CASE("class is invariant under observable scaling", "[chaos01]") {
    const auto base = cosine_series(2000);
    const auto chaotic = oracles::logistic_series(2000, 0.3);
    for (double a : {1e-3, 1e3}) {
        for (const auto* src : {&base, &chaotic}) {
            std::vector<double> scaled(*src);
            for (double& v : scaled) v *= a;
            const auto r0 = classify(*src, seeded());
            const auto r1 = classify(scaled, seeded());
            CHECK(r0.cls == r1.cls);
            CHECK(r0.k_median == Catch::Approx(r1.k_median).margin(1e-9));
        }
    }
    SECTION("M scales by a^2") {
        const double a = 1e3;
        std::vector<double> scaled(base);
        for (double& v : scaled) v *= a;
        const auto [p0, q0] = translation_coords(base, 0.9);
        const auto [p1, q1] = translation_coords(scaled, 0.9);
        const auto m0 = mean_square_displacement(p0, q0, 0.1);
        const auto m1 = mean_square_displacement(p1, q1, 0.1);
        for (std::size_t i = 0; i < m0.size(); ++i)
            CHECK(m1[i] == Catch::Approx(a * a * m0[i]).epsilon(1e-12));
    }
}

TEST_CASE("median is stable under duplication of the c set", "[chaos01]") {
    const auto series = oracles::logistic_series(1000, 0.3);
    const auto r = classify(series, seeded());
    std::vector<double> doubled(r.k_per_c);
    doubled.insert(doubled.end(), r.k_per_c.begin(), r.k_per_c.end());
    std::sort(doubled.begin(), doubled.end());
    const double median_doubled =
        0.5 * (doubled[doubled.size() / 2 - 1] + doubled[doubled.size() / 2]);
    CHECK(median_doubled == Catch::Approx(r.k_median).margin(1e-15));
}

TEST_CASE("fixed seed reproduces k_per_c exactly", "[chaos01]") {
    const auto series = oracles::logistic_series(1500, 0.3);
    const auto a = classify(series, seeded(42));
    const auto b = classify(series, seeded(42));
    REQUIRE(a.k_per_c.size() == b.k_per_c.size());
    for (std::size_t i = 0; i < a.k_per_c.size(); ++i)
        CHECK(a.k_per_c[i] == b.k_per_c[i]);
    CHECK(a.k_median == b.k_median);

    const auto c = classify(series, seeded(43));
    bool any_different = false;
    for (std::size_t i = 0; i < a.k_per_c.size(); ++i)
        any_different = any_different || a.k_per_c[i] != c.k_per_c[i];
    CHECK(any_different);
}

TEST_CASE("restricted c support stays inside its interval", "[chaos01]") {
    const auto [lo, hi] = restricted_c_support();
    CHECK(lo == Catch::Approx(std::numbers::pi / 5));
    CHECK(hi == Catch::Approx(4 * std::numbers::pi / 5));
    Chaos01Config cfg = seeded();
    cfg.c_lo = lo;
    cfg.c_hi = hi;
    const auto r = classify(cosine_series(2000), cfg);
    CHECK(r.cls == DynClass::Regular);
}
