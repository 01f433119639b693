// The 0-1 test for chaos on scalar time series: translation coordinates
// (p_n, q_n), mean-square displacement over lags, correlation statistic
// K_c per random frequency c, and the median-based three-way verdict.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "harvester/model.hpp"  // two_pi

namespace harvester {

struct Chaos01Config {
    int n_c = 100;                  // random c draws
    double c_lo = 0.0;              // support for c
    double c_hi = two_pi;
    double cut_fraction = 0.1;      // max MSD lag as fraction of N
    std::uint64_t seed = 0;
    double k_chaotic = 0.8;
    double k_regular = 0.2;

    void validate() const {
        if (!(k_regular > 0) || !(k_regular < k_chaotic) || !(k_chaotic < 1))
            throw std::invalid_argument("chaos01: need 0 < k_regular < k_chaotic < 1");
        if (!(cut_fraction > 0) || cut_fraction > 0.5)
            throw std::invalid_argument("chaos01: cut_fraction in (0, 0.5]");
        if (n_c < 1) throw std::invalid_argument("chaos01: n_c >= 1");
        if (!(c_lo < c_hi)) throw std::invalid_argument("chaos01: empty c support");
    }
};

/// Restricted c support that avoids the resonance neighborhoods of 0
/// and pi; optional alternative to the full [0, 2*pi).
inline std::pair<double, double> restricted_c_support() {
    return {std::numbers::pi / 5.0, 4.0 * std::numbers::pi / 5.0};
}

enum class DynClass { Regular, Chaotic, Inconclusive };

inline const char* to_string(DynClass c) {
    switch (c) {
        case DynClass::Regular: return "regular";
        case DynClass::Chaotic: return "chaotic";
        case DynClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct Chaos01Result {
    double k_median = 0.0;
    std::vector<double> k_per_c;
    DynClass cls = DynClass::Inconclusive;
};

/// p_n = sum_{j<=n} x_j cos(j c), q_n = sum_{j<=n} x_j sin(j c),
/// n = 1..N, one cumulative pass.
inline std::pair<std::vector<double>, std::vector<double>>
translation_coords(std::span<const double> series, double c) {
    if (series.size() < 2)
        throw std::invalid_argument("translation_coords: need N >= 2");
    std::vector<double> p(series.size()), q(series.size());
    double sp = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < series.size(); ++j) {
        const double jc = static_cast<double>(j + 1) * c;
        sp += series[j] * std::cos(jc);
        sq += series[j] * std::sin(jc);
        p[j] = sp;
        q[j] = sq;
    }
    return {std::move(p), std::move(q)};
}

/// M_n = mean over j of the squared (p, q) increment at lag n, for
/// n = 1..floor(cut_fraction * N).
inline std::vector<double> mean_square_displacement(std::span<const double> p,
                                                    std::span<const double> q,
                                                    double cut_fraction) {
    if (p.size() != q.size())
        throw std::invalid_argument("mean_square_displacement: length mismatch");
    const auto N = p.size();
    const auto n_cut = static_cast<std::size_t>(
        std::floor(cut_fraction * static_cast<double>(N)));
    if (n_cut < 2)
        throw std::invalid_argument("mean_square_displacement: series too short");
    std::vector<double> m(n_cut);
    for (std::size_t n = 1; n <= n_cut; ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j + n < N; ++j) {
            const double dp = p[j + n] - p[j];
            const double dq = q[j + n] - q[j];
            acc += dp * dp + dq * dq;
        }
        m[n - 1] = acc / static_cast<double>(N - n);
    }
    return m;
}

/// Pearson correlation between lags and M; a perfectly flat M (zero
/// variance) is maximally regular by convention, K_c = 0.
inline double k_statistic(std::span<const double> m,
                          std::span<const double> lags) {
    if (m.size() != lags.size() || m.size() < 2)
        throw std::invalid_argument("k_statistic: need equal lengths >= 2");
    const auto n = static_cast<double>(m.size());
    double mean_l = 0.0, mean_m = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        mean_l += lags[i];
        mean_m += m[i];
    }
    mean_l /= n;
    mean_m /= n;
    double cov = 0.0, var_l = 0.0, var_m = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double dl = lags[i] - mean_l;
        const double dm = m[i] - mean_m;
        cov += dl * dm;
        var_l += dl * dl;
        var_m += dm * dm;
    }
    if (!(var_l > 0)) throw std::invalid_argument("k_statistic: constant lags");
    if (var_m == 0.0) return 0.0;
    return cov / std::sqrt(var_l * var_m);
}

namespace detail {

// Uniform double in [0, 1) built from the top 53 bits of the stream;
// avoids std::uniform_real_distribution so draws are identical on any
// standard library.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Full 0-1 test: n_c frequencies drawn up-front from the seeded
/// stream, one K_c each, median K, and the threshold verdict.
inline Chaos01Result classify(std::span<const double> series,
                              const Chaos01Config& cfg) {
    cfg.validate();
    if (series.size() < 100)
        throw std::invalid_argument("classify: series shorter than 100 samples");
    for (double x : series)
        if (!std::isfinite(x))
            throw std::invalid_argument("classify: non-finite observation");

    std::mt19937_64 rng(cfg.seed);
    std::vector<double> cs(static_cast<std::size_t>(cfg.n_c));
    for (auto& c : cs)
        c = cfg.c_lo + (cfg.c_hi - cfg.c_lo) * detail::uniform01(rng);

    const auto n_cut = static_cast<std::size_t>(
        std::floor(cfg.cut_fraction * static_cast<double>(series.size())));
    std::vector<double> lags(n_cut);
    for (std::size_t i = 0; i < n_cut; ++i) lags[i] = static_cast<double>(i + 1);

    Chaos01Result res;
    res.k_per_c.reserve(cs.size());
    for (double c : cs) {
        const auto [p, q] = translation_coords(series, c);
        const auto m = mean_square_displacement(p, q, cfg.cut_fraction);
        res.k_per_c.push_back(k_statistic(m, lags));
    }
    res.k_median = detail::median_of(res.k_per_c);
    res.cls = res.k_median > cfg.k_chaotic   ? DynClass::Chaotic
              : res.k_median < cfg.k_regular ? DynClass::Regular
                                             : DynClass::Inconclusive;
    return res;
}

}  // namespace harvester
