#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>
#include "rgos/rng.hpp"
#include "rgos/special.hpp"
#include "rgos/types.hpp"

// Statistical test machinery for the validation harness: KS tests against
// reference CDFs, DKW bands, an energy-distance permutation test, chi-square
// goodness of fit, and exact binomial tails.

namespace rgos {

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double se_mean = 0.0;
    double se_variance = 0.0;  // from the fourth central moment
    std::size_t n = 0;
};

inline SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.n = xs.size();
    if (s.n == 0) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / s.n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        double d = x - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= s.n;
    m4 /= s.n;
    s.variance = (s.n > 1) ? m2 * s.n / (s.n - 1) : 0.0;
    s.se_mean = std::sqrt(m2 / s.n);
    double var_of_var = std::max(0.0, m4 - m2 * m2);
    s.se_variance = std::sqrt(var_of_var / s.n);
    return s;
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double n_effective = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a reference CDF.
inline KsResult ks_test_cdf(std::vector<double> xs, const std::function<double(double)>& cdf) {
    require(!xs.empty(), "ks_test_cdf: empty sample");
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double c = cdf(xs[i]);
        d = std::max(d, std::fabs(c - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - c));
    }
    double sn = std::sqrt(n);
    double p = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
    return {d, p, n};
}

/// Two-sample Kolmogorov-Smirnov test.
inline KsResult ks_test_two(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "ks_test_two: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    double sn = std::sqrt(ne);
    double p = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
    return {d, p, ne};
}

/// Dvoretzky-Kiefer-Wolfowitz band halfwidth at confidence 1 - alpha.
inline double dkw_halfwidth(std::size_t n, double alpha) {
    require(n > 0 && alpha > 0.0 && alpha < 1.0, "dkw_halfwidth: bad arguments");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
}

/// sup_t |F_hat(t) - F(t)| over the sample points.
inline double empirical_cdf_sup_deviation(std::vector<double> xs,
                                          const std::function<double(double)>& cdf) {
    return ks_test_cdf(std::move(xs), cdf).statistic;
}

struct Chi2Result {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

inline Chi2Result chi_square_gof(const std::vector<double>& observed,
                                 const std::vector<double>& expected) {
    require(observed.size() == expected.size() && !observed.empty(),
            "chi_square_gof: size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        require(expected[i] > 0.0, "chi_square_gof: expected counts must be positive");
        double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    double df = static_cast<double>(observed.size()) - 1.0;
    return {stat, df, chi_square_sf(stat, df)};
}

/// Exact Pr[Bin(n, p) >= k].
inline double binomial_tail_geq(int n, int k, double p) {
    require(n >= 0 && p >= 0.0 && p <= 1.0, "binomial_tail_geq: bad arguments");
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    double sum = 0.0;
    for (int j = k; j <= n; ++j) {
        double lg = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                    j * std::log(p) + (n - j) * std::log1p(-p);
        sum += std::exp(lg);
    }
    return std::min(1.0, sum);
}

/// First Wasserstein distance between two 1D empirical measures.
inline double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
    require(a.size() == b.size() && !a.empty(), "wasserstein1_1d: need equal nonempty sizes");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc / a.size();
}

namespace detail {

inline double energy_statistic(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    auto mean_cross = [](const std::vector<Vec>& u, const std::vector<Vec>& v) {
        double s = 0.0;
        for (const auto& x : u)
            for (const auto& y : v) s += (x - y).norm();
        return s / (static_cast<double>(u.size()) * v.size());
    };
    auto mean_within = [](const std::vector<Vec>& u) {
        if (u.size() < 2) return 0.0;
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = i + 1; j < u.size(); ++j) s += (u[i] - u[j]).norm();
        return 2.0 * s / (static_cast<double>(u.size()) * u.size());
    };
    return 2.0 * mean_cross(a, b) - mean_within(a) - mean_within(b);
}

}  // namespace detail

struct PermutationResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int permutations = 0;
};

/// Energy-distance permutation test. Samples are capped at max_points per
/// group (deterministic subsample) to keep the pairwise cost bounded.
inline PermutationResult energy_permutation_test(const std::vector<Vec>& a,
                                                 const std::vector<Vec>& b, RngStream rng,
                                                 int permutations = 500,
                                                 std::size_t max_points = 1500) {
    require(!a.empty() && !b.empty(), "energy_permutation_test: empty sample");
    require(a.front().size() == b.front().size(),
            "energy_permutation_test: dimension mismatch");
    auto thin = [max_points](const std::vector<Vec>& v) {
        if (v.size() <= max_points) return v;
        std::vector<Vec> out;
        out.reserve(max_points);
        double step = static_cast<double>(v.size()) / max_points;
        for (std::size_t i = 0; i < max_points; ++i)
            out.push_back(v[static_cast<std::size_t>(i * step)]);
        return out;
    };
    std::vector<Vec> aa = thin(a), bb = thin(b);
    double obs = detail::energy_statistic(aa, bb);

    std::vector<Vec> pool = aa;
    pool.insert(pool.end(), bb.begin(), bb.end());
    int exceed = 0;
    for (int perm = 0; perm < permutations; ++perm) {
        for (std::size_t i = pool.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(pool[i - 1], pool[j]);
        }
        std::vector<Vec> pa(pool.begin(), pool.begin() + aa.size());
        std::vector<Vec> pb(pool.begin() + aa.size(), pool.end());
        if (detail::energy_statistic(pa, pb) >= obs) ++exceed;
    }
    double p = (1.0 + exceed) / (1.0 + permutations);
    return {obs, p, permutations};
}

struct TwoSampleResult {
    std::vector<KsResult> marginal_ks;  // one per coordinate
    double ks_min_p_bonferroni = 1.0;   // min marginal p times dimension
    PermutationResult energy;
    bool pass(double alpha) const {
        return ks_min_p_bonferroni > alpha && energy.p_value > alpha;
    }
};

/// Per-marginal KS with Bonferroni correction plus an energy-distance
/// permutation test.
inline TwoSampleResult two_sample_test(const std::vector<Vec>& a, const std::vector<Vec>& b,
                                       RngStream rng, int permutations = 500) {
    require(!a.empty() && !b.empty(), "two_sample_test: empty sample");
    require(a.front().size() == b.front().size(), "two_sample_test: dimension mismatch");
    TwoSampleResult out;
    int d = static_cast<int>(a.front().size());
    double min_p = 1.0;
    for (int c = 0; c < d; ++c) {
        std::vector<double> xa(a.size()), xb(b.size());
        for (std::size_t i = 0; i < a.size(); ++i) xa[i] = a[i][c];
        for (std::size_t i = 0; i < b.size(); ++i) xb[i] = b[i][c];
        auto ks = ks_test_two(std::move(xa), std::move(xb));
        min_p = std::min(min_p, ks.p_value);
        out.marginal_ks.push_back(ks);
    }
    out.ks_min_p_bonferroni = std::min(1.0, min_p * d);
    out.energy = energy_permutation_test(a, b, rng, permutations);
    return out;
}

}  // namespace rgos
