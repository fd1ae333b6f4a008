#pragma once

#include <cmath>
#include <utility>
#include "rgos/rng.hpp"
#include "rgos/special.hpp"
#include "rgos/types.hpp"

// Seeded Gaussian sampling primitives: isotropic draws, exact truncated
// normals (inverse CDF with tail fallback), the l1-regularized quadratic
// sampler, and Gaussian integral helpers.

namespace rgos {

struct UnderflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double standard_normal(RngStream& rng) {
    return inverse_norm_cdf(rng.uniform());
}

/// Draw from N(mean, variance * I).
inline Vec sample_gaussian(RngStream& rng, const Vec& mean, double variance) {
    require(variance > 0.0, "sample_gaussian: variance must be positive");
    double s = std::sqrt(variance);
    Vec out(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i)
        out[i] = mean[i] + s * standard_normal(rng);
    return out;
}

inline double sample_gaussian_1d(RngStream& rng, double mean, double variance) {
    require(variance > 0.0, "sample_gaussian_1d: variance must be positive");
    return mean + std::sqrt(variance) * standard_normal(rng);
}

/// log of the Gaussian integral of exp(-||x-v||^2 / (2 lambda)) over R^d,
/// i.e. (d/2) log(2 pi lambda).
inline double log_gaussian_normalizer(double lambda, int d) {
    require(lambda > 0.0, "log_gaussian_normalizer: lambda must be positive");
    require(d >= 1, "log_gaussian_normalizer: d must be >= 1");
    return 0.5 * d * std::log(2.0 * M_PI * lambda);
}

/// One-dimensional normal restricted to [lower, upper].
struct TruncatedGaussian1D {
    double mean = 0.0;
    double variance = 1.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    void validate() const {
        require(variance > 0.0, "TruncatedGaussian1D: variance must be positive");
        require(lower < upper, "TruncatedGaussian1D: need lower < upper");
    }
};

namespace detail {

// Standardized right-tail draw from N(0,1) restricted to [a, b], a >= 0,
// by exponential-envelope rejection (exact).
inline double truncated_tail_standard(RngStream& rng, double a, double b) {
    double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (int round = 0; round < 100000; ++round) {
        double x = a - std::log(rng.uniform()) / rate;
        if (x > b) continue;
        double log_acc = -0.5 * (x - rate) * (x - rate);
        if (std::log(rng.uniform()) <= log_acc) return x;
    }
    throw AnomalyError("truncated_tail_standard: rejection cap exceeded");
}

// log of Phi(b) - Phi(a) for a < b.
inline double log_gaussian_interval_mass(double a, double b) {
    if (a <= 0.0 && b >= 0.0) {
        double mass = norm_cdf(b) - norm_cdf(a);
        return std::log(mass);
    }
    if (b < 0.0) return log_diff_exp(log_norm_cdf(b), log_norm_cdf(a));
    return log_diff_exp(log_norm_cdf(-a), log_norm_cdf(-b));
}

}  // namespace detail

/// Exact draw from a truncated normal. Inverse-CDF in the body of the
/// distribution, exponential-rejection beyond 8 standard deviations.
inline double sample_truncated_gaussian_1d(RngStream& rng, const TruncatedGaussian1D& tg) {
    tg.validate();
    double s = std::sqrt(tg.variance);
    double a = (tg.lower - tg.mean) / s;
    double b = (tg.upper - tg.mean) / s;

    double log_mass = detail::log_gaussian_interval_mass(a, b);
    if (log_mass < std::log(1e-300))
        throw UnderflowError("sample_truncated_gaussian_1d: interval [" +
                             std::to_string(tg.lower) + ", " + std::to_string(tg.upper) +
                             "] carries mass below 1e-300 (log mass " +
                             std::to_string(log_mass) + ")");

    double z;
    if (a >= 8.0) {
        z = detail::truncated_tail_standard(rng, a, b);
    } else if (b <= -8.0) {
        z = -detail::truncated_tail_standard(rng, -b, -a);
    } else if (a > 0.0) {
        // mirror so CDF values stay well away from 1
        double pa = norm_cdf(-b), pb = norm_cdf(-a);
        z = -inverse_norm_cdf(pa + rng.uniform() * (pb - pa));
    } else {
        double pa = norm_cdf(a), pb = norm_cdf(b);
        z = inverse_norm_cdf(pa + rng.uniform() * (pb - pa));
    }
    z = std::min(std::max(z, a), b);
    return tg.mean + s * z;
}

/// Exact draw from the density proportional to
///   exp(-(x - v)^2 / (2 lambda) - reg * |x|),
/// realized as a two-component mixture of truncated Gaussians: the x >= 0
/// branch has shifted mean v - reg*lambda, the x < 0 branch v + reg*lambda,
/// with weights given by the two branch masses.
inline double sample_l1_quadratic_1d(RngStream& rng, double v, double lambda, double reg) {
    require(lambda > 0.0, "sample_l1_quadratic_1d: lambda must be positive");
    require(reg >= 0.0, "sample_l1_quadratic_1d: reg must be nonnegative");
    if (reg == 0.0) return sample_gaussian_1d(rng, v, lambda);

    double s = std::sqrt(lambda);
    double m_pos = v - reg * lambda;
    double m_neg = v + reg * lambda;
    // branch mass exponents relative to exp(-(x-v)^2/(2 lambda))
    double log_w_pos = (m_pos * m_pos - v * v) / (2.0 * lambda) + log_norm_cdf(m_pos / s);
    double log_w_neg = (m_neg * m_neg - v * v) / (2.0 * lambda) + log_norm_cdf(-m_neg / s);
    double log_total = log_sum_exp(log_w_pos, log_w_neg);

    double u = rng.uniform();
    TruncatedGaussian1D tg;
    tg.variance = lambda;
    if (std::log(u) <= log_w_pos - log_total) {
        tg.mean = m_pos;
        tg.lower = 0.0;
    } else {
        tg.mean = m_neg;
        tg.upper = 0.0;
    }
    return sample_truncated_gaussian_1d(rng, tg);
}

/// High-probability radius for ||x - x*|| under a mu-strongly logconcave law:
/// sqrt(d/mu) * (2 + 2 max((log(1/delta)/d)^{1/4}, sqrt(log(1/delta)/d))).
inline double subgaussian_radius(double mu, int d, double delta) {
    require(mu > 0.0 && d >= 1 && delta > 0.0 && delta <= 1.0,
            "subgaussian_radius: bad arguments");
    double r = std::log(1.0 / delta) / d;
    return std::sqrt(d / mu) * (2.0 + 2.0 * std::max(std::pow(r, 0.25), std::sqrt(r)));
}

/// Maximal (reflection) coupling of N(x, variance I) and N(xp, variance I).
/// Returns the pair of draws and whether they coincide.
inline std::pair<Vec, Vec> gaussian_reflection_coupling(RngStream& rng, const Vec& x,
                                                        const Vec& xp, double variance,
                                                        bool* coupled = nullptr) {
    require(variance > 0.0, "gaussian_reflection_coupling: variance must be positive");
    Vec z(x.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
    double s = std::sqrt(variance);
    Vec y = x + s * z;
    double diff2 = (y - xp).squaredNorm() - (y - x).squaredNorm();
    double log_ratio = -diff2 / (2.0 * variance);
    if (std::log(rng.uniform()) <= log_ratio) {
        if (coupled) *coupled = true;
        return {y, y};
    }
    if (coupled) *coupled = false;
    Vec e = (xp - x).normalized();
    Vec zr = z - 2.0 * e.dot(z) * e;
    return {y, xp + s * zr};
}

}  // namespace rgos
