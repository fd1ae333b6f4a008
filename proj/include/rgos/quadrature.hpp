#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>
#include "rgos/special.hpp"
#include "rgos/types.hpp"

// 1D quadrature oracle for unnormalized log-densities: normalizer, moments
// and a CDF evaluator, all independent of any sampler code path.

namespace rgos {

/// Composite-Simpson integration of exp(log_density) on [lo, hi] in
/// log-stabilized form. Node count is rounded up to an odd value >= 4001
/// unless overridden.
class Quadrature1D {
  public:
    Quadrature1D(const std::function<double(double)>& log_density, double lo, double hi,
                 int n_nodes = 4001) {
        require(hi > lo, "Quadrature1D: need lo < hi");
        if (n_nodes < 3) n_nodes = 3;
        if (n_nodes % 2 == 0) ++n_nodes;
        n_ = n_nodes;
        lo_ = lo;
        hi_ = hi;
        h_ = (hi - lo) / (n_ - 1);
        logf_.resize(n_);
        double max_log = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) {
            double x = lo_ + i * h_;
            double l = log_density(x);
            if (std::isnan(l) || l == std::numeric_limits<double>::infinity())
                throw ConfigError("Quadrature1D: non-finite log-density at node x=" +
                                  std::to_string(x));
            logf_[i] = l;
            max_log = std::max(max_log, l);
        }
        shift_ = max_log;
        f_.resize(n_);
        for (int i = 0; i < n_; ++i) f_[i] = std::exp(logf_[i] - shift_);

        // Simpson normalizer and raw moments
        double z = 0.0, m1 = 0.0, m2 = 0.0;
        for (int i = 0; i < n_; ++i) {
            double w = (i == 0 || i == n_ - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            double x = lo_ + i * h_;
            z += w * f_[i];
            m1 += w * x * f_[i];
            m2 += w * x * x * f_[i];
        }
        z *= h_ / 3.0;
        m1 *= h_ / 3.0;
        m2 *= h_ / 3.0;
        log_normalizer_ = std::log(z) + shift_;
        mean_ = m1 / z;
        variance_ = m2 / z - mean_ * mean_;

        // cumulative mass at every node from the Simpson parabola on each pair
        cum_.assign(n_, 0.0);
        for (int k = 0; k + 2 < n_; k += 2) {
            double fa = f_[k], fm = f_[k + 1], fb = f_[k + 2];
            cum_[k + 1] = cum_[k] + h_ * (5.0 * fa + 8.0 * fm - fb) / 12.0;
            cum_[k + 2] = cum_[k] + h_ * (fa + 4.0 * fm + fb) / 3.0;
        }
        total_ = cum_[n_ - 1];
    }

    double log_normalizer() const { return log_normalizer_; }
    double normalizer() const { return std::exp(log_normalizer_); }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    /// Normalized CDF at t, exact for the piecewise Simpson parabolas.
    double cdf(double t) const {
        if (t <= lo_) return 0.0;
        if (t >= hi_) return 1.0;
        int j = static_cast<int>((t - lo_) / h_);
        j = std::min(j, n_ - 2);
        int k = j - (j % 2);  // start of the Simpson pair
        double fa = f_[k], fm = f_[k + 1], fb = f_[k + 2];
        double s = t - (lo_ + k * h_);
        double c1 = (-3.0 * fa + 4.0 * fm - fb) / (2.0 * h_);
        double c2 = (fa - 2.0 * fm + fb) / (2.0 * h_ * h_);
        double part = fa * s + 0.5 * c1 * s * s + c2 * s * s * s / 3.0;
        return std::clamp((cum_[k] + part) / total_, 0.0, 1.0);
    }

    /// Quantile by bisection on the CDF.
    double quantile(double p) const {
        require(p > 0.0 && p < 1.0, "Quadrature1D::quantile: p in (0,1)");
        double a = lo_, b = hi_;
        for (int i = 0; i < 200; ++i) {
            double m = 0.5 * (a + b);
            (cdf(m) < p ? a : b) = m;
        }
        return 0.5 * (a + b);
    }

    /// E[h(x)] under the normalized density.
    double expectation(const std::function<double(double)>& h) const {
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            double w = (i == 0 || i == n_ - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += w * h(lo_ + i * h_) * f_[i];
        }
        return acc * h_ / 3.0 / std::exp(log_normalizer_ - shift_);
    }

  private:
    int n_ = 0;
    double lo_ = 0.0, hi_ = 0.0, h_ = 0.0, shift_ = 0.0;
    double log_normalizer_ = 0.0, mean_ = 0.0, variance_ = 0.0, total_ = 0.0;
    std::vector<double> logf_, f_, cum_;
};

struct QuadratureMoments {
    double normalizer;
    double mean;
    double variance;
    std::function<double(double)> cdf;
};

inline QuadratureMoments quadrature_moments_1d(const std::function<double(double)>& log_density,
                                               double lo, double hi, int n_nodes = 4001) {
    auto q = std::make_shared<Quadrature1D>(log_density, lo, hi, n_nodes);
    return {q->normalizer(), q->mean(), q->variance(),
            [q](double t) { return q->cdf(t); }};
}

/// Integration half-width from the strong-logconcavity tail bound: truncated
/// mass beyond x* +- max(10, sqrt(2 log(1e12)/mu))/sqrt(mu) is below the
/// quadrature tolerance.
inline double quadrature_halfwidth(double mu) {
    require(mu > 0.0, "quadrature_halfwidth: mu must be positive");
    return std::max(10.0, std::sqrt(2.0 * std::log(1e12) / mu)) / std::sqrt(mu);
}

}  // namespace rgos
