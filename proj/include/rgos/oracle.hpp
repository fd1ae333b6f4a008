#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>
#include "rgos/rng.hpp"
#include "rgos/types.hpp"

// Function-oracle and restricted-Gaussian-oracle abstractions, plus the
// shared-minimizer reduction and quadratic merging that the samplers
// build on. Oracles are immutable after construction except for the
// query tallies, which are atomic and may be shared across chains.

namespace rgos {

struct QueryCounters {
    std::atomic<std::uint64_t> value_queries{0};
    std::atomic<std::uint64_t> gradient_queries{0};
    std::atomic<std::uint64_t> rgo_calls{0};
};

/// Black-box convex function with value/gradient access and declared
/// smoothness metadata. Copies share the underlying query tallies;
/// fork_counters() gives a copy with a fresh tally block.
class FunctionOracle {
  public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;

    FunctionOracle() : counters_(std::make_shared<QueryCounters>()) {}
    FunctionOracle(ValueFn value, GradFn gradient, ProblemMeta meta)
        : value_(std::move(value)),
          gradient_(std::move(gradient)),
          meta_(meta),
          counters_(std::make_shared<QueryCounters>()) {}

    static FunctionOracle value_only(ValueFn value, ProblemMeta meta) {
        return FunctionOracle(std::move(value), GradFn{}, meta);
    }

    double value(const Vec& x) const {
        counters_->value_queries.fetch_add(1, std::memory_order_relaxed);
        return value_(x);
    }

    Vec gradient(const Vec& x) const {
        if (!gradient_)
            throw UnsupportedError("FunctionOracle: gradient oracle not provided");
        counters_->gradient_queries.fetch_add(1, std::memory_order_relaxed);
        return gradient_(x);
    }

    bool has_gradient() const { return static_cast<bool>(gradient_); }
    const ProblemMeta& meta() const { return meta_; }
    QueryCounters& counters() const { return *counters_; }

    FunctionOracle fork_counters() const {
        FunctionOracle copy = *this;
        copy.counters_ = std::make_shared<QueryCounters>();
        return copy;
    }

  private:
    ValueFn value_;
    GradFn gradient_;
    ProblemMeta meta_;
    std::shared_ptr<QueryCounters> counters_;
};

enum class RgoExactness { exact, approximate };

/// Sampler for densities proportional to exp(-||x-v||^2/(2 lambda) - g(x)).
/// Calls must have lambda <= eta_cap. Exact handles ignore the per-call TV
/// tolerance. Optional extras carry the value, subgradient and proximal
/// oracles of g where the surrounding algorithms need them.
class RgoHandle {
  public:
    using SampleFn = std::function<Vec(double lambda, const Vec& v, double tv_tol, RngStream&)>;
    using ValueFn = std::function<double(const Vec&)>;
    using SubgradFn = std::function<Vec(const Vec&)>;
    using ProxFn = std::function<Vec(double lambda, const Vec& v)>;

    RgoHandle() : counters_(std::make_shared<QueryCounters>()) {}
    RgoHandle(SampleFn sampler, double eta_cap, RgoExactness exactness)
        : sampler_(std::move(sampler)),
          eta_cap_(eta_cap),
          exactness_(exactness),
          counters_(std::make_shared<QueryCounters>()) {}

    Vec sample(double lambda, const Vec& v, double tv_tol, RngStream& rng) const {
        if (!sampler_) throw UnsupportedError("RgoHandle: no sampler attached");
        require(lambda > 0.0, "RgoHandle: lambda must be positive");
        if (lambda > eta_cap_ * (1.0 + 1e-12))
            throw ConfigError("RgoHandle: lambda exceeds eta cap");
        require(tv_tol >= 0.0 && tv_tol <= 1.0, "RgoHandle: tv_tol must lie in [0, 1]");
        counters_->rgo_calls.fetch_add(1, std::memory_order_relaxed);
        if (exactness_ == RgoExactness::exact) tv_tol = 0.0;
        return sampler_(lambda, v, tv_tol, rng);
    }

    double eta_cap() const { return eta_cap_; }
    RgoExactness exactness() const { return exactness_; }
    bool exact() const { return exactness_ == RgoExactness::exact; }
    QueryCounters& counters() const { return *counters_; }

    RgoHandle& with_value(ValueFn v) {
        value_ = std::move(v);
        return *this;
    }
    RgoHandle& with_subgradient(SubgradFn s) {
        subgrad_ = std::move(s);
        return *this;
    }
    RgoHandle& with_prox(ProxFn p) {
        prox_ = std::move(p);
        return *this;
    }

    bool has_value() const { return static_cast<bool>(value_); }
    double value(const Vec& x) const {
        if (!value_) throw UnsupportedError("RgoHandle: value oracle not provided");
        return value_(x);
    }
    bool has_subgradient() const { return static_cast<bool>(subgrad_); }
    Vec subgradient(const Vec& x) const {
        if (!subgrad_) throw UnsupportedError("RgoHandle: subgradient not provided");
        return subgrad_(x);
    }
    bool has_prox() const { return static_cast<bool>(prox_); }
    Vec prox(double lambda, const Vec& v) const {
        if (!prox_) throw UnsupportedError("RgoHandle: proximal oracle not provided");
        return prox_(lambda, v);
    }

    RgoHandle fork_counters() const {
        RgoHandle copy = *this;
        copy.counters_ = std::make_shared<QueryCounters>();
        return copy;
    }

  private:
    SampleFn sampler_;
    double eta_cap_ = 0.0;
    RgoExactness exactness_ = RgoExactness::exact;
    ValueFn value_;
    SubgradFn subgrad_;
    ProxFn prox_;
    std::shared_ptr<QueryCounters> counters_;
};

/// Average of n smooth convex summands; F(x) = (1/n) sum_i f_i(x) is
/// mu_total-strongly convex. Full-F queries cost n summand queries and
/// are tallied as such.
class FiniteSumOracle {
  public:
    FiniteSumOracle() = default;
    FiniteSumOracle(std::vector<FunctionOracle> summands, double mu_total)
        : summands_(std::move(summands)), mu_total_(mu_total) {
        require(!summands_.empty(), "FiniteSumOracle: need n >= 1 summands");
        require(mu_total_ > 0.0, "FiniteSumOracle: mu_total must be positive");
        double L = 0.0;
        for (const auto& f : summands_) L = std::max(L, f.meta().L);
        meta_ = ProblemMeta(L, mu_total_, summands_.front().meta().dim);
    }

    int n() const { return static_cast<int>(summands_.size()); }
    const FunctionOracle& summand(int i) const { return summands_[i]; }
    const ProblemMeta& meta() const { return meta_; }  // L = per-summand bound

    double summand_value(int i, const Vec& x) const { return summands_[i].value(x); }
    Vec summand_gradient(int i, const Vec& x) const { return summands_[i].gradient(x); }

    double full_value(const Vec& x) const {
        full_evals_->fetch_add(1, std::memory_order_relaxed);
        double s = 0.0;
        for (const auto& f : summands_) s += f.value(x);
        return s / n();
    }

    Vec full_gradient(const Vec& x) const {
        full_evals_->fetch_add(1, std::memory_order_relaxed);
        Vec g = Vec::Zero(meta_.dim);
        for (const auto& f : summands_) g += f.gradient(x);
        return g / n();
    }

    std::uint64_t full_evaluations() const { return full_evals_->load(); }

    std::uint64_t summand_value_queries() const {
        std::uint64_t s = 0;
        for (const auto& f : summands_) s += f.counters().value_queries.load();
        return s;
    }
    std::uint64_t summand_gradient_queries() const {
        std::uint64_t s = 0;
        for (const auto& f : summands_) s += f.counters().gradient_queries.load();
        return s;
    }

    FiniteSumOracle fork_counters() const {
        std::vector<FunctionOracle> copies;
        copies.reserve(summands_.size());
        for (const auto& f : summands_) copies.push_back(f.fork_counters());
        return FiniteSumOracle(std::move(copies), mu_total_);
    }

  private:
    std::vector<FunctionOracle> summands_;
    double mu_total_ = 1.0;
    ProblemMeta meta_;
    std::shared_ptr<std::atomic<std::uint64_t>> full_evals_ =
        std::make_shared<std::atomic<std::uint64_t>>(0);
};

/// Merge two isotropic quadratic penalties into one:
///   ||x-v1||^2/(2 l1) + ||x-v2||^2/(2 l2) = ||x-v||^2/(2 l) + const,
/// with 1/l = 1/l1 + 1/l2 and v = l (v1/l1 + v2/l2).
inline std::pair<double, Vec> combine_quadratics(double lambda1, const Vec& v1,
                                                 double lambda2, const Vec& v2) {
    require(lambda1 > 0.0 && lambda2 > 0.0,
            "combine_quadratics: lambdas must be positive");
    double lambda = 1.0 / (1.0 / lambda1 + 1.0 / lambda2);
    Vec v = lambda * (v1 / lambda1 + v2 / lambda2);
    return {lambda, v};
}

/// f(x) + ||x - v||^2 / (2 lambda) as a new oracle; the metadata gains
/// 1/lambda on both curvature bounds.
inline FunctionOracle add_quadratic(const FunctionOracle& f, double lambda, const Vec& v) {
    require(lambda > 0.0, "add_quadratic: lambda must be positive");
    ProblemMeta meta(f.meta().L + 1.0 / lambda, f.meta().mu + 1.0 / lambda, f.meta().dim);
    auto value = [f, lambda, v](const Vec& x) {
        return f.value(x) + (x - v).squaredNorm() / (2.0 * lambda);
    };
    if (!f.has_gradient()) return FunctionOracle::value_only(value, meta);
    return FunctionOracle(
        value, [f, lambda, v](const Vec& x) { return Vec(f.gradient(x) + (x - v) / lambda); },
        meta);
}

/// Add the same ridge ||x - v||^2 / (2 lambda) to every summand, so the
/// average gains it too; summand gradients shift by (x - v)/lambda.
inline FiniteSumOracle add_quadratic(const FiniteSumOracle& fs, double lambda, const Vec& v) {
    require(lambda > 0.0, "add_quadratic: lambda must be positive");
    std::vector<FunctionOracle> shifted;
    shifted.reserve(fs.n());
    for (int i = 0; i < fs.n(); ++i) shifted.push_back(add_quadratic(fs.summand(i), lambda, v));
    return FiniteSumOracle(std::move(shifted), fs.meta().mu + 1.0 / lambda);
}

/// Shift f and g by the linear term <grad f(x*), .> so both become minimized
/// at x*, leaving the sum unchanged:
///   f~(x) = f(x) - <grad f(x*), x>,   g~(x) = g(x) + <grad f(x*), x>.
/// The RGO for g~ folds the linear term into the quadratic center:
/// exp(-||x-v||^2/(2l) - g(x) - <s, x>) = exp(-||x-(v - l s)||^2/(2l) - g(x)) * const.
inline std::pair<FunctionOracle, RgoHandle> shift_to_shared_min(const FunctionOracle& f,
                                                                const RgoHandle& g,
                                                                const Vec& x_star) {
    if (!f.has_gradient())
        throw UnsupportedError("shift_to_shared_min: f must expose a gradient oracle");
    Vec s = f.gradient(x_star);

    FunctionOracle f_shift(
        [f, s](const Vec& x) { return f.value(x) - s.dot(x); },
        [f, s](const Vec& x) { return Vec(f.gradient(x) - s); }, f.meta());

    RgoHandle g_shift(
        [g, s](double lambda, const Vec& v, double tv_tol, RngStream& rng) {
            return g.sample(lambda, Vec(v - lambda * s), tv_tol, rng);
        },
        g.eta_cap(), g.exactness());
    if (g.has_value()) {
        g_shift.with_value([g, s](const Vec& x) { return g.value(x) + s.dot(x); });
    }
    if (g.has_subgradient()) {
        g_shift.with_subgradient([g, s](const Vec& x) { return Vec(g.subgradient(x) + s); });
    }
    if (g.has_prox()) {
        g_shift.with_prox([g, s](double lambda, const Vec& v) {
            return g.prox(lambda, Vec(v - lambda * s));
        });
    }
    return {std::move(f_shift), std::move(g_shift)};
}

}  // namespace rgos
