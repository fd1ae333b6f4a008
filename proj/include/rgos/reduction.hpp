#pragma once

#include <cmath>
#include "rgos/gaussian.hpp"
#include "rgos/oracle.hpp"
#include "rgos/rng.hpp"
#include "rgos/types.hpp"

// The proximal reduction loop: alternate a Gaussian y-step with a restricted
// Gaussian oracle x-step on the extended (x, y) density whose x-marginal is
// the target. Any eta-RGO for a strongly convex negative log-density becomes
// a sampler this way.

namespace rgos {

struct ReductionConfig {
    double eta = 1.0;  // quadratic coupling 1/(2 eta)
    int T = 1;
    double beta = 1.0;  // warmness of the start distribution
    double eps = 0.1;   // target total variation distance
    double constant_override = 4.0;

    void validate() const {
        require(eta > 0.0, "ReductionConfig: eta must be positive");
        require(T >= 0, "ReductionConfig: T must be nonnegative");
        require(eps > 0.0 && eps < 1.0, "ReductionConfig: eps must lie in (0, 1)");
        require(beta >= 1.0, "ReductionConfig: beta must be >= 1");
    }
};

struct ChainState {
    Vec x;
    Vec y;
    RngStream rng;
    double tv_budget_spent = 0.0;
};

/// Iteration count T = ceil(c * (1/(eta mu)) * log(log(beta)/eps)). The inner
/// log(beta) is floored at e and the outer log at 1, so degenerate warmness
/// still yields at least one iteration.
inline int iteration_count(double eta, double mu, double beta, double eps,
                           double constant_override = 4.0) {
    require(eta > 0.0 && mu > 0.0 && beta > 0.0 && constant_override > 0.0,
            "iteration_count: parameters must be positive");
    require(eps > 0.0 && eps < 1.0, "iteration_count: eps must lie in (0, 1)");
    double log_beta = std::max(std::log(beta), M_E);
    double outer = std::max(std::log(log_beta / eps), 1.0);
    return static_cast<int>(std::ceil(constant_override / (eta * mu) * outer));
}

/// Warmness of N(x*, (1/L) I) relative to a target with condition number
/// kappa, in log form: (d/2) log(kappa).
inline double log_warmness_gaussian_start(const ProblemMeta& meta) {
    return 0.5 * meta.dim * std::log(meta.kappa());
}

/// Draw from N(x*, (1/L) I); the start used when the negative log-density
/// has no separate composite part.
inline Vec warm_start_gaussian(const Vec& x_star, double L, RngStream& rng) {
    require(L > 0.0, "warm_start_gaussian: L must be positive");
    return sample_gaussian(rng, x_star, 1.0 / L);
}

/// Draw from the density proportional to exp(-(L/2)||x-x*||^2 - g(x)):
/// one RGO call with lambda = 1/L centered at x*.
inline Vec warm_start_composite(const Vec& x_star, double L, const RgoHandle& g_rgo,
                                RngStream& rng, double tv_tol = 0.0) {
    require(L > 0.0, "warm_start_composite: L must be positive");
    return g_rgo.sample(1.0 / L, x_star, tv_tol, rng);
}

/// Run T iterations of { y_k ~ N(x_{k-1}, eta I); x_k ~ RGO(eta, y_k) } and
/// return x_T. Approximate oracles receive a per-call tolerance eps/(2T);
/// the spend is accumulated in the chain state.
inline Vec alternate_sample(const RgoHandle& g_rgo, double mu, const ReductionConfig& cfg,
                            const Vec& x0, RngStream& rng, ChainState* state = nullptr) {
    cfg.validate();
    require(mu > 0.0, "alternate_sample: mu must be positive");
    if (cfg.eta > g_rgo.eta_cap() * (1.0 + 1e-12))
        throw ConfigError("alternate_sample: eta exceeds the RGO's eta cap");

    double per_call_tol =
        (g_rgo.exact() || cfg.T == 0) ? 0.0 : cfg.eps / (2.0 * cfg.T);
    Vec x = x0;
    Vec y = x0;
    for (int k = 0; k < cfg.T; ++k) {
        y = sample_gaussian(rng, x, cfg.eta);
        x = g_rgo.sample(cfg.eta, y, per_call_tol, rng);
        if (state) state->tv_budget_spent += per_call_tol;
    }
    if (state) {
        state->x = x;
        state->y = y;
        state->rng = rng;
    }
    return x;
}

}  // namespace rgos
