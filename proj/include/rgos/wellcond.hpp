#pragma once

#include <cmath>
#include "rgos/gaussian.hpp"
#include "rgos/optimize.hpp"
#include "rgos/oracle.hpp"
#include "rgos/reduction.hpp"
#include "rgos/types.hpp"

// Sampler for densities exp(-f) with condition number kappa: a rejection
// RGO behind a gradient-norm gate, a Metropolized Langevin fallback for the
// rare out-of-gate queries, and the zeroth-order variant built on an exact
// Metropolized random walk.

namespace rgos {

/// Per-run sampler diagnostics accumulated along a chain.
struct SamplerDiag {
    std::uint64_t rgo_calls = 0;
    std::uint64_t rejection_rounds = 0;
    std::uint64_t gate_failures = 0;
    std::uint64_t fallback_calls = 0;
    std::uint64_t fallback_steps = 0;
    double tv_spent = 0.0;

    void merge(const SamplerDiag& other) {
        rgo_calls += other.rgo_calls;
        rejection_rounds += other.rejection_rounds;
        gate_failures += other.gate_failures;
        fallback_calls += other.fallback_calls;
        fallback_steps += other.fallback_steps;
        tv_spent += other.tv_spent;
    }
};

inline double log_kappa_clamped(double kappa) { return std::max(std::log(kappa), 1.0); }

struct XSampleConfig {
    double eta = 0.0;        // default 1/(8 L d log kappa)
    double grad_gate = 0.0;  // default 3 sqrt(L) d log kappa
    double fallback_tv = 1e-3;
    int max_rejection_rounds = 100000;

    static XSampleConfig from_meta(const ProblemMeta& meta, double fallback_tv = 1e-3) {
        double lk = log_kappa_clamped(meta.kappa());
        XSampleConfig cfg;
        cfg.eta = 1.0 / (8.0 * meta.L * meta.dim * lk);
        cfg.grad_gate = 3.0 * std::sqrt(meta.L) * meta.dim * lk;
        cfg.fallback_tv = fallback_tv;
        return cfg;
    }

    void validate() const {
        require(eta > 0.0 && grad_gate > 0.0, "XSampleConfig: eta, grad_gate must be positive");
    }
};

struct FallbackOptions {
    double step_factor = 0.4;    // h = step_factor / (L_target * d)
    double iter_constant = 8.0;  // steps = ceil(iter_constant * d * log(d / tv_tol))
    double argmin_tol_factor = 1e-6;
};

/// One-step Metropolized Langevin chain targeting exp(-V) for V with
/// condition number bounded by a constant; mixes to tv_tol in
/// O(d log(d / tv_tol)) steps. center_hint seeds the argmin search.
inline Vec metropolized_fallback(const FunctionOracle& target, double tv_tol, RngStream& rng,
                                 const Vec& center_hint, SamplerDiag* diag = nullptr,
                                 const FallbackOptions& opts = {}) {
    const double Lt = target.meta().L;
    const int d = target.meta().dim;
    tv_tol = std::max(tv_tol, 1e-12);
    const double h = opts.step_factor / (Lt * d);
    const int steps =
        static_cast<int>(std::ceil(opts.iter_constant * d * std::max(1.0, std::log(d / tv_tol))));

    Vec mode = agd_minimize(target, center_hint, opts.argmin_tol_factor * std::sqrt(Lt)).x;
    Vec x = sample_gaussian(rng, mode, 1.0 / Lt);
    double vx = target.value(x);
    Vec gx = target.gradient(x);
    for (int s = 0; s < steps; ++s) {
        Vec mean_fwd = x - h * gx;
        Vec prop = sample_gaussian(rng, mean_fwd, 2.0 * h);
        double vp = target.value(prop);
        Vec gp = target.gradient(prop);
        double log_fwd = -(prop - mean_fwd).squaredNorm() / (4.0 * h);
        double log_bwd = -(x - (prop - h * gp)).squaredNorm() / (4.0 * h);
        double log_alpha = vx - vp + log_bwd - log_fwd;
        if (std::log(rng.uniform()) <= log_alpha) {
            x = prop;
            vx = vp;
            gx = gp;
        }
    }
    if (diag) {
        diag->fallback_calls += 1;
        diag->fallback_steps += static_cast<std::uint64_t>(steps);
        diag->tv_spent += tv_tol;
    }
    return x;
}

/// RGO for f at coupling lambda: if the gradient gate passes, rejection
/// sample with proposal N(y - lambda grad f(y), lambda I) and acceptance
/// exp(f(y) + <grad f(y), x - y> - f(x)); the proposal dominates the target
/// by convexity, so the ratio never exceeds 1. Out-of-gate queries delegate
/// to the Metropolized fallback at tolerance fallback_tv.
inline Vec xsample(const FunctionOracle& f, const Vec& y, double lambda,
                   const XSampleConfig& cfg, double fallback_tv, RngStream& rng,
                   SamplerDiag* diag = nullptr) {
    cfg.validate();
    require(lambda <= cfg.eta * (1.0 + 1e-12), "xsample: lambda exceeds configured eta");
    if (diag) diag->rgo_calls += 1;

    Vec gy = f.gradient(y);
    if (gy.norm() <= cfg.grad_gate) {
        double fy = f.value(y);
        Vec mean = y - lambda * gy;
        for (int round = 0; round < cfg.max_rejection_rounds; ++round) {
            Vec x = sample_gaussian(rng, mean, lambda);
            double log_acc = fy + gy.dot(x - y) - f.value(x);
            if (log_acc > 1e-9)
                throw AnomalyError(
                    "xsample: acceptance ratio above 1 (log=" + std::to_string(log_acc) +
                    "); smoothness metadata violated");
            if (diag) diag->rejection_rounds += 1;
            if (std::log(rng.uniform()) <= log_acc) return x;
        }
        throw AnomalyError("xsample: rejection round cap " +
                           std::to_string(cfg.max_rejection_rounds) +
                           " exceeded; acceptance rate suggests violated metadata");
    }
    if (diag) diag->gate_failures += 1;
    return metropolized_fallback(add_quadratic(f, lambda, y), fallback_tv, rng, y, diag);
}

/// RGO built on xsample, suitable for alternate_sample.
inline RgoHandle make_xsample_rgo(const FunctionOracle& f, const XSampleConfig& cfg,
                                  SamplerDiag* diag = nullptr) {
    return RgoHandle(
        [f, cfg, diag](double lambda, const Vec& v, double tv_tol, RngStream& rng) {
            double fb = (tv_tol > 0.0) ? tv_tol : cfg.fallback_tv;
            return xsample(f, v, lambda, cfg, fb, rng, diag);
        },
        cfg.eta, RgoExactness::approximate);
}

struct MrwOptions {
    double step_factor = 0.5;    // h = step_factor / (L_target * d)
    double iter_constant = 8.0;  // steps = ceil(iter_constant * d * log(d / tv_tol))
};

/// Zeroth-order Metropolized random walk targeting exp(-V) with the exact
/// Metropolis filter; used as the value-only RGO.
inline Vec mrw_sample(const FunctionOracle& target, double tv_tol, RngStream& rng,
                      const Vec& center_hint, const MrwOptions& opts = {},
                      SamplerDiag* diag = nullptr) {
    const double Lt = target.meta().L;
    const int d = target.meta().dim;
    tv_tol = std::max(tv_tol, 1e-12);
    const double h = opts.step_factor / (Lt * d);
    const int steps =
        static_cast<int>(std::ceil(opts.iter_constant * d * std::max(1.0, std::log(d / tv_tol))));

    Vec x = sample_gaussian(rng, center_hint, 1.0 / Lt);
    double vx = target.value(x);
    for (int s = 0; s < steps; ++s) {
        Vec prop = sample_gaussian(rng, x, 2.0 * h);
        double vp = target.value(prop);
        if (std::log(rng.uniform()) <= vx - vp) {
            x = prop;
            vx = vp;
        }
    }
    if (diag) diag->fallback_steps += static_cast<std::uint64_t>(steps);
    return x;
}

struct WellcondResult {
    Vec x;
    SamplerDiag diag;
    int T = 0;
    double log_beta = 0.0;
};

/// End-to-end sampler for exp(-f): warm start N(x*, I/L), then the
/// reduction loop with the xsample-backed RGO at eta = 1/(8 L d log kappa).
inline WellcondResult sample_wellconditioned(const FunctionOracle& f, const Vec& x_star,
                                             double eps, RngStream& rng,
                                             double reduction_constant = 4.0,
                                             const XSampleConfig* cfg_override = nullptr) {
    require(eps > 0.0 && eps < 1.0, "sample_wellconditioned: eps must lie in (0, 1)");
    const ProblemMeta& meta = f.meta();
    XSampleConfig cfg = cfg_override ? *cfg_override : XSampleConfig::from_meta(meta);

    WellcondResult out;
    out.log_beta = log_warmness_gaussian_start(meta);
    double beta = std::exp(out.log_beta);

    ReductionConfig rc;
    rc.eta = cfg.eta;
    rc.beta = beta;
    rc.eps = eps;
    rc.constant_override = reduction_constant;
    rc.T = iteration_count(cfg.eta, meta.mu, beta, eps / 2.0, reduction_constant);
    out.T = rc.T;

    RgoHandle rgo = make_xsample_rgo(f, cfg, &out.diag);
    Vec x0 = warm_start_gaussian(x_star, meta.L, rng);
    ChainState state;
    out.x = alternate_sample(rgo, meta.mu, rc, x0, rng, &state);
    return out;
}

/// Value-only variant: the RGO is the n = 1 specialization of the
/// subsampled walk, i.e. a standard Metropolized random walk with the
/// exact filter on f(x) + ||x-v||^2/(2 eta).
inline WellcondResult sample_wellconditioned_zeroth(const FunctionOracle& f, const Vec& x_star,
                                                    double eps, RngStream& rng,
                                                    double reduction_constant = 4.0,
                                                    const MrwOptions& mrw_opts = {}) {
    require(eps > 0.0 && eps < 1.0, "sample_wellconditioned_zeroth: eps in (0, 1)");
    const ProblemMeta& meta = f.meta();
    double lk = log_kappa_clamped(meta.kappa());
    double eta = 1.0 / (8.0 * meta.L * meta.dim * lk);

    WellcondResult out;
    out.log_beta = log_warmness_gaussian_start(meta);
    double beta = std::exp(out.log_beta);

    ReductionConfig rc;
    rc.eta = eta;
    rc.beta = beta;
    rc.eps = eps;
    rc.constant_override = reduction_constant;
    rc.T = iteration_count(eta, meta.mu, beta, eps / 2.0, reduction_constant);
    out.T = rc.T;

    SamplerDiag* diag = &out.diag;
    RgoHandle rgo(
        [f, mrw_opts, diag](double lambda, const Vec& v, double tv_tol, RngStream& r) {
            diag->rgo_calls += 1;
            diag->tv_spent += tv_tol;
            return mrw_sample(add_quadratic(f, lambda, v), tv_tol, r, v, mrw_opts, diag);
        },
        eta, RgoExactness::approximate);

    Vec x0 = warm_start_gaussian(x_star, meta.L, rng);
    out.x = alternate_sample(rgo, meta.mu, rc, x0, rng);
    return out;
}

}  // namespace rgos
