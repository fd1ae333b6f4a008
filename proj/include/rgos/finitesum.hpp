#pragma once

#include <cmath>
#include <vector>
#include "rgos/gaussian.hpp"
#include "rgos/optimize.hpp"
#include "rgos/oracle.hpp"
#include "rgos/reduction.hpp"
#include "rgos/types.hpp"

// Zeroth-order finite-sum sampler: the Metropolized random walk with a
// subsampled square-root filter, the exact reference walk it approximates,
// and the compositions that precompute minimizers with SVRG and bootstrap
// the walk through the reduction loop.

namespace rgos {

/// Multipliers on the concentration constants that size the step and the
/// subsampling rate. c_h scales the step bound and must stay <= 1.
struct MrwConstants {
    double c_h = 1.0;
    double c_K = 1.0;
    double c_R = 1.0;
    double c_x = 1.0;
    double c_xi = 1.0;
    double c_p = 5.0;
};

struct MrwParams {
    double h = 0.0;
    double p = 1.0;
    long long K = 1;
    int cap = 0;        // reject when |S| exceeds floor(2 p n)
    double delta = 0.0;
    double c_x = 0.0, c_xi = 0.0, r_x = 0.0;  // constants behind the h bound
    double r_omega = 0.0;

    /// Step-size bound h <= 1 / (98 C_x^2 L^2 R_x^2 + 7 L C_xi^2 d).
    static double h_bound(double L, int d, double c_x, double c_xi, double r_x) {
        return 1.0 / (98.0 * c_x * c_x * L * L * r_x * r_x + 7.0 * L * c_xi * c_xi * d);
    }

    static MrwParams from_meta(const ProblemMeta& meta, int n, double eps,
                               const MrwConstants& c = {}) {
        require(eps > 0.0 && eps < 1.0, "MrwParams: eps must lie in (0, 1)");
        require(c.c_h > 0.0 && c.c_h <= 1.0, "MrwParams: c_h must lie in (0, 1]");
        const double kappa = meta.kappa();
        const int d = meta.dim;
        const double lg = std::max(std::log(n * kappa * d / eps), 1.0);

        MrwParams prm;
        prm.delta = eps / 2.0;
        prm.K = std::max<long long>(
            1, static_cast<long long>(std::ceil(c.c_K * kappa * kappa * d * lg * lg * lg)));
        prm.p = std::min(1.0, c.c_p * std::log(12.0 * prm.K / prm.delta) / n);
        prm.cap = static_cast<int>(std::floor(2.0 * prm.p * n));
        prm.c_xi = c.c_xi * (1.0 + std::sqrt(std::log(prm.K / prm.delta) / d));
        prm.c_x = c.c_x * std::sqrt(std::log(n * prm.K / prm.delta));
        prm.r_x = c.c_R * std::sqrt(d * std::log(kappa * prm.K / prm.delta) / meta.mu);
        prm.r_omega = c.c_R * std::sqrt(d * std::max(std::log(kappa / eps), 1.0) / meta.mu);
        prm.h = c.c_h * h_bound(meta.L, d, prm.c_x, prm.c_xi, prm.r_x);
        prm.validate(meta);
        return prm;
    }

    void validate(const ProblemMeta& meta) const {
        require(h > 0.0 && h <= h_bound(meta.L, meta.dim, c_x, c_xi, r_x) * (1.0 + 1e-12),
                "MrwParams: h violates the step bound for the configured constants");
        require(p > 0.0 && p <= 1.0, "MrwParams: p must lie in (0, 1]");
        require(K >= 1, "MrwParams: K must be >= 1");
    }
};

/// Outcome of one subsampled filter evaluation.
struct FilterDecision {
    double gamma = 1.0;
    std::vector<int> subset;
    bool accepted = false;
    bool capped = false;          // |S| > cap forced the rejection
    bool guard_tripped = false;   // a filter factor was nonpositive
};

/// Each index included independently with probability p.
inline std::vector<int> subsample_indices(int n, double p, RngStream& rng) {
    require(p >= 0.0 && p <= 1.0, "subsample_indices: p must lie in [0, 1]");
    std::vector<int> s;
    if (p == 0.0) return s;
    for (int i = 0; i < n; ++i) {
        if (p == 1.0 || rng.uniform_halfopen() < p) s.push_back(i);
    }
    return s;
}

/// Product estimator of sqrt(exp(-F(y) + F(x))) over the subset S:
///   prod_{i in S} [ (1/p)(sqrt(exp(-f_i(y)/n + f_i(x)/n)) - 1) + 1 ],
/// each factor via expm1, the product in log space with sign tracking.
/// Queries 2|S| summand values and nothing else.
inline double gamma_estimator(const FiniteSumOracle& fs, const Vec& x, const Vec& y,
                              const std::vector<int>& subset, double p,
                              bool* guard_tripped = nullptr) {
    require(p > 0.0 && p <= 1.0, "gamma_estimator: p must lie in (0, 1]");
    const int n = fs.n();
    double log_abs = 0.0;
    double sign = 1.0;
    if (guard_tripped) *guard_tripped = false;
    for (int i : subset) {
        double a = (fs.summand_value(i, x) - fs.summand_value(i, y)) / n;
        double factor = 1.0 + std::expm1(0.5 * a) / p;
        if (!std::isfinite(factor))
            throw AnomalyError("gamma_estimator: non-finite filter factor");
        if (factor == 0.0) return 0.0;
        if (factor < 0.0) {
            sign = -sign;
            factor = -factor;
            if (guard_tripped) *guard_tripped = true;
        }
        log_abs += std::log(factor);
    }
    return sign * std::exp(log_abs);
}

struct MrwDiag {
    long long iterations = 0;
    long long accepted = 0;
    long long cap_rejections = 0;
    long long guard_warnings = 0;
    std::uint64_t max_queries_per_iteration = 0;
};

/// One filter evaluation given the proposal and threshold; skips all value
/// queries when the subset cap already forces rejection.
inline FilterDecision finitesum_mrw_filter(const FiniteSumOracle& fs, const Vec& x,
                                           const Vec& y, double p, int cap, double tau,
                                           RngStream& rng) {
    FilterDecision dec;
    dec.subset = subsample_indices(fs.n(), p, rng);
    if (static_cast<int>(dec.subset.size()) > cap) {
        dec.capped = true;
        return dec;
    }
    dec.gamma = gamma_estimator(fs, x, y, dec.subset, p, &dec.guard_tripped);
    if (dec.guard_tripped) return dec;  // reject; h is outside its regime
    dec.accepted = tau <= 0.75 * dec.gamma;
    return dec;
}

/// Subsampled Metropolized random walk: K iterations of propose, subsample,
/// filter. Never evaluates the full objective; per-iteration summand value
/// queries are at most 2 cap <= 4 p n.
inline Vec finitesum_mrw(const FiniteSumOracle& fs, const MrwParams& prm, const Vec& x0,
                         RngStream& rng, MrwDiag* diag = nullptr) {
    prm.validate(fs.meta());
    Vec x = x0;
    for (long long k = 0; k < prm.K; ++k) {
        std::uint64_t q0 = fs.summand_value_queries();
        Vec xi(x.size());
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = standard_normal(rng);
        Vec y = x + std::sqrt(2.0 * prm.h) * xi;
        double tau = rng.uniform_halfopen();
        FilterDecision dec = finitesum_mrw_filter(fs, x, y, prm.p, prm.cap, tau, rng);
        if (dec.accepted) x = y;
        if (diag) {
            diag->iterations += 1;
            diag->accepted += dec.accepted ? 1 : 0;
            diag->cap_rejections += dec.capped ? 1 : 0;
            diag->guard_warnings += dec.guard_tripped ? 1 : 0;
            diag->max_queries_per_iteration = std::max(
                diag->max_queries_per_iteration, fs.summand_value_queries() - q0);
        }
    }
    return x;
}

/// Exact modified filter: alpha as a function of sqrt(exp(-F(y))/exp(-F(x))),
/// i.e. of its logarithm log_sqrt_ratio = (F(x) - F(y))/2.
inline double inefficient_mrw_alpha(double log_sqrt_ratio) {
    static const double log43 = std::log(4.0 / 3.0);
    if (log_sqrt_ratio > log43) return 1.0;
    if (log_sqrt_ratio >= -log43) return 0.75 * std::exp(log_sqrt_ratio);
    return std::exp(2.0 * log_sqrt_ratio);
}

/// One exact step of the modified Metropolized walk, with the proposal noise
/// and threshold supplied so coupled runs can share them. F_value evaluates
/// the full average objective (test-only reference path).
inline Vec inefficient_mrw_step_shared(const std::function<double(const Vec&)>& F_value,
                                       const Vec& x, double h, const Vec& xi, double tau) {
    Vec y = x + std::sqrt(2.0 * h) * xi;
    double alpha = inefficient_mrw_alpha(0.5 * (F_value(x) - F_value(y)));
    return tau <= alpha ? y : x;
}

inline Vec inefficient_mrw_step(const std::function<double(const Vec&)>& F_value, const Vec& x,
                                double h, RngStream& rng) {
    Vec xi(x.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = standard_normal(rng);
    double tau = rng.uniform_halfopen();
    return inefficient_mrw_step_shared(F_value, x, h, xi, tau);
}

struct CoupledRunResult {
    Vec x_subsampled;
    Vec x_reference;
    bool diverged = false;
};

/// Run the subsampled walk and the exact reference walk for K steps with
/// shared proposal noise and shared thresholds, from a common start.
inline CoupledRunResult coupled_mrw_run(const FiniteSumOracle& fs,
                                        const std::function<double(const Vec&)>& F_value,
                                        const MrwParams& prm, const Vec& x0, RngStream& rng) {
    Vec xs = x0, xr = x0;
    bool diverged = false;
    for (long long k = 0; k < prm.K; ++k) {
        Vec xi(x0.size());
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = standard_normal(rng);
        double tau = rng.uniform_halfopen();

        Vec ys = xs + std::sqrt(2.0 * prm.h) * xi;
        FilterDecision dec = finitesum_mrw_filter(fs, xs, ys, prm.p, prm.cap, tau, rng);
        if (dec.accepted) xs = ys;
        xr = inefficient_mrw_step_shared(F_value, xr, prm.h, xi, tau);
        if ((xs - xr).norm() > 0.0) diverged = true;
    }
    return {xs, xr, diverged};
}

struct FiniteSumResult {
    Vec x;
    MrwParams params;
    MrwDiag diag;
    std::uint64_t summand_value_queries = 0;
    std::uint64_t summand_gradient_queries = 0;
};

/// Full zeroth-order pipeline: warm start N(x*, I/L), then the subsampled
/// walk at its conditioning-derived step, horizon and subsampling rate.
inline FiniteSumResult sample_finitesum(const FiniteSumOracle& fs, const Vec& x_star,
                                        double eps, RngStream& rng,
                                        const MrwConstants& consts = {}) {
    std::uint64_t v0 = fs.summand_value_queries();
    std::uint64_t g0 = fs.summand_gradient_queries();
    FiniteSumResult out;
    out.params = MrwParams::from_meta(fs.meta(), fs.n(), eps, consts);
    Vec x0 = warm_start_gaussian(x_star, fs.meta().L, rng);
    out.x = finitesum_mrw(fs, out.params, x0, rng, &out.diag);
    out.summand_value_queries = fs.summand_value_queries() - v0;
    out.summand_gradient_queries = fs.summand_gradient_queries() - g0;
    return out;
}

struct AccelFsOptions {
    double reduction_constant = 4.0;
    MrwConstants mrw;
    double opt_tol_factor = 1e-8;
    SvrgOptions svrg;
};

struct AccelFsResult {
    Vec x;
    int T = 0;
    double eta = 0.0;
    std::uint64_t summand_value_queries = 0;
    std::uint64_t summand_gradient_queries = 0;
    double inner_kappa = 0.0;
};

/// Reduction loop over F with eta = max(1/L, sqrt(n/(L^2 d log^3(n kappa d/eps)))).
/// Each RGO call regularizes every summand by the coupling ridge, finds the
/// subproblem minimizer with SVRG, and runs the subsampled walk on the
/// regularized problem, whose condition number is at most 1 + eta L.
inline AccelFsResult accelerated_finitesum_sample(const FiniteSumOracle& fs, double eps,
                                                  RngStream& rng,
                                                  const AccelFsOptions& opts = {},
                                                  const Vec* x_star_hint = nullptr) {
    require(eps > 0.0 && eps < 1.0, "accelerated_finitesum_sample: eps in (0, 1)");
    const ProblemMeta& meta = fs.meta();
    const double L = meta.L;
    const int d = meta.dim;
    const int n = fs.n();
    const double lg = std::max(std::log(n * meta.kappa() * d / eps), 1.0);

    std::uint64_t v0 = fs.summand_value_queries();
    std::uint64_t g0 = fs.summand_gradient_queries();

    AccelFsResult out;
    out.eta = std::max(1.0 / L, std::sqrt(n / (L * L * d * lg * lg * lg)));
    double opt_tol = opts.opt_tol_factor * std::sqrt(L);

    Vec start = x_star_hint ? *x_star_hint : Vec::Zero(d);
    Vec x_star = svrg_minimize(fs, start, opt_tol, rng, opts.svrg).x;

    double beta = std::exp(log_warmness_gaussian_start(meta));
    ReductionConfig rc;
    rc.eta = out.eta;
    rc.beta = beta;
    rc.eps = eps;
    rc.constant_override = opts.reduction_constant;
    rc.T = iteration_count(out.eta, meta.mu, beta, eps / 2.0, opts.reduction_constant);
    out.T = rc.T;

    double eta = out.eta;
    const MrwConstants walk_consts = opts.mrw;
    const SvrgOptions svrg_opts = opts.svrg;
    double* inner_kappa = &out.inner_kappa;
    RgoHandle rgo(
        [fs, eta, opt_tol, walk_consts, svrg_opts, inner_kappa](double lambda, const Vec& v,
                                                       double tv_tol, RngStream& r) {
            FiniteSumOracle reg = add_quadratic(fs, lambda, v);
            *inner_kappa = reg.meta().kappa();
            Vec x_sub = svrg_minimize(reg, v, opt_tol, r, svrg_opts).x;
            return sample_finitesum(reg, x_sub, std::max(tv_tol, 1e-9), r, walk_consts).x;
        },
        out.eta, RgoExactness::approximate);

    Vec x0 = warm_start_gaussian(x_star, L, rng);
    out.x = alternate_sample(rgo, meta.mu, rc, x0, rng);
    out.summand_value_queries = fs.summand_value_queries() - v0;
    out.summand_gradient_queries = fs.summand_gradient_queries() - g0;
    return out;
}

}  // namespace rgos
