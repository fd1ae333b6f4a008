#pragma once

#include <cmath>
#include "rgos/gaussian.hpp"
#include "rgos/optimize.hpp"
#include "rgos/oracle.hpp"
#include "rgos/reduction.hpp"
#include "rgos/wellcond.hpp"

// Composite sampler for exp(-f - g) with well-conditioned f and RGO access
// to g: the shared-minimizer reduction, the approximate-rejection outer
// loop, the alternating joint sampler with its ridge term, the y-step
// rejection sampler, and the accelerated composition.

namespace rgos {

struct CompositeProblem {
    FunctionOracle f;  // L-smooth, mu-strongly convex
    RgoHandle g;       // restricted Gaussian oracle for the composite part
    Vec x_star;        // minimizer of f + g
    double eps = 0.1;  // target total variation distance

    void validate() const {
        require(eps > 0.0 && eps < 1.0, "CompositeProblem: eps must lie in (0, 1)");
        require(x_star.size() == f.meta().dim, "CompositeProblem: x_star dimension mismatch");
    }
};

/// Parameters of the joint chain on (x, y): coupling eta, iteration count K,
/// the high-probability radius R_delta and the ridge coefficient eta L^2.
struct JointParams {
    double eta = 0.0;
    double delta = 0.0;
    long long K = 0;
    double omega_radius = 0.0;    // R_delta
    double ridge = 0.0;           // coefficient of ||x - x*||^2 / 2
    double ysample_radius = 0.0;  // in-region bound for the y-step sampler
    double ck = 100.0;

    static JointParams make(const ProblemMeta& meta, double delta, double ck = 100.0) {
        require(delta > 0.0 && delta < 1.0, "JointParams: delta must lie in (0, 1)");
        require(ck > 0.0, "JointParams: ck must be positive");
        double kappa = meta.kappa();
        double lk = std::log(16.0 * kappa / delta);
        JointParams p;
        p.delta = delta;
        p.ck = ck;
        p.eta = 1.0 / (32.0 * meta.L * kappa * meta.dim * lk);
        p.omega_radius = 4.0 * std::sqrt(meta.dim * lk / meta.mu);
        p.ridge = p.eta * meta.L * meta.L;
        p.ysample_radius = std::sqrt(kappa * meta.dim * lk) * p.omega_radius;
        p.K = static_cast<long long>(
            std::ceil(ck / (p.eta * meta.mu) *
                      std::log(meta.dim * std::log(16.0 * kappa) / (4.0 * delta))));
        p.validate(meta);
        return p;
    }

    void validate(const ProblemMeta& meta) const {
        require(eta * meta.L <= 1.0, "JointParams: eta L must be <= 1");
        require(eta * meta.L * meta.L * omega_radius * omega_radius <= 0.5 + 1e-12,
                "JointParams: eta L^2 R^2 must be <= 1/2");
        require(400.0 * meta.dim * meta.dim * eta <= omega_radius * omega_radius,
                "JointParams: 400 d^2 eta must be <= R^2");
        require(K >= 1, "JointParams: K must be >= 1");
    }
};

/// y-step sampler: exact rejection with proposal N(x - eta grad f(x), eta I)
/// and acceptance exp(f(x) + <grad f(x), y-x> - f(y)) while x stays in the
/// high-probability region, Metropolized fallback at tolerance delta outside.
inline Vec ysample(const FunctionOracle& f, const Vec& x, const Vec& x_star, double eta,
                   double delta, const JointParams& params, RngStream& rng,
                   SamplerDiag* diag = nullptr, int max_rounds = 100000) {
    if ((x - x_star).norm() <= params.ysample_radius) {
        Vec gx = f.gradient(x);
        double fx = f.value(x);
        Vec mean = x - eta * gx;
        for (int round = 0; round < max_rounds; ++round) {
            Vec y = sample_gaussian(rng, mean, eta);
            double log_acc = fx + gx.dot(y - x) - f.value(y);
            if (log_acc > 1e-9)
                throw AnomalyError("ysample: acceptance ratio above 1 (log=" +
                                   std::to_string(log_acc) + ")");
            if (diag) diag->rejection_rounds += 1;
            if (std::log(rng.uniform()) <= log_acc) return y;
        }
        throw AnomalyError("ysample: rejection round cap exceeded");
    }
    if (diag) diag->gate_failures += 1;
    return metropolized_fallback(add_quadratic(f, eta, x), delta, rng, x, diag);
}

/// Unbiased estimator of the density ratio p(x)/p_hat(x) between the target
/// and the x-marginal of the joint chain, computed in log space and
/// exponentiated at the end. Draws one y ~ pi_x internally.
inline double theta_estimator(const FunctionOracle& f, const RgoHandle& g, const Vec& x,
                              const Vec& x_star, const JointParams& params, RngStream& rng,
                              SamplerDiag* diag = nullptr) {
    const double eta = params.eta;
    const double L = f.meta().L;
    const int d = f.meta().dim;
    Vec y = ysample(f, x, x_star, eta, params.delta, params, rng, diag);

    // E_y[exp(f(y) - <grad f(x), y-x> - (L/2)||y-x||^2 + ...)] carries the
    // factor exp(+eta/(2(1+eta L))||grad f(x)||^2), so the prefix below needs
    // the negative sign for E[theta] = p(x)/p_hat(x); on exact quadratics the
    // estimator collapses to the ratio with zero variance.
    Vec gx = f.gradient(x);
    double gval = g.has_value() ? g.value(x) : 0.0;
    double log_theta = -f.value(x) - gval -
                       eta / (2.0 * (1.0 + eta * L)) * gx.squaredNorm() +
                       0.5 * d * std::log1p(eta * L) + f.value(y) - gx.dot(y - x) -
                       0.5 * L * (y - x).squaredNorm() + gval +
                       0.5 * params.ridge * (x - x_star).squaredNorm();
    if (log_theta > 500.0)
        throw AnomalyError("theta_estimator: log-space overflow (log theta=" +
                           std::to_string(log_theta) + "); x is far out of region");
    return std::exp(log_theta);
}

/// Alternating joint sampler: x0 from the pi_start RGO call, then K rounds
/// of { y ~ ysample; x ~ RGO on the merged coupling+ridge quadratic }.
/// Returns x_K, within delta TV of the x-marginal of the joint law.
inline Vec sample_joint_dist(const FunctionOracle& f, const RgoHandle& g, const Vec& x_star,
                             double delta, const JointParams& params, RngStream& rng,
                             SamplerDiag* diag = nullptr) {
    const ProblemMeta& meta = f.meta();
    const double eta = params.eta;
    const double L = meta.L;
    // start density: exp(-(L + eta L^2)/2 ||x - x*||^2 - g(x))
    double lambda_start = 1.0 / (L + params.ridge);
    Vec x = g.sample(lambda_start, x_star, 0.0, rng);
    if (diag) diag->rgo_calls += 1;

    double ysample_tol =
        delta / (2.0 * static_cast<double>(params.K) * meta.dim *
                 std::log(meta.dim * meta.kappa() / delta));
    double lambda_ridge = 1.0 / params.ridge;
    for (long long k = 0; k < params.K; ++k) {
        Vec y = ysample(f, x, x_star, eta, ysample_tol, params, rng, diag);
        auto [lambda_m, v_m] = combine_quadratics(eta, y, lambda_ridge, x_star);
        x = g.sample(lambda_m, v_m, 0.0, rng);
        if (diag) diag->rgo_calls += 1;
    }
    return x;
}

struct CompositeOptions {
    double ck = 100.0;  // iteration constant of the joint chain
    int max_outer_rounds = 64;
};

struct CompositeResult {
    Vec x;
    SamplerDiag diag;
    int outer_rounds = 0;       // sample_joint_dist calls
    double theta_max = 0.0;     // largest estimator value seen inside Omega
    std::uint64_t omega_rejections = 0;
};

/// Approximate rejection sampling outer loop for shared-minimizer f, g:
/// draw from the joint chain at delta = eps/18, accept inside Omega with
/// probability theta_hat / 4.
inline CompositeResult composite_sample_shared_min(const CompositeProblem& prob, RngStream& rng,
                                                   const CompositeOptions& opts = {}) {
    prob.validate();
    const ProblemMeta& meta = prob.f.meta();
    const double delta = prob.eps / 18.0;
    JointParams params = JointParams::make(meta, delta, opts.ck);

    CompositeResult out;
    for (int round = 0; round < opts.max_outer_rounds; ++round) {
        Vec x = sample_joint_dist(prob.f, prob.g, prob.x_star, delta, params, rng, &out.diag);
        out.outer_rounds += 1;
        if ((x - prob.x_star).norm() > params.omega_radius) {
            out.omega_rejections += 1;
            continue;
        }
        double theta = theta_estimator(prob.f, prob.g, x, prob.x_star, params, rng, &out.diag);
        if (theta > 4.0 * (1.0 + 1e-9))
            throw AnomalyError("composite_sample_shared_min: theta estimator " +
                               std::to_string(theta) + " exceeds its bound of 4 inside Omega");
        out.theta_max = std::max(out.theta_max, theta);
        if (rng.uniform_halfopen() <= theta / 4.0) {
            out.x = x;
            return out;
        }
    }
    throw AnomalyError("composite_sample_shared_min: acceptance round cap " +
                       std::to_string(opts.max_outer_rounds) + " exceeded");
}

/// Full composite sampler: shift f and g to a shared minimizer, then run
/// the shared-minimizer scheme.
inline CompositeResult composite_sample(const CompositeProblem& prob, RngStream& rng,
                                        const CompositeOptions& opts = {}) {
    prob.validate();
    auto [f_shift, g_shift] = shift_to_shared_min(prob.f, prob.g, prob.x_star);
    CompositeProblem shifted{std::move(f_shift), std::move(g_shift), prob.x_star, prob.eps};
    return composite_sample_shared_min(shifted, rng, opts);
}

struct AcceleratedOptions {
    double ck = 100.0;
    double reduction_constant = 4.0;
    double opt_tol_factor = 1e-8;
    int max_outer_rounds = 64;
};

struct AcceleratedResult {
    Vec x;
    SamplerDiag diag;
    int T = 0;
};

/// Accelerated composition: the reduction loop at eta = 1/L over f + g,
/// where each RGO call is served by the composite sampler on the
/// well-conditioned part f(x) + (L/2)||x - v||^2 (condition number <= 2)
/// with composite part g. Requires a proximal oracle on g to locate each
/// subproblem's minimizer.
inline AcceleratedResult accelerated_composite_sample(const CompositeProblem& prob,
                                                      RngStream& rng,
                                                      const AcceleratedOptions& opts = {}) {
    prob.validate();
    if (!prob.g.has_prox())
        throw UnsupportedError(
            "accelerated_composite_sample: g must carry a proximal oracle");
    const ProblemMeta& meta = prob.f.meta();
    const double L = meta.L;
    const double eta = 1.0 / L;

    AcceleratedResult out;
    double beta = std::exp(log_warmness_gaussian_start(meta));
    ReductionConfig rc;
    rc.eta = eta;
    rc.beta = beta;
    rc.eps = prob.eps;
    rc.constant_override = opts.reduction_constant;
    rc.T = iteration_count(eta, meta.mu, beta, prob.eps / 2.0, opts.reduction_constant);
    out.T = rc.T;

    const FunctionOracle& f = prob.f;
    const RgoHandle& g = prob.g;
    SamplerDiag* diag = &out.diag;
    CompositeOptions inner_opts;
    inner_opts.ck = opts.ck;
    inner_opts.max_outer_rounds = opts.max_outer_rounds;
    double opt_tol = opts.opt_tol_factor * std::sqrt(2.0 * L);

    RgoHandle outer_rgo(
        [f, g, diag, inner_opts, opt_tol](double lambda, const Vec& v, double tv_tol,
                                          RngStream& r) {
            FunctionOracle f_sub = add_quadratic(f, lambda, v);
            Vec x_sub = prox_grad_minimize(f_sub, [g](double l, const Vec& c) {
                            return g.prox(l, c);
                        }, v, opt_tol).x;
            CompositeProblem sub{std::move(f_sub), g, x_sub, std::max(tv_tol, 1e-9)};
            CompositeResult res = composite_sample(sub, r, inner_opts);
            diag->merge(res.diag);
            diag->tv_spent += tv_tol;
            return res.x;
        },
        eta, RgoExactness::approximate);

    Vec x0 = warm_start_composite(prob.x_star, L, prob.g, rng);
    out.x = alternate_sample(outer_rgo, meta.mu, rc, x0, rng);
    return out;
}

}  // namespace rgos
