#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>
#include "rgos/composite.hpp"
#include "rgos/finitesum.hpp"
#include "rgos/optimize.hpp"
#include "rgos/report.hpp"
#include "rgos/wellcond.hpp"

// Chain fan-out and the sampler pipelines behind the CLI. All randomness is
// derived from (seed, chain-index) streams, so the worker count never
// changes results.

namespace rgos {

inline int worker_count() {
    if (const char* env = std::getenv("RGOS_WORKERS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(chain_index) for every chain on a small worker pool; results are
/// collected by index.
template <typename Fn>
void parallel_chains(int chains, Fn&& fn) {
    int workers = std::min(worker_count(), chains);
    if (workers <= 1) {
        for (int i = 0; i < chains; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < chains; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline const std::vector<std::string>& sampler_names() {
    static const std::vector<std::string> names = {
        "wellcond",  "wellcond_zeroth", "composite",       "composite_accel",
        "finitesum", "finitesum_accel", "reduction_direct"};
    return names;
}

/// Compatibility matrix between sampler pipelines and model kinds.
inline void check_compatibility(const std::string& sampler, const ModelSpec& model) {
    auto is = [&](const char* s) { return sampler == s; };
    bool smooth_only = model.kind == ModelKind::gaussian || model.kind == ModelKind::custom_1d;
    bool composite_kind = model.kind == ModelKind::gaussian ||
                          model.kind == ModelKind::box_gaussian ||
                          model.kind == ModelKind::lasso_gaussian;
    bool finitesum_kind = model.kind == ModelKind::logistic_finitesum;

    bool known = false;
    for (const auto& n : sampler_names()) known = known || n == sampler;
    if (!known) throw ConfigError("unknown sampler '" + sampler + "'");
    if ((is("wellcond") || is("wellcond_zeroth")) && !smooth_only)
        throw ConfigError("sampler '" + sampler + "' needs a smooth model (gaussian/custom_1d)");
    if ((is("composite") || is("composite_accel")) && !composite_kind)
        throw ConfigError("sampler '" + sampler + "' needs a composite-capable model");
    if ((is("finitesum") || is("finitesum_accel")) && !finitesum_kind)
        throw ConfigError("sampler '" + sampler + "' needs a finite-sum model");
    if (is("reduction_direct") && !composite_kind)
        throw ConfigError("reduction_direct needs a model with an exact total RGO");
}

struct RunOutput {
    RunReport report;
    std::vector<Vec> samples;
};

/// Execute the configured pipeline: one sample per chain, derived streams,
/// per-chain forked counters aggregated into the report.
inline RunOutput run_chains(const RunConfig& cfg) {
    check_compatibility(cfg.sampler, cfg.model);
    require(cfg.eps > 0.0 && cfg.eps < 1.0, "run: eps must lie in (0, 1)");
    require(cfg.chains >= 1, "run: chains must be >= 1");

    Model model = build_model(cfg.model);
    RunOutput out;
    out.report.sampler = cfg.sampler;
    out.report.model = model_kind_name(cfg.model.kind);
    out.report.chains = cfg.chains;
    out.report.seed = cfg.seed;
    out.report.eps = cfg.eps;
    out.samples.assign(cfg.chains, Vec());

    struct ChainTally {
        SamplerDiag diag;
        std::uint64_t value = 0, gradient = 0, sum_value = 0, sum_gradient = 0;
        double tv = 0.0;
        long long iters = 0, accepted = 0;
        std::string anomaly;
    };
    std::vector<ChainTally> tallies(cfg.chains);

    // minimizer of the full negative log-density (precomputation step)
    Vec x_star;
    std::uint64_t precompute_grads = 0;
    out.report.opt_tol = cfg.constants.opt_tol;
    if (cfg.model.kind == ModelKind::logistic_finitesum) {
        RngStream opt_rng(cfg.seed, 0xFFFF);
        auto opt =
            svrg_minimize(*model.fs, Vec::Zero(model.meta.dim), cfg.constants.opt_tol, opt_rng);
        x_star = opt.x;
        precompute_grads = opt.gradient_queries;
    } else if (cfg.model.kind == ModelKind::custom_1d) {
        x_star = agd_minimize(model.f, Vec::Zero(1), cfg.constants.opt_tol).x;
    } else {
        x_star = model.x_star;
    }

    auto one_chain = [&](int idx) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(idx) + 1);
        ChainTally& t = tallies[idx];
        FunctionOracle f = model.f.fork_counters();
        RgoHandle g = model.g.fork_counters();
        try {
            if (cfg.sampler == "wellcond") {
                auto res = sample_wellconditioned(f, x_star, cfg.eps, rng,
                                                  cfg.constants.reduction_constant);
                out.samples[idx] = res.x;
                t.diag = res.diag;
                t.iters = res.T;
            } else if (cfg.sampler == "wellcond_zeroth") {
                auto fv = FunctionOracle::value_only(
                    [f](const Vec& x) { return f.value(x); }, model.meta);
                auto res = sample_wellconditioned_zeroth(fv, x_star, cfg.eps, rng,
                                                         cfg.constants.reduction_constant);
                out.samples[idx] = res.x;
                t.diag = res.diag;
                t.iters = res.T;
            } else if (cfg.sampler == "composite") {
                CompositeProblem prob{f, g, x_star, cfg.eps};
                CompositeOptions opts;
                opts.ck = cfg.constants.ck;
                auto res = composite_sample(prob, rng, opts);
                out.samples[idx] = res.x;
                t.diag = res.diag;
                t.iters = res.outer_rounds;
                t.accepted = 1;  // one accepted draw per chain
            } else if (cfg.sampler == "composite_accel") {
                CompositeProblem prob{f, g, x_star, cfg.eps};
                AcceleratedOptions opts;
                opts.ck = cfg.constants.ck;
                opts.reduction_constant = cfg.constants.reduction_constant;
                auto res = accelerated_composite_sample(prob, rng, opts);
                out.samples[idx] = res.x;
                t.diag = res.diag;
                t.iters = res.T;
            } else if (cfg.sampler == "finitesum") {
                auto fs = model.fs->fork_counters();
                auto res = sample_finitesum(fs, x_star, cfg.eps, rng, cfg.constants.mrw);
                out.samples[idx] = res.x;
                t.iters = res.diag.iterations;
                t.accepted = res.diag.accepted;
                t.sum_value = res.summand_value_queries;
                t.sum_gradient = res.summand_gradient_queries;
            } else if (cfg.sampler == "finitesum_accel") {
                auto fs = model.fs->fork_counters();
                AccelFsOptions opts;
                opts.reduction_constant = cfg.constants.reduction_constant;
                opts.mrw = cfg.constants.mrw;
                auto res = accelerated_finitesum_sample(fs, cfg.eps, rng, opts, &x_star);
                out.samples[idx] = res.x;
                t.iters = res.T;
                t.sum_value = res.summand_value_queries;
                t.sum_gradient = res.summand_gradient_queries;
            } else {  // reduction_direct
                const double L = model.meta.L;
                double eta =
                    cfg.constants.eta_direct > 0.0 ? cfg.constants.eta_direct : 1.0 / L;
                double beta = std::exp(log_warmness_gaussian_start(model.meta));
                ReductionConfig rc;
                rc.eta = eta;
                rc.beta = beta;
                rc.eps = cfg.eps;
                rc.constant_override = cfg.constants.reduction_constant;
                rc.T = iteration_count(eta, model.meta.mu, beta, cfg.eps / 2.0,
                                       rc.constant_override);
                RgoHandle total = model.rgo_total.fork_counters();
                Vec x0 = warm_start_composite(x_star, L, g, rng);
                ChainState state;
                out.samples[idx] = alternate_sample(total, model.meta.mu, rc, x0, rng, &state);
                t.tv = state.tv_budget_spent;
                t.iters = rc.T;
                t.diag.rgo_calls = total.counters().rgo_calls.load();
            }
            t.value = f.counters().value_queries.load();
            t.gradient = f.counters().gradient_queries.load();
            t.tv = std::max(t.tv, t.diag.tv_spent);
        } catch (const std::exception& e) {
            t.anomaly = e.what();
            out.samples[idx] = Vec::Zero(model.meta.dim);
        }
    };
    parallel_chains(cfg.chains, one_chain);

    RunReport& rep = out.report;
    long long acc_total = 0;
    for (int i = 0; i < cfg.chains; ++i) {
        const ChainTally& t = tallies[i];
        rep.value_queries += t.value;
        rep.gradient_queries += t.gradient;
        rep.summand_value_queries += t.sum_value;
        rep.summand_gradient_queries += t.sum_gradient;
        rep.rgo_calls += t.diag.rgo_calls;
        rep.rejection_rounds += t.diag.rejection_rounds;
        rep.gate_failures += t.diag.gate_failures;
        rep.fallback_calls += t.diag.fallback_calls;
        rep.tv_budget_spent = std::max(rep.tv_budget_spent, t.tv);
        rep.iterations += t.iters;
        acc_total += t.accepted;
        if (!t.anomaly.empty())
            rep.anomalies.push_back("chain " + std::to_string(i) + ": " + t.anomaly);
    }
    rep.summand_gradient_queries += precompute_grads;
    rep.log_warmness = log_warmness_gaussian_start(model.meta);
    rep.acceptance_rate =
        rep.iterations > 0 ? static_cast<double>(acc_total) / rep.iterations : 0.0;
    return out;
}

/// Full `run` operation: execute and persist CSV + JSON.
inline RunReport run(const RunConfig& cfg) {
    RunOutput out = run_chains(cfg);
    write_csv(cfg.samples_path, out.samples);
    json j = out.report;
    write_json(cfg.report_path, j);
    return out.report;
}

}  // namespace rgos
