#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>
#include "rgos/runner.hpp"

// Validation suites: exactness, rejection-round bounds, estimator checks,
// structural bounds, coupling, stationarity, scaling shapes, determinism.
// Each check is deterministic given the seed; a failing suite is rerun once
// with the next seed and the retry outcome is reported.

namespace rgos {
namespace validate_detail {

inline void add(RunReport& rep, const std::string& name, bool pass, double observed,
                double threshold, const std::string& detail = "") {
    rep.checks.push_back({name, pass, observed, threshold, detail});
}

inline FunctionOracle logistic_quadratic_oracle() {
    ModelSpec cs;
    cs.kind = ModelKind::custom_1d;
    cs.custom_name = "logistic_quadratic";
    return build_model(cs).f;
}

inline Model lasso_model_1d() {
    ModelSpec spec;
    spec.kind = ModelKind::lasso_gaussian;
    spec.dim = 1;
    spec.spectrum = {1.0};
    spec.center = {0.0};
    spec.l1_weight = 1.0;
    return build_model(spec);
}

inline FiniteSumOracle shifted_quadratic_sum(int n, double mu_total, RngStream gen,
                                             double curvature_spread = 0.5) {
    std::vector<FunctionOracle> parts;
    parts.reserve(n);
    for (int i = 0; i < n; ++i) {
        double s = mu_total * (1.0 - curvature_spread) +
                   2.0 * mu_total * curvature_spread * (static_cast<double>(i) / (n - 1));
        double c = sample_gaussian_1d(gen, 0.0, 1.0);
        parts.push_back(FunctionOracle(
            [s, c](const Vec& x) { return 0.5 * s * (x[0] - c) * (x[0] - c); },
            [s, c](const Vec& x) {
                Vec g(1);
                g[0] = s * (x[0] - c);
                return g;
            },
            ProblemMeta(std::max(s, 1e-12), std::max(s, 1e-12), 1)));
    }
    return FiniteSumOracle(std::move(parts), mu_total);
}

inline MrwConstants tuned_mrw_constants(const ProblemMeta& meta, int n, double eps,
                                        double relaxations, double c_scale = 0.35) {
    MrwConstants c;
    c.c_x = c_scale;
    c.c_xi = c_scale;
    c.c_R = c_scale;
    c.c_K = 1.0;
    MrwParams probe = MrwParams::from_meta(meta, n, eps, c);
    double relax = 1.0 / (probe.h * meta.mu * 0.7);
    double kappa = meta.kappa();
    double lg = std::max(std::log(n * kappa * meta.dim / eps), 1.0);
    c.c_K = std::max(1e-9, relaxations * relax / (kappa * kappa * meta.dim * lg * lg * lg));
    return c;
}

// ---------------------------------------------------------------- exactness

inline RunReport suite_exactness(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "exactness";
    rep.seed = seed;
    const int n = 100000;
    const double alpha = 0.01;

    {  // xsample on the 1d logistic-quadratic restriction
        auto f = logistic_quadratic_oracle();
        XSampleConfig cfg = XSampleConfig::from_meta(f.meta());
        RngStream rng(seed, 11);
        Vec y(1);
        y << 0.3;
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) draws[i] = xsample(f, y, cfg.eta, cfg, 1e-3, rng)[0];
        Quadrature1D q(
            [&](double x) {
                Vec v(1);
                v << x;
                return -f.value(v) - (x - y[0]) * (x - y[0]) / (2.0 * cfg.eta);
            },
            y[0] - 4.0, y[0] + 4.0, 4001);
        auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
        add(rep, "ks_xsample", ks.p_value > alpha, ks.p_value, alpha,
            "D=" + format_double(ks.statistic));
    }
    {  // ysample
        auto f = logistic_quadratic_oracle();
        auto p = JointParams::make(f.meta(), 0.01, 1.0);
        RngStream rng(seed, 12);
        Vec x(1), xs(1);
        x << 0.4;
        xs << 0.0;
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) draws[i] = ysample(f, x, xs, p.eta, p.delta, p, rng)[0];
        double hw = 12.0 * std::sqrt(p.eta);
        Quadrature1D q(
            [&](double yv) {
                Vec v(1);
                v << yv;
                return -f.value(v) - (yv - x[0]) * (yv - x[0]) / (2.0 * p.eta);
            },
            x[0] - hw, x[0] + hw, 4001);
        auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
        add(rep, "ks_ysample", ks.p_value > alpha, ks.p_value, alpha,
            "D=" + format_double(ks.statistic));
    }
    {  // truncated Gaussian RGO
        RngStream rng(seed, 13);
        TruncatedGaussian1D tg{5.0, 1.0, -1.0, 1.0};
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) draws[i] = sample_truncated_gaussian_1d(rng, tg);
        Quadrature1D q([](double x) { return -0.5 * (x - 5.0) * (x - 5.0); }, -1.0, 1.0, 4001);
        auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
        add(rep, "ks_truncated_rgo", ks.p_value > alpha, ks.p_value, alpha,
            "D=" + format_double(ks.statistic));
    }
    {  // l1 RGO
        RngStream rng(seed, 14);
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) draws[i] = sample_l1_quadratic_1d(rng, 1.0, 0.5, 2.0);
        Quadrature1D q(
            [](double x) { return -(x - 1.0) * (x - 1.0) - 2.0 * std::fabs(x); }, -7.0, 8.0,
            8001);
        auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
        add(rep, "ks_l1_rgo", ks.p_value > alpha, ks.p_value, alpha,
            "D=" + format_double(ks.statistic));
    }
    {  // end-to-end well-conditioned sampler on the 1d logistic-quadratic target
        auto f = logistic_quadratic_oracle();
        RngStream opt(seed, 15);
        Vec x_star = agd_minimize(f, Vec::Zero(1), 1e-10).x;
        RngStream root(seed, 16);
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) {
            RngStream rng = root.substream(i);
            draws[i] = sample_wellconditioned(f, x_star, 0.05, rng, 2.0).x[0];
        }
        Quadrature1D q(
            [&](double x) {
                Vec v(1);
                v << x;
                return -f.value(v);
            },
            -6.0, 6.0, 4001);
        auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
        add(rep, "ks_wellcond_end_to_end", ks.p_value > alpha, ks.p_value, alpha,
            "D=" + format_double(ks.statistic));
    }
    {  // end-to-end composite sampler on the 1d lasso target
        auto model = lasso_model_1d();
        CompositeProblem prob{model.f, model.g, model.x_star, 0.1};
        CompositeOptions opts;
        opts.ck = 1.0;
        RngStream root(seed, 17);
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) {
            RngStream rng = root.substream(i);
            draws[i] = composite_sample_shared_min(prob, rng, opts).x[0];
        }
        Quadrature1D q([](double x) { return -0.5 * x * x - std::fabs(x); }, -9.0, 9.0, 4001);
        auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
        add(rep, "ks_composite_end_to_end", ks.p_value > alpha, ks.p_value, alpha,
            "D=" + format_double(ks.statistic));
    }
    return rep;
}

// ------------------------------------------------------------------- rounds

inline RunReport suite_rounds(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "rounds";
    rep.seed = seed;
    const int calls = 10000;

    {  // xsample under its gradient gate
        const int d = 10;
        auto f = FunctionOracle([](const Vec& x) { return 0.5 * x.squaredNorm(); },
                                [](const Vec& x) { return x; }, ProblemMeta(1.0, 0.1, d));
        XSampleConfig cfg = XSampleConfig::from_meta(f.meta());
        RngStream rng(seed, 21);
        SamplerDiag diag;
        Vec zero = Vec::Zero(d);
        for (int i = 0; i < calls; ++i) {
            Vec y = sample_gaussian(rng, zero, 1.0);
            xsample(f, y, cfg.eta, cfg, 1e-3, rng, &diag);
        }
        double mean_rounds = static_cast<double>(diag.rejection_rounds) / calls;
        double bound = 2.0 + 3.0 * std::sqrt(2.0 / calls);
        add(rep, "xsample_mean_rounds", mean_rounds <= bound, mean_rounds, bound,
            "gate_failures=" + std::to_string(diag.gate_failures));
    }
    {  // ysample at in-region points
        const int d = 4;
        auto f = FunctionOracle([](const Vec& x) { return x.squaredNorm(); },
                                [](const Vec& x) { return Vec(2.0 * x); },
                                ProblemMeta(2.0, 2.0, d));
        auto p = JointParams::make(f.meta(), 0.01, 1.0);
        RngStream rng(seed, 22);
        Vec xs = Vec::Zero(d);
        SamplerDiag diag;
        for (int i = 0; i < calls; ++i) {
            Vec x = sample_gaussian(rng, xs, 1.0 / f.meta().L);
            ysample(f, x, xs, p.eta, p.delta, p, rng, &diag);
        }
        double mean_rounds = static_cast<double>(diag.rejection_rounds) / calls;
        double bound = 2.0 + 3.0 * std::sqrt(2.0 / calls);
        add(rep, "ysample_mean_rounds", mean_rounds <= bound, mean_rounds, bound,
            "gate_failures=" + std::to_string(diag.gate_failures));
    }
    return rep;
}

// --------------------------------------------------------------- estimators

inline RunReport suite_estimators(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "estimators";
    rep.seed = seed;

    {  // subsampled filter estimator: unbiased for the square-root ratio
        RngStream gen(seed, 31);
        auto fs = shifted_quadratic_sum(5, 1.0, gen);
        RngStream rng(seed, 32);
        const double p = 0.5;
        bool all_ok = true;
        double worst = 0.0;
        for (int pair = 0; pair < 10; ++pair) {
            Vec x(1), y(1);
            x << sample_gaussian_1d(rng, 0.0, 1.0);
            y << x[0] + sample_gaussian_1d(rng, 0.0, 0.04);
            double truth = std::sqrt(std::exp(-fs.full_value(y) + fs.full_value(x)));
            const int reps = 20000;
            std::vector<double> vals(reps);
            for (int r = 0; r < reps; ++r) {
                auto s = subsample_indices(5, p, rng);
                vals[r] = gamma_estimator(fs, x, y, s, p);
            }
            auto st = summarize(vals);
            double slack = std::fabs(st.mean - truth) / (st.se_mean + 1e-300);
            worst = std::max(worst, slack);
            all_ok = all_ok && std::fabs(st.mean - truth) <= 3.0 * st.se_mean + 1e-12;
        }
        add(rep, "gamma_unbiased", all_ok, worst, 3.0, "max |mean-truth|/se over 10 pairs");
    }
    {  // gamma <= 4/3 whenever |S| <= 2pn in the valid-h regime
        RngStream gen(seed, 33);
        auto fs = shifted_quadratic_sum(5, 1.0, gen);
        MrwConstants honest;
        honest.c_K = 0.05;
        auto prm = MrwParams::from_meta(fs.meta(), fs.n(), 0.2, honest);
        RngStream rng(seed, 34);
        Vec x_star(1);
        x_star << 0.0;
        Vec x = x_star;
        double worst = 0.0;
        int checked = 0;
        bool ok = true;
        for (int k = 0; k < 20000; ++k) {
            Vec xi(1);
            xi[0] = standard_normal(rng);
            Vec y = x + std::sqrt(2.0 * prm.h) * xi;
            auto dec =
                finitesum_mrw_filter(fs, x, y, prm.p, prm.cap, rng.uniform_halfopen(), rng);
            bool cond = (x - x_star).norm() <= prm.r_x && xi.norm() <= prm.c_xi;
            for (int i = 0; cond && i < fs.n(); ++i) {
                Vec g = fs.summand_gradient(i, x);
                cond = std::fabs(g.dot(xi)) <= prm.c_x * g.norm();
            }
            if (cond && !dec.capped && !dec.guard_tripped) {
                ++checked;
                worst = std::max(worst, dec.gamma);
                ok = ok && dec.gamma <= 4.0 / 3.0 + 1e-9;
            }
            if (dec.accepted) x = y;
        }
        add(rep, "gamma_bound", ok && checked > 10000, worst, 4.0 / 3.0,
            "checked=" + std::to_string(checked));
    }
    {  // theta estimator unbiased against quadrature
        auto f = logistic_quadratic_oracle();
        auto model = lasso_model_1d();
        auto p = JointParams::make(f.meta(), 0.05 / 18.0, 1.0);
        RngStream rng(seed, 35);
        Vec x(1), xs(1);
        x << 0.8;
        xs << 0.0;
        const int reps = 100000;
        std::vector<double> vals(reps);
        for (int i = 0; i < reps; ++i) vals[i] = theta_estimator(f, model.g, x, xs, p, rng);
        auto st = summarize(vals);
        double hw = 12.0 * std::sqrt(p.eta);
        Quadrature1D zx(
            [&](double y) {
                Vec v(1);
                v << y;
                return -f.value(v) - (y - x[0]) * (y - x[0]) / (2.0 * p.eta);
            },
            x[0] - hw, x[0] + hw, 4001);
        double truth = std::exp(-f.value(x) + 0.5 * p.ridge * x.squaredNorm() +
                                0.5 * std::log(2.0 * M_PI * p.eta) - zx.log_normalizer());
        double slack = std::fabs(st.mean - truth) / st.se_mean;
        add(rep, "theta_unbiased", slack <= 3.0, slack, 3.0,
            "mean=" + format_double(st.mean) + " truth=" + format_double(truth));
    }
    {  // theta <= 4 inside Omega
        auto model = lasso_model_1d();
        auto p = JointParams::make(model.meta, 0.05 / 18.0, 1.0);
        RngStream rng(seed, 36);
        double worst = 0.0;
        int inside = 0;
        for (int i = 0; i < 10000; ++i) {
            Vec x = model.exact_sampler(rng);
            if ((x - model.x_star).norm() > p.omega_radius) continue;
            ++inside;
            worst = std::max(worst,
                             theta_estimator(model.f, model.g, x, model.x_star, p, rng));
        }
        add(rep, "theta_bound_in_omega", worst <= 4.0 && inside > 9000, worst, 4.0,
            "inside=" + std::to_string(inside));
    }
    return rep;
}

// --------------------------------------------------------------- structural

inline RunReport suite_structural(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "structural";
    rep.seed = seed;

    {  // normalization-ratio bound: equality on quadratics
        auto res = normratio_check([](double x) { return x * x; }, 2.0, 0.0, 0.7);
        bool pass = res.pass() && std::fabs(res.ratio - res.bound) / res.bound < 1e-6;
        add(rep, "normratio_quadratic_tight", pass, res.ratio, res.bound);
    }
    {  // strictly below the bound on the l1 model
        auto res = normratio_check([](double x) { return 0.5 * x * x + std::fabs(x); }, 1.0,
                                   0.0, 1.0);
        add(rep, "normratio_l1_strict", res.pass() && res.ratio < res.bound * 0.999,
            res.ratio, res.bound);
    }
    {  // mean-perturbation bound on log-cosh under its eta conditions
        auto f = [](double y) {
            double t = std::fabs(y);
            return 2.0 * (t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0));
        };
        bool all = true;
        double worst_rel = 0.0;
        for (double x : {0.3, 0.9, 1.4}) {
            auto res = min_perturb_check(f, 2.0, 0.0, x, 1.5);
            all = all && res.pass();
            worst_rel = std::max(worst_rel, res.deviation / res.bound);
        }
        add(rep, "min_perturb_logcosh", all, worst_rel, 1.0, "max deviation/bound");
    }
    {  // joint-law normalizer bracket and density-ratio sandwich (1d lasso)
        auto model = lasso_model_1d();
        const double L = model.meta.L, mu = model.meta.mu;
        auto p = JointParams::make(model.meta, 0.1 / 18.0, 1.0);
        double hw = 9.0;
        auto zy_at = [&](double x) {
            double ihw = 12.0 * std::sqrt(p.eta);
            Quadrature1D zy(
                [&](double y) {
                    Vec v(1);
                    v << y;
                    return -model.f.value(v) - (y - x) * (y - x) / (2.0 * p.eta);
                },
                x - ihw, x + ihw, 801);
            return zy.log_normalizer();
        };
        auto joint_marginal_log = [&](double x) {
            return -std::fabs(x) - 0.5 * p.ridge * x * x + zy_at(x);
        };
        Quadrature1D z_joint(joint_marginal_log, -hw, hw, 801);
        Quadrature1D z_pi([](double x) { return -0.5 * x * x - std::fabs(x); }, -hw, hw,
                          4001);
        double log_ratio = z_joint.log_normalizer() - z_pi.log_normalizer();
        double upper = 0.5 * std::log(2.0 * M_PI * p.eta);
        double lower = 0.5 * std::log(2.0 * M_PI * p.eta / (1.0 + p.eta * L)) -
                       0.5 * std::log(1.0 + p.eta * L * L / mu);
        add(rep, "normalizer_bracket",
            log_ratio >= lower - 1e-9 && log_ratio <= upper + 1e-9, log_ratio, upper,
            "lower=" + format_double(lower));

        bool sandwich = true;
        double worst_lo = 10.0, worst_hi = 0.0;
        for (int i = 0; i < 20; ++i) {
            double x = -0.95 * p.omega_radius +
                       1.9 * p.omega_radius * (static_cast<double>(i) / 19.0);
            double log_dpi = -0.5 * x * x - std::fabs(x) - z_pi.log_normalizer();
            double log_dpih = joint_marginal_log(x) - z_joint.log_normalizer();
            double r = std::exp(log_dpi - log_dpih);
            worst_lo = std::min(worst_lo, r);
            worst_hi = std::max(worst_hi, r);
            sandwich = sandwich && r >= 0.5 - 1e-9 && r <= 2.0 + 1e-9;
        }
        add(rep, "density_ratio_sandwich", sandwich, worst_hi, 2.0,
            "min=" + format_double(worst_lo));
    }
    (void)seed;
    return rep;
}

// ----------------------------------------------------------------- coupling

inline RunReport suite_coupling(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "coupling";
    rep.seed = seed;

    {  // shared-randomness disagreement between the subsampled and exact walks
        RngStream gen(seed, 41);
        auto fs = shifted_quadratic_sum(400, 1.0, gen);
        auto F = [&fs](const Vec& x) { return fs.full_value(x); };
        MrwConstants consts;
        consts.c_K = 0.05;  // a ~60-step horizon; p and the cap follow the K formula
        auto prm = MrwParams::from_meta(fs.meta(), fs.n(), 0.2, consts);
        RngStream root(seed, 42);
        const int pairs = 1000;
        int diverged = 0;
        for (int r = 0; r < pairs; ++r) {
            RngStream rng = root.substream(r);
            Vec x0 = warm_start_gaussian(Vec::Zero(1), fs.meta().L, rng);
            if (coupled_mrw_run(fs, F, prm, x0, rng).diverged) ++diverged;
        }
        double frac = static_cast<double>(diverged) / pairs;
        double bound = prm.delta + 3.0 * std::sqrt(prm.delta * (1.0 - prm.delta) / pairs);
        add(rep, "coupled_disagreement", frac <= bound, frac, bound,
            "p=" + format_double(prm.p) + " K=" + std::to_string(prm.K));
    }
    {  // subset-size tail: empirical vs exact binomial vs concentration bound
        RngStream rng(seed, 43);
        const int n = 20, reps = 200000;
        const double p = 0.25;
        int over = 0;
        for (int r = 0; r < reps; ++r)
            if (static_cast<int>(subsample_indices(n, p, rng).size()) > 10) ++over;
        double frac = static_cast<double>(over) / reps;
        double exact = binomial_tail_geq(n, 11, p);
        double se = std::sqrt(exact * (1.0 - exact) / reps);
        bool pass = std::fabs(frac - exact) <= 4.0 * se &&
                    exact <= std::exp(-3.0 * p * n / 14.0);
        add(rep, "subset_tail_binomial", pass, frac, exact,
            "concentration_bound=" + format_double(std::exp(-3.0 * p * n / 14.0)));
    }
    return rep;
}

// -------------------------------------------------------------- stationarity

inline RunReport suite_stationarity(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "stationarity";
    rep.seed = seed;

    {  // reduction loop with exact Gaussian RGO from an exact start
        const int d = 3, chains = 20000, T = 5;
        RgoHandle rgo(
            [](double lambda, const Vec& v, double, RngStream& rng) {
                double prec = 1.0 / lambda + 1.0;
                return sample_gaussian(rng, Vec(v / (lambda * prec)), 1.0 / prec);
            },
            std::numeric_limits<double>::infinity(), RgoExactness::exact);
        ReductionConfig cfg{0.8, T, 1.0, 0.1, 4.0};
        RngStream root(seed, 51);
        std::vector<double> c0(chains), dist2(chains);
        for (int c = 0; c < chains; ++c) {
            RngStream rng = root.substream(c);
            Vec x0(d);
            for (int i = 0; i < d; ++i) x0[i] = standard_normal(rng);
            Vec x = alternate_sample(rgo, 1.0, cfg, x0, rng);
            c0[c] = x[0];
            dist2[c] = x.squaredNorm();
        }
        auto s0 = summarize(c0);
        auto sd = summarize(dist2);
        bool pass = std::fabs(s0.mean) <= 3.0 * s0.se_mean &&
                    std::fabs(s0.variance - 1.0) <= 3.0 * s0.se_variance &&
                    std::fabs(sd.mean - d) <= 3.0 * sd.se_mean;
        add(rep, "reduction_stationary", pass, s0.variance, 1.0,
            "E||x||^2=" + format_double(sd.mean));
        // E||x - x*||^2 <= d/mu for strongly logconcave targets
        add(rep, "distance_moment_bound", sd.mean <= d + 3.0 * sd.se_mean, sd.mean,
            static_cast<double>(d));
    }
    {  // joint chain kernel against the closed-form marginal
        const double s = 1.0;
        auto f = FunctionOracle([s](const Vec& x) { return 0.5 * s * x.squaredNorm(); },
                                [s](const Vec& x) { return Vec(s * x); },
                                ProblemMeta(s, s, 1));
        auto p = JointParams::make(f.meta(), 0.1 / 18.0, 1.0);
        double marg_var = 1.0 / (p.ridge + s / (1.0 + p.eta * s));
        RngStream rng(seed, 52);
        Vec xs = Vec::Zero(1);
        Vec x(1);
        x << sample_gaussian_1d(rng, 0.0, marg_var);
        const long long sweeps = 1500000, thin = 15;
        std::vector<double> kept;
        kept.reserve(sweeps / thin);
        double lambda_ridge = 1.0 / p.ridge;
        for (long long i = 0; i < sweeps; ++i) {
            Vec y = ysample(f, x, xs, p.eta, p.delta, p, rng);
            auto [lm, vm] = combine_quadratics(p.eta, y, lambda_ridge, xs);
            x[0] = sample_gaussian_1d(rng, vm[0], lm);
            if (i % thin == 0) kept.push_back(x[0]);
        }
        auto st = summarize(kept);
        bool pass = std::fabs(st.variance - marg_var) / marg_var < 0.05;
        add(rep, "joint_chain_stationary", pass, st.variance, marg_var);
    }
    {  // xsample-backed kernel from an exact start on the Gaussian model
        const int d = 2, chains = 10000, sweeps = 5;
        auto f = FunctionOracle(
            [](const Vec& x) { return 0.5 * (4.0 * x[0] * x[0] + x[1] * x[1]); },
            [](const Vec& x) {
                Vec g(2);
                g[0] = 4.0 * x[0];
                g[1] = x[1];
                return g;
            },
            ProblemMeta(4.0, 1.0, d));
        XSampleConfig cfg = XSampleConfig::from_meta(f.meta());
        RgoHandle rgo = make_xsample_rgo(f, cfg);
        RngStream root(seed, 151);
        std::vector<double> slow(chains);
        for (int c = 0; c < chains; ++c) {
            RngStream rng = root.substream(c);
            Vec x(d);
            x << sample_gaussian_1d(rng, 0.0, 0.25), sample_gaussian_1d(rng, 0.0, 1.0);
            for (int k = 0; k < sweeps; ++k) {
                Vec y = sample_gaussian(rng, x, cfg.eta);
                x = rgo.sample(cfg.eta, y, 1e-4, rng);
            }
            slow[c] = x[1];
        }
        auto st = summarize(slow);
        bool pass = std::fabs(st.mean) <= 3.0 * st.se_mean &&
                    std::fabs(st.variance - 1.0) <= 3.0 * st.se_variance;
        add(rep, "gated_kernel_stationary", pass, st.variance, 1.0);
    }
    {  // moment diagnostics on an end-to-end sampler output
        const int d = 2;
        auto f = FunctionOracle(
            [](const Vec& x) { return 0.5 * (4.0 * x[0] * x[0] + x[1] * x[1]); },
            [](const Vec& x) {
                Vec g(2);
                g[0] = 4.0 * x[0];
                g[1] = x[1];
                return g;
            },
            ProblemMeta(4.0, 1.0, d));
        RngStream root(seed, 152);
        std::vector<Vec> outs;
        for (int c = 0; c < 5000; ++c) {
            RngStream rng = root.substream(c);
            outs.push_back(sample_wellconditioned(f, Vec::Zero(d), 0.1, rng, 2.0).x);
        }
        auto mrep = slc_moment_check(outs, 1.0, Vec::Zero(d), RngStream(seed, 153));
        add(rep, "moments_wellcond_output", mrep.all_pass(), mrep.distance_value,
            mrep.distance_bound);
    }
    {  // exact reference walk from an exact start
        auto F = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
        RngStream root(seed, 53);
        const int chains = 20000, steps = 40;
        std::vector<double> outs(chains);
        for (int c = 0; c < chains; ++c) {
            RngStream rng = root.substream(c);
            Vec x(1);
            x << standard_normal(rng);
            for (int k = 0; k < steps; ++k) x = inefficient_mrw_step(F, x, 0.3, rng);
            outs[c] = x[0];
        }
        auto st = summarize(outs);
        bool pass = std::fabs(st.mean) <= 3.0 * st.se_mean &&
                    std::fabs(st.variance - 1.0) <= 3.0 * st.se_variance;
        add(rep, "reference_walk_stationary", pass, st.variance, 1.0);
    }
    {  // subsampled walk from an exact start at tuned parameters
        RngStream gen(seed, 54);
        auto fs = shifted_quadratic_sum(5, 1.0, gen);
        // average of the five quadratics is a Gaussian negative log-density
        double num = 0.0, den = 0.0;
        Vec probe(1);
        for (int i = 0; i < 5; ++i) {
            probe << 0.0;
            double g0 = fs.summand_gradient(i, probe)[0];
            probe << 1.0;
            double g1 = fs.summand_gradient(i, probe)[0];
            double si = g1 - g0;
            num += -g0;  // s_i c_i
            den += si;
        }
        double target_mean = num / den;
        double target_var = 5.0 / den;  // den/5 is the average curvature
        auto consts = tuned_mrw_constants(fs.meta(), fs.n(), 0.2, 8.0);
        auto prm = MrwParams::from_meta(fs.meta(), fs.n(), 0.2, consts);
        RngStream root(seed, 55);
        const int chains = 4000;
        std::vector<double> outs(chains);
        for (int c = 0; c < chains; ++c) {
            RngStream rng = root.substream(c);
            Vec x0(1);
            x0 << sample_gaussian_1d(rng, target_mean, target_var);
            outs[c] = finitesum_mrw(fs, prm, x0, rng)[0];
        }
        auto st = summarize(outs);
        bool pass = std::fabs(st.mean - target_mean) <= 3.0 * st.se_mean &&
                    std::fabs(st.variance - target_var) <= 3.0 * st.se_variance;
        add(rep, "subsampled_walk_stationary", pass, st.variance, target_var);
    }
    {  // moment diagnostics on model outputs
        ModelSpec bs;
        bs.kind = ModelKind::box_gaussian;
        bs.dim = 2;
        bs.spectrum = {1.0, 2.0};
        bs.center = {0.3, -0.2};
        auto box = build_model(bs);
        RngStream rng(seed, 56);
        std::vector<Vec> samples;
        for (int i = 0; i < 20000; ++i) samples.push_back(box.exact_sampler(rng));
        auto mrep = slc_moment_check(samples, box.meta.mu, box.x_star, RngStream(seed, 57));
        add(rep, "moments_box_model", mrep.all_pass(), mrep.fourth_value, mrep.fourth_bound);

        auto lasso = lasso_model_1d();
        std::vector<Vec> ls;
        for (int i = 0; i < 20000; ++i) ls.push_back(lasso.exact_sampler(rng));
        auto lrep = slc_moment_check(ls, lasso.meta.mu, lasso.x_star, RngStream(seed, 58));
        add(rep, "moments_lasso_model", lrep.all_pass(), lrep.distance_value,
            lrep.distance_bound);
    }
    {  // bimodal negative control: the fourth-moment bound must fail
        RngStream rng(seed, 59);
        std::vector<Vec> samples;
        for (int i = 0; i < 20000; ++i) {
            Vec x(1);
            double mode = (rng.uniform() < 0.5) ? -3.0 : 3.0;
            x << mode + standard_normal(rng);
            samples.push_back(x);
        }
        Vec xs = Vec::Zero(1);
        auto mrep = slc_moment_check(samples, 1.0, xs, RngStream(seed, 60));
        add(rep, "bimodal_negative_control", !mrep.fourth_pass, mrep.fourth_value,
            mrep.fourth_bound, "expected to exceed the bound");
    }
    return rep;
}

// ------------------------------------------------------------------ scaling

inline RunReport suite_scaling(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "scaling";
    rep.seed = seed;

    auto ratio_within = [](double observed, double predicted, double factor) {
        return observed >= predicted / factor && observed <= predicted * factor;
    };

    {  // subsampled-walk pipeline: value queries scale like kappa^2
        std::vector<double> tallies;
        for (double kappa : {2.0, 4.0, 8.0}) {
            const int n = 40;
            std::vector<FunctionOracle> parts;
            double rest = (8.0 - kappa) / 7.0;
            for (int i = 0; i < n; ++i) {
                double s = (i < n / 8) ? kappa : rest;
                double c = (i % 5) * 0.2;
                parts.push_back(FunctionOracle(
                    [s, c](const Vec& x) { return 0.5 * s * (x[0] - c) * (x[0] - c); },
                    [s, c](const Vec& x) {
                        Vec g(1);
                        g[0] = s * (x[0] - c);
                        return g;
                    },
                    ProblemMeta(std::max(s, 1e-12), std::max(s, 1e-12), 1)));
            }
            FiniteSumOracle fs(std::move(parts), 1.0);
            RngStream rng(seed, 61);
            MrwConstants consts;
            consts.c_K = 0.01;
            auto res = sample_finitesum(fs, Vec::Zero(1), 0.2, rng, consts);
            tallies.push_back(static_cast<double>(res.summand_value_queries));
        }
        bool pass = ratio_within(tallies[1] / tallies[0], 4.0, 2.0) &&
                    ratio_within(tallies[2] / tallies[1], 4.0, 2.0);
        add(rep, "finitesum_kappa_squared", pass, tallies[2] / tallies[1], 4.0,
            "r10=" + format_double(tallies[1] / tallies[0]));
    }
    {  // accelerated composite path: gradient queries scale like kappa
        std::vector<double> tallies;
        for (double kappa : {2.0, 4.0, 8.0}) {
            // f'' = 1 + (kappa-1) sech^2: L = kappa, mu = 1
            auto f = FunctionOracle(
                [kappa](const Vec& x) {
                    double t = std::fabs(x[0]);
                    double lc = t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
                    return 0.5 * x[0] * x[0] + (kappa - 1.0) * lc;
                },
                [kappa](const Vec& x) {
                    Vec g(1);
                    g[0] = x[0] + (kappa - 1.0) * std::tanh(x[0]);
                    return g;
                },
                ProblemMeta(kappa, 1.0, 1));
            auto model = lasso_model_1d();
            Vec xs = Vec::Zero(1);  // symmetric: shared minimizer at 0
            CompositeProblem prob{f, model.g, xs, 0.2};
            AcceleratedOptions opts;
            opts.ck = 0.3;
            opts.reduction_constant = 2.0;
            std::uint64_t before = f.counters().gradient_queries.load();
            RngStream root(seed, 62);
            for (int i = 0; i < 3; ++i) {
                RngStream rng = root.substream(i);
                accelerated_composite_sample(prob, rng, opts);
            }
            tallies.push_back(
                static_cast<double>(f.counters().gradient_queries.load() - before));
        }
        bool pass = ratio_within(tallies[1] / tallies[0], 2.0, 2.0) &&
                    ratio_within(tallies[2] / tallies[1], 2.0, 2.0);
        add(rep, "accel_composite_kappa", pass, tallies[2] / tallies[1], 2.0,
            "r10=" + format_double(tallies[1] / tallies[0]));
    }
    {  // accelerated finite-sum path: summand queries scale like kappa
        std::vector<double> tallies;
        for (double kappa : {2.0, 4.0, 8.0}) {
            const int n = 40;
            std::vector<FunctionOracle> parts;
            double rest = (8.0 - kappa) / 7.0;
            for (int i = 0; i < n; ++i) {
                double s = (i < n / 8) ? kappa : rest;
                double c = (i % 5) * 0.2;
                parts.push_back(FunctionOracle(
                    [s, c](const Vec& x) { return 0.5 * s * (x[0] - c) * (x[0] - c); },
                    [s, c](const Vec& x) {
                        Vec g(1);
                        g[0] = s * (x[0] - c);
                        return g;
                    },
                    ProblemMeta(std::max(s, 1e-12), std::max(s, 1e-12), 1)));
            }
            FiniteSumOracle fs(std::move(parts), 1.0);
            AccelFsOptions opts;
            opts.reduction_constant = 2.0;
            opts.mrw.c_K = 0.01;
            RngStream rng(seed, 63);
            Vec x_star = svrg_minimize(fs, Vec::Zero(1), 1e-7, rng).x;
            std::uint64_t before = fs.summand_value_queries();
            RngStream root(seed, 64);
            for (int i = 0; i < 2; ++i) {
                RngStream r = root.substream(i);
                accelerated_finitesum_sample(fs, 0.2, r, opts, &x_star);
            }
            tallies.push_back(static_cast<double>(fs.summand_value_queries() - before));
        }
        bool pass = ratio_within(tallies[1] / tallies[0], 2.0, 2.0) &&
                    ratio_within(tallies[2] / tallies[1], 2.0, 2.0);
        add(rep, "accel_finitesum_kappa", pass, tallies[2] / tallies[1], 2.0,
            "r10=" + format_double(tallies[1] / tallies[0]));
    }
    {  // fallback sampler iterations scale linearly in dimension
        RngStream rng(seed, 65);
        std::vector<double> steps;
        for (int d : {4, 16, 64}) {
            auto target = FunctionOracle(
                [](const Vec& x) { return 0.5 * x.squaredNorm(); },
                [](const Vec& x) { return x; }, ProblemMeta(1.0, 1.0, d));
            SamplerDiag diag;
            metropolized_fallback(target, 1e-3, rng, Vec::Zero(d), &diag);
            steps.push_back(static_cast<double>(diag.fallback_steps));
        }
        bool pass = ratio_within(steps[1] / steps[0], 4.0, 2.0) &&
                    ratio_within(steps[2] / steps[1], 4.0, 2.0);
        add(rep, "fallback_linear_in_d", pass, steps[2] / steps[1], 4.0,
            "r10=" + format_double(steps[1] / steps[0]));
    }
    {  // fallback-path frequency in the well-conditioned pipeline
        const int d = 2;
        const double kappa = 4.0, eps = 0.1;
        auto f = FunctionOracle(
            [kappa](const Vec& x) {
                return 0.5 * (kappa * x[0] * x[0] + x[1] * x[1]);
            },
            [kappa](const Vec& x) {
                Vec g(2);
                g[0] = kappa * x[0];
                g[1] = x[1];
                return g;
            },
            ProblemMeta(kappa, 1.0, d));
        RngStream root(seed, 66);
        std::uint64_t gate_failures = 0, rgo_calls = 0;
        for (int c = 0; c < 300; ++c) {
            RngStream rng = root.substream(c);
            auto res = sample_wellconditioned(f, Vec::Zero(d), eps, rng, 2.0);
            gate_failures += res.diag.gate_failures;
            rgo_calls += res.diag.rgo_calls;
        }
        double frac = static_cast<double>(gate_failures) / rgo_calls;
        double bound = 1.0 / (d * std::log(kappa * d / eps));
        double se = std::sqrt(bound / rgo_calls);
        add(rep, "fallback_frequency", frac <= bound + 3.0 * se, frac, bound,
            "rgo_calls=" + std::to_string(rgo_calls));
    }
    return rep;
}

// -------------------------------------------------------------- determinism

inline RunReport suite_determinism(std::uint64_t seed) {
    RunReport rep;
    rep.sampler = "determinism";
    rep.seed = seed;

    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    {  // identical seeds reproduce byte-identical CSV and JSON
        RunConfig cfg;
        cfg.model = ModelSpec::gaussian_spec({1.0, 4.0});
        cfg.sampler = "reduction_direct";
        cfg.eps = 0.1;
        cfg.seed = seed;
        cfg.chains = 500;
        cfg.samples_path = "det_a.csv";
        cfg.report_path = "det_a.json";
        run(cfg);
        cfg.samples_path = "det_b.csv";
        cfg.report_path = "det_b.json";
        run(cfg);
        bool csv_same = slurp("det_a.csv") == slurp("det_b.csv");
        bool json_same = slurp("det_a.json") == slurp("det_b.json");
        add(rep, "run_replay_identical", csv_same && json_same, csv_same ? 1.0 : 0.0, 1.0);
        std::remove("det_a.csv");
        std::remove("det_b.csv");
        std::remove("det_a.json");
        std::remove("det_b.json");
    }
    {  // a validation suite replays identically
        json a = suite_structural(seed);
        json b = suite_structural(seed);
        add(rep, "suite_replay_identical", a.dump() == b.dump(), a.dump() == b.dump(), 1.0);
    }
    {  // csv round-trips bit-exactly through the reader
        RngStream rng(seed, 71);
        std::vector<Vec> samples;
        for (int i = 0; i < 200; ++i) {
            Vec x(3);
            for (int j = 0; j < 3; ++j) x[j] = sample_gaussian_1d(rng, 0.0, 10.0);
            samples.push_back(x);
        }
        write_csv("det_rt.csv", samples);
        auto back = read_csv("det_rt.csv");
        bool ok = back.size() == samples.size();
        for (std::size_t i = 0; ok && i < samples.size(); ++i)
            ok = back[i].size() == samples[i].size() && back[i] == samples[i];
        add(rep, "csv_roundtrip_bitexact", ok, ok ? 1.0 : 0.0, 1.0);
        std::remove("det_rt.csv");
    }
    return rep;
}

}  // namespace validate_detail

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "exactness", "rounds",  "estimators",   "structural",
        "coupling",  "scaling", "stationarity", "determinism"};
    return names;
}

inline RunReport run_suite_once(const std::string& name, std::uint64_t seed) {
    using namespace validate_detail;
    if (name == "exactness") return suite_exactness(seed);
    if (name == "rounds") return suite_rounds(seed);
    if (name == "estimators") return suite_estimators(seed);
    if (name == "structural") return suite_structural(seed);
    if (name == "coupling") return suite_coupling(seed);
    if (name == "scaling") return suite_scaling(seed);
    if (name == "stationarity") return suite_stationarity(seed);
    if (name == "determinism") return suite_determinism(seed);
    throw ConfigError("unknown suite '" + name + "'");
}

/// Run a named suite with the one-reseed-retry policy: a failing suite is
/// rerun once with seed+1 and the retry is recorded in the report.
inline RunReport validate(const std::string& suite, std::uint64_t seed = 1) {
    RunReport rep = run_suite_once(suite, seed);
    if (!rep.all_pass()) {
        RunReport retry = run_suite_once(suite, seed + 1);
        retry.retried = true;
        return retry;
    }
    return rep;
}

}  // namespace rgos
