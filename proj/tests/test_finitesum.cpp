#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include "rgos/finitesum.hpp"
#include "rgos/models.hpp"
#include "rgos/quadrature.hpp"
#include "rgos/stats.hpp"
#include "rgos/wellcond.hpp"
#include "test_helpers.hpp"

using namespace rgos;
using rgos::testing::quadratic_summand;
using rgos::testing::tuned_mrw_constants;

namespace {

// five quadratic summands with average curvature 1 and mean 0.5
FiniteSumOracle five_quadratics() {
    std::vector<double> s = {0.5, 0.75, 1.0, 1.25, 1.5};
    std::vector<double> c = {-2.0, -1.0, 0.0, 1.0, 2.0};
    std::vector<FunctionOracle> parts;
    for (int i = 0; i < 5; ++i) parts.push_back(quadratic_summand(s[i], c[i]));
    return FiniteSumOracle(std::move(parts), 1.0);
}

}  // namespace

TEST_CASE("subsample edge probabilities") {
    RngStream rng(401, 0);
    REQUIRE(subsample_indices(10, 0.0, rng).empty());
    REQUIRE(subsample_indices(10, 1.0, rng).size() == 10);

    // n = 20, p = 0.25: tail beyond 2pn matches the exact binomial
    const int n = 20, reps = 200000;
    const double p = 0.25;
    int over = 0;
    for (int r = 0; r < reps; ++r)
        if (static_cast<int>(subsample_indices(n, p, rng).size()) > 10) ++over;
    double expected = binomial_tail_geq(n, 11, p);
    double frac = static_cast<double>(over) / reps;
    double se = std::sqrt(expected * (1.0 - expected) / reps);
    REQUIRE(std::fabs(frac - expected) < 4.0 * se);
    REQUIRE(frac <= std::exp(-3.0 * p * n / 14.0));  // concentration bound
}

TEST_CASE("gamma estimator: full batch collapse and fixed point") {
    auto fs = five_quadratics();
    Vec x(1), y(1);
    x << 0.3;
    y << 0.9;
    std::vector<int> full = {0, 1, 2, 3, 4};
    double gamma = gamma_estimator(fs, x, y, full, 1.0);
    double expected = std::sqrt(std::exp(-fs.full_value(y) + fs.full_value(x)));
    REQUIRE(gamma == Catch::Approx(expected).epsilon(1e-12));

    RngStream rng(402, 0);
    for (int r = 0; r < 50; ++r) {
        auto s = subsample_indices(5, 0.6, rng);
        REQUIRE(gamma_estimator(fs, x, x, s, 0.6) == Catch::Approx(1.0));
    }
}

TEST_CASE("gamma estimator is unbiased for the square-root ratio") {
    auto fs = five_quadratics();
    RngStream rng(403, 0);
    const double p = 0.5;
    for (int pair = 0; pair < 10; ++pair) {
        Vec x(1), y(1);
        x << sample_gaussian_1d(rng, 0.5, 1.0);
        y << x[0] + sample_gaussian_1d(rng, 0.0, 0.04);
        double truth = std::sqrt(std::exp(-fs.full_value(y) + fs.full_value(x)));
        const int reps = 20000;
        std::vector<double> vals(reps);
        for (int r = 0; r < reps; ++r) {
            auto s = subsample_indices(5, p, rng);
            vals[r] = gamma_estimator(fs, x, y, s, p);
        }
        auto st = summarize(vals);
        REQUIRE(std::fabs(st.mean - truth) < 3.5 * st.se_mean + 1e-12);
    }
}

TEST_CASE("filter stays a valid probability in the step-bound regime") {
    auto fs = five_quadratics();
    MrwConstants honest;  // unit concentration constants
    honest.c_K = 0.05;
    auto prm = MrwParams::from_meta(fs.meta(), fs.n(), 0.2, honest);
    RngStream rng(404, 0);
    Vec x(1), x_star(1);
    x << 0.5;
    x_star << 0.5;  // minimizer of the average of the five quadratics
    int checked = 0;
    for (int k = 0; k < 20000; ++k) {
        Vec xi(1);
        xi[0] = standard_normal(rng);
        Vec y = x + std::sqrt(2.0 * prm.h) * xi;
        double tau = rng.uniform_halfopen();
        auto dec = finitesum_mrw_filter(fs, x, y, prm.p, prm.cap, tau, rng);
        // the bound is asserted under the step-bound regime's three conditions
        bool cond = (x - x_star).norm() <= prm.r_x && xi.norm() <= prm.c_xi;
        for (int i = 0; cond && i < fs.n(); ++i) {
            Vec g = fs.summand_gradient(i, x);
            cond = std::fabs(g.dot(xi)) <= prm.c_x * g.norm();
        }
        if (cond && !dec.capped && !dec.guard_tripped) {
            ++checked;
            REQUIRE(dec.gamma <= 4.0 / 3.0 + 1e-9);
            REQUIRE(0.75 * dec.gamma <= 1.0 + 1e-9);
        }
        if (dec.accepted) x = y;
    }
    REQUIRE(checked > 15000);  // the conditions hold for most iterations
}

TEST_CASE("n = 1, p = 1 reduces to the square-root filter walk") {
    std::vector<FunctionOracle> one = {quadratic_summand(1.0, 0.0)};
    FiniteSumOracle fs(std::move(one), 1.0);
    RngStream rng(405, 0);
    Vec x(1);
    x << 0.4;
    for (int k = 0; k < 2000; ++k) {
        Vec xi(1);
        xi[0] = standard_normal(rng);
        Vec y = x + 0.3 * xi;
        double tau = rng.uniform_halfopen();
        auto dec = finitesum_mrw_filter(fs, x, y, 1.0, 2, tau, rng);
        double log_sqrt = 0.5 * (fs.full_value(x) - fs.full_value(y));
        bool middle_case = tau <= 0.75 * std::exp(log_sqrt);
        REQUIRE(dec.accepted == middle_case);
        if (dec.accepted) x = y;
    }
}

TEST_CASE("subsampled walk matches the exact Gaussian target moments") {
    auto fs = five_quadratics();
    // target: N(0.5, 1) since the average curvature is 1
    auto consts = tuned_mrw_constants(fs.meta(), fs.n(), 0.2, 8.0);
    auto prm = MrwParams::from_meta(fs.meta(), fs.n(), 0.2, consts);
    RngStream root(406, 0);
    const int chains = 3000;
    std::vector<double> outs(chains);
    MrwDiag diag;
    for (int c = 0; c < chains; ++c) {
        RngStream rng = root.substream(c);
        Vec x0 = warm_start_gaussian(Vec::Constant(1, 0.5), fs.meta().L, rng);
        outs[c] = finitesum_mrw(fs, prm, x0, rng, &diag)[0];
    }
    auto st = summarize(outs);
    REQUIRE(std::fabs(st.mean - 0.5) < 3.0 * st.se_mean);
    REQUIRE(std::fabs(st.variance - 1.0) < 3.0 * st.se_variance);
    REQUIRE(diag.guard_warnings == 0);
    // never a full-batch evaluation, and per-iteration queries respect the cap
    REQUIRE(fs.full_evaluations() == 0);
    REQUIRE(diag.max_queries_per_iteration <= 4.0 * prm.p * fs.n());
}

TEST_CASE("exact filter cases of the reference walk") {
    REQUIRE(inefficient_mrw_alpha(std::log(1.5)) == 1.0);  // sqrt ratio above 4/3
    double mid = std::log(1.1);
    REQUIRE(inefficient_mrw_alpha(mid) == Catch::Approx(0.75 * 1.1));
    double low = std::log(0.5);  // sqrt ratio below 3/4: plain ratio = 0.25
    REQUIRE(inefficient_mrw_alpha(low) == Catch::Approx(0.25));
}

TEST_CASE("reference walk is stationary on a discretized Gaussian") {
    auto F = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    RngStream rng(407, 0);
    Vec x(1);
    x << standard_normal(rng);  // exact start
    const double h = 0.3;
    const long long total = 500000, thin = 25;
    std::vector<double> kept;
    kept.reserve(total / thin);
    for (long long k = 0; k < total; ++k) {
        x = inefficient_mrw_step(F, x, h, rng);
        if (k % thin == 0) kept.push_back(x[0]);
    }
    // chi-square against the exact cell probabilities
    const int bins = 12;
    std::vector<double> edges(bins - 1), obs(bins, 0.0), expct(bins, 0.0);
    for (int b = 1; b < bins; ++b)
        edges[b - 1] = inverse_norm_cdf(static_cast<double>(b) / bins);
    for (double v : kept) {
        int b = static_cast<int>(std::lower_bound(edges.begin(), edges.end(), v) -
                                 edges.begin());
        obs[b] += 1.0;
    }
    for (int b = 0; b < bins; ++b) expct[b] = static_cast<double>(kept.size()) / bins;
    auto res = chi_square_gof(obs, expct);
    REQUIRE(res.p_value > 0.01);
}

TEST_CASE("coupled runs disagree at most delta-often") {
    const int n = 400;
    std::vector<FunctionOracle> parts;
    RngStream gen(408, 1);
    for (int i = 0; i < n; ++i)
        parts.push_back(quadratic_summand(1.0, sample_gaussian_1d(gen, 0.0, 1.0)));
    FiniteSumOracle fs(std::move(parts), 1.0);
    auto F = [&fs](const Vec& x) { return fs.full_value(x); };

    const double eps = 0.2;
    MrwConstants consts;  // honest concentration constants at unit scale
    consts.c_K = 0.05;   // ~60-step horizon keeps the paired-run budget tractable
    auto prm = MrwParams::from_meta(fs.meta(), n, eps, consts);
    REQUIRE(prm.p < 1.0);  // genuine subsampling at this n

    RngStream root(408, 0);
    const int pairs = 1000;
    int diverged = 0;
    for (int r = 0; r < pairs; ++r) {
        RngStream rng = root.substream(r);
        Vec x0 = warm_start_gaussian(Vec::Zero(1), fs.meta().L, rng);
        auto res = coupled_mrw_run(fs, F, prm, x0, rng);
        diverged += res.diverged ? 1 : 0;
    }
    double frac = static_cast<double>(diverged) / pairs;
    double se = std::sqrt(prm.delta * (1.0 - prm.delta) / pairs);
    REQUIRE(frac <= prm.delta + 3.0 * se);
}

TEST_CASE("subsampled-walk pipeline: query tally scales like kappa^2") {
    const int n = 40;
    std::vector<double> tallies;
    for (double kappa : {2.0, 4.0, 8.0}) {
        std::vector<FunctionOracle> parts;
        double rest = (8.0 - kappa) / 7.0;
        for (int i = 0; i < n; ++i) {
            double s = (i < n / 8) ? kappa : rest;
            parts.push_back(quadratic_summand(s, (i % 5) * 0.2));
        }
        FiniteSumOracle fs(std::move(parts), 1.0);  // average curvature 1
        REQUIRE(fs.meta().kappa() == Catch::Approx(kappa));
        RngStream rng(409, 0);
        Vec x_star = Vec::Zero(1);  // adequate for a pure tally measurement
        MrwConstants consts;
        consts.c_K = 0.01;
        auto res = sample_finitesum(fs, x_star, 0.2, rng, consts);
        tallies.push_back(static_cast<double>(res.summand_value_queries));
    }
    double r1 = tallies[1] / tallies[0];
    double r2 = tallies[2] / tallies[1];
    REQUIRE(r1 >= 2.0);   // within factor 2 of the 4x prediction
    REQUIRE(r1 <= 8.0);
    REQUIRE(r2 >= 2.0);
    REQUIRE(r2 <= 8.0);
}

TEST_CASE("logistic posterior mean against a ten-times-longer reference run") {
    ModelSpec spec;
    spec.kind = ModelKind::logistic_finitesum;
    spec.dim = 5;
    spec.n_data = 50;
    spec.ridge = 0.25;
    auto model = build_model(spec);
    auto& fs = *model.fs;

    RngStream rng(410, 0);
    Vec x_star = svrg_minimize(fs, Vec::Zero(5), 1e-7, rng).x;
    auto consts = tuned_mrw_constants(fs.meta(), fs.n(), 0.2, 6.0);
    auto prm = MrwParams::from_meta(fs.meta(), fs.n(), 0.2, consts);

    auto chain_mean = [&](long long steps, RngStream r) {
        Vec x = warm_start_gaussian(x_star, fs.meta().L, r);
        MrwParams local = prm;
        local.K = 1;  // drive the kernel one step at a time
        Vec acc = Vec::Zero(5);
        long long burn = steps / 5;
        for (long long k = 0; k < steps; ++k) {
            x = finitesum_mrw(fs, local, x, r);
            if (k >= burn) acc += x;
        }
        return Vec(acc / static_cast<double>(steps - burn));
    };
    long long base = prm.K;
    Vec short_mean = chain_mean(base, rng.substream(1));
    Vec long_mean = chain_mean(10 * base, rng.substream(2));
    // combined standard error from the short chain's scale
    double scale = std::sqrt(1.0 / fs.meta().mu);
    double iact = 1.0 / (prm.h * fs.meta().mu * 0.7);
    double se_short = scale / std::sqrt(static_cast<double>(base - base / 5) / iact);
    double se_long = se_short / std::sqrt(10.0);
    double se_comb = std::sqrt(se_short * se_short + se_long * se_long);
    REQUIRE((short_mean - long_mean).norm() <= 3.0 * se_comb * std::sqrt(5.0));
}

TEST_CASE("n = 1 finite-sum path matches the value-only sampler in distribution") {
    std::vector<FunctionOracle> one = {quadratic_summand(1.0, 0.0)};
    FiniteSumOracle fs(std::move(one), 1.0);
    auto fv = FunctionOracle::value_only(
        [](const Vec& x) { return 0.5 * x.squaredNorm(); }, ProblemMeta(1.0, 1.0, 1));
    Vec x_star = Vec::Zero(1);

    auto consts = tuned_mrw_constants(fs.meta(), 1, 0.1, 8.0);
    RngStream root(412, 0);
    const int n = 1000;
    std::vector<Vec> a, b;
    for (int i = 0; i < n; ++i) {
        RngStream r1 = root.substream(2 * i);
        RngStream r2 = root.substream(2 * i + 1);
        a.push_back(sample_finitesum(fs, x_star, 0.1, r1, consts).x);
        b.push_back(sample_wellconditioned_zeroth(fv, x_star, 0.1, r2, 2.0).x);
    }
    REQUIRE(two_sample_test(a, b, RngStream(412, 9), 300).pass(0.01));
}

TEST_CASE("accelerated pipeline: regularized subproblem conditioning") {
    auto fs = five_quadratics();
    const double eta = 0.5;
    Vec y = Vec::Constant(1, 0.3);
    auto reg = add_quadratic(fs, eta, y);
    double bound = 1.0 + eta * fs.meta().L;
    REQUIRE(reg.meta().kappa() <= bound + 1e-12);
    REQUIRE(reg.meta().L == Catch::Approx(fs.meta().L + 2.0));
    REQUIRE(reg.meta().mu == Catch::Approx(fs.meta().mu + 2.0));
}

TEST_CASE("accelerated eta formula reduces to 1/L at n = 1") {
    const double L = 2.0;
    int d = 1;
    double lg = std::max(std::log(1 * 1.0 * d / 0.2), 1.0);
    double eta = std::max(1.0 / L, std::sqrt(1.0 / (L * L * d * lg * lg * lg)));
    REQUIRE(eta == Catch::Approx(1.0 / L));
}

TEST_CASE("accelerated finite-sum sampler agrees with the base pipeline") {
    const int n = 50;
    std::vector<FunctionOracle> parts;
    RngStream gen(411, 1);
    for (int i = 0; i < n; ++i) {
        double s = 0.5 + (i % 5) * 0.25;  // curvatures in [0.5, 1.5]
        parts.push_back(quadratic_summand(s, sample_gaussian_1d(gen, 0.0, 0.5)));
    }
    FiniteSumOracle fs(std::move(parts), 1.0);

    AccelFsOptions opts;
    opts.reduction_constant = 2.0;
    opts.mrw = tuned_mrw_constants(add_quadratic(fs, 1.0 / fs.meta().L, Vec::Zero(1)).meta(), n, 0.05,
                       4.0, 0.25);
    RngStream root(411, 0);
    const int draws = 300;
    std::vector<Vec> a, b;
    RngStream rng0(411, 2);
    Vec x_star = svrg_minimize(fs, Vec::Zero(1), 1e-7, rng0).x;
    auto base_consts = tuned_mrw_constants(fs.meta(), n, 0.2, 6.0);
    for (int i = 0; i < draws; ++i) {
        RngStream r1 = root.substream(2 * i);
        RngStream r2 = root.substream(2 * i + 1);
        a.push_back(accelerated_finitesum_sample(fs, 0.2, r1, opts, &x_star).x);
        b.push_back(sample_finitesum(fs, x_star, 0.2, r2, base_consts).x);
    }
    REQUIRE(two_sample_test(a, b, RngStream(411, 3), 300).pass(0.01));
}
