#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include "rgos/composite.hpp"
#include "rgos/models.hpp"
#include "rgos/quadrature.hpp"
#include "rgos/stats.hpp"
#include "rgos/wellcond.hpp"

using namespace rgos;

namespace {

FunctionOracle iso_quadratic(double L, int d) {
    return FunctionOracle([L](const Vec& x) { return 0.5 * L * x.squaredNorm(); },
                          [L](const Vec& x) { return Vec(L * x); }, ProblemMeta(L, L, d));
}

Model lasso_model_1d() {
    ModelSpec spec;
    spec.kind = ModelKind::lasso_gaussian;
    spec.dim = 1;
    spec.spectrum = {1.0};
    spec.center = {0.0};
    spec.l1_weight = 1.0;
    return build_model(spec);
}

}  // namespace

TEST_CASE("joint parameters satisfy their invariants and formulas") {
    ProblemMeta meta(4.0, 1.0, 3);
    double delta = 0.05 / 18.0;
    auto p = JointParams::make(meta, delta, 100.0);
    double lk = std::log(16.0 * 4.0 / delta);
    REQUIRE(p.eta == Catch::Approx(1.0 / (32.0 * 4.0 * 4.0 * 3.0 * lk)));
    REQUIRE(p.omega_radius == Catch::Approx(4.0 * std::sqrt(3.0 * lk / 1.0)));
    REQUIRE(p.eta * meta.L <= 1.0);
    REQUIRE(p.eta * meta.L * meta.L * p.omega_radius * p.omega_radius <= 0.5 + 1e-12);
    REQUIRE(400.0 * 9.0 * p.eta <= p.omega_radius * p.omega_radius);
    // K formula with an explicit constant override
    long long expected =
        static_cast<long long>(std::ceil(100.0 / (p.eta * meta.mu) *
                                         std::log(3.0 * std::log(64.0) / (4.0 * delta))));
    REQUIRE(p.K == expected);
}

TEST_CASE("ysample with a flat function accepts immediately") {
    auto f = FunctionOracle([](const Vec&) { return 0.0; },
                            [](const Vec& x) { return Vec(Vec::Zero(x.size())); },
                            ProblemMeta(1e-9, 1e-9, 1));
    JointParams p;
    p.eta = 0.3;
    p.delta = 0.01;
    p.K = 1;
    p.omega_radius = 10.0;
    p.ridge = 0.0;
    p.ysample_radius = 10.0;
    RngStream rng(301, 0);
    Vec x(1), xs(1);
    x << 0.5;
    xs << 0.0;
    SamplerDiag diag;
    const int n = 50000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = ysample(f, x, xs, 0.3, 0.01, p, rng, &diag)[0];
    REQUIRE(diag.rejection_rounds == static_cast<std::uint64_t>(n));
    auto ks = ks_test_cdf(
        draws, [&](double t) { return norm_cdf((t - 0.5) / std::sqrt(0.3)); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("ysample expected rounds at an in-region point") {
    const int d = 4;
    auto f = iso_quadratic(2.0, d);
    ProblemMeta meta = f.meta();
    auto p = JointParams::make(meta, 0.01, 1.0);
    RngStream rng(302, 0);
    Vec xs = Vec::Zero(d);
    SamplerDiag diag;
    const int calls = 10000;
    for (int i = 0; i < calls; ++i) {
        Vec x = sample_gaussian(rng, xs, 1.0 / meta.L);
        ysample(f, x, xs, p.eta, p.delta, p, rng, &diag);
    }
    REQUIRE(diag.gate_failures == 0);
    double mean_rounds = static_cast<double>(diag.rejection_rounds) / calls;
    REQUIRE(mean_rounds <= 2.0 + 3.0 * std::sqrt(2.0 / calls));
}

TEST_CASE("ysample matches quadrature on the logistic-regularized target") {
    ModelSpec cs;
    cs.kind = ModelKind::custom_1d;
    cs.custom_name = "logistic_quadratic";
    auto f = build_model(cs).f;
    auto p = JointParams::make(f.meta(), 0.01, 1.0);
    RngStream rng(303, 0);
    Vec x(1), xs(1);
    x << 0.4;
    xs << 0.0;  // approximate minimizer; well inside the region
    const int n = 100000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = ysample(f, x, xs, p.eta, p.delta, p, rng)[0];
    double hw = 12.0 * std::sqrt(p.eta);
    Quadrature1D q(
        [&](double y) {
            Vec v(1);
            v << y;
            return -f.value(v) - (y - x[0]) * (y - x[0]) / (2.0 * p.eta);
        },
        x[0] - hw, x[0] + hw, 4001);
    auto ks = ks_test_cdf(draws, [&](double t) { return q.cdf(t); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("theta estimator collapses to a closed form on quadratics") {
    const int d = 2;
    const double L = 1.5;
    auto f = iso_quadratic(L, d);
    auto p = JointParams::make(f.meta(), 0.01, 1.0);
    RngStream rng(304, 0);
    Vec xs = Vec::Zero(d);
    RgoHandle zero_g(
        [](double lambda, const Vec& v, double, RngStream& r) {
            return sample_gaussian(r, v, lambda);
        },
        std::numeric_limits<double>::infinity(), RgoExactness::exact);
    zero_g.with_value([](const Vec&) { return 0.0; });

    Vec x(d);
    x << 0.4, -0.3;
    double g2 = L * L * x.squaredNorm();
    double expected = std::pow(1.0 + p.eta * L, 0.5 * d) *
                      std::exp(-p.eta / (2.0 * (1.0 + p.eta * L)) * g2 +
                               0.5 * p.ridge * x.squaredNorm());
    std::vector<double> vals(200);
    for (auto& v : vals) v = theta_estimator(f, zero_g, x, xs, p, rng);
    for (double v : vals) REQUIRE(v == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("theta estimator is unbiased for the density ratio") {
    // non-quadratic f so the estimator genuinely varies with the y draw
    ModelSpec cs;
    cs.kind = ModelKind::custom_1d;
    cs.custom_name = "logistic_quadratic";
    auto f = build_model(cs).f;
    auto model = lasso_model_1d();  // supplies the l1 composite part
    auto p = JointParams::make(f.meta(), 0.05 / 18.0, 1.0);
    RngStream rng(305, 0);
    Vec x(1), xs(1);
    x << 0.8;
    xs << 0.0;

    const int n = 100000;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = theta_estimator(f, model.g, x, xs, p, rng);
    auto st = summarize(vals);
    REQUIRE(st.se_mean > 0.0);  // the y-dependence must not collapse here

    // quadrature value of p(x)/p_hat(x)
    double hw = 12.0 * std::sqrt(p.eta);
    Quadrature1D zx(
        [&](double y) {
            Vec v(1);
            v << y;
            return -f.value(v) - (y - x[0]) * (y - x[0]) / (2.0 * p.eta);
        },
        x[0] - hw, x[0] + hw, 4001);
    double log_ratio = -f.value(x) + 0.5 * p.ridge * (x - xs).squaredNorm() +
                       0.5 * std::log(2.0 * M_PI * p.eta) - zx.log_normalizer();
    double truth = std::exp(log_ratio);
    REQUIRE(std::fabs(st.mean - truth) < 3.0 * st.se_mean + 1e-12);

    // inside Omega the estimator never exceeds 4
    double max_val = *std::max_element(vals.begin(), vals.end());
    REQUIRE(max_val <= 4.0);
}

TEST_CASE("joint chain kernel is stationary with the closed-form x-marginal") {
    // f(y) = s y^2 / 2 with g = 0: the x-marginal of the joint law is a
    // centered Gaussian with precision ridge + s/(1 + eta s)
    const double s = 1.0;
    auto f = iso_quadratic(s, 1);
    auto p = JointParams::make(f.meta(), 0.1 / 18.0, 1.0);
    double marg_prec = p.ridge + s / (1.0 + p.eta * s);
    double marg_var = 1.0 / marg_prec;

    RgoHandle zero_g(
        [](double lambda, const Vec& v, double, RngStream& r) {
            return sample_gaussian(r, v, lambda);
        },
        std::numeric_limits<double>::infinity(), RgoExactness::exact);
    zero_g.with_value([](const Vec&) { return 0.0; });

    RngStream rng(306, 0);
    Vec xs = Vec::Zero(1);
    Vec x(1);
    x << sample_gaussian_1d(rng, 0.0, marg_var);  // exact marginal draw
    const long long sweeps = 2000000, thin = 20;
    std::vector<double> kept;
    kept.reserve(sweeps / thin);
    double lambda_ridge = 1.0 / p.ridge;
    for (long long i = 0; i < sweeps; ++i) {
        Vec y = ysample(f, x, xs, p.eta, p.delta, p, rng);
        auto [lm, vm] = combine_quadratics(p.eta, y, lambda_ridge, xs);
        x = zero_g.sample(lm, vm, 0.0, rng);
        if (i % thin == 0) kept.push_back(x[0]);
    }
    auto st = summarize(kept);
    REQUIRE(std::fabs(st.mean) < 0.02 * std::sqrt(marg_var));
    REQUIRE(std::fabs(st.variance - marg_var) / marg_var < 0.05);
}

TEST_CASE("start distribution warmness for the joint chain by quadrature") {
    auto model = lasso_model_1d();
    const double L = model.meta.L, kappa = model.meta.kappa();
    auto p = JointParams::make(model.meta, 0.05 / 18.0, 1.0);

    double hw = 9.0;
    Quadrature1D z_start(
        [&](double x) { return -0.5 * (L + p.ridge) * x * x - std::fabs(x); }, -hw, hw, 4001);
    // x-marginal of the joint law up to normalization
    auto marg_log = [&](double x) {
        Vec v(1);
        v << x;
        double inner_hw = 12.0 * std::sqrt(p.eta);
        Quadrature1D zy(
            [&](double y) {
                Vec w(1);
                w << y;
                return -model.f.value(w) - (y - x) * (y - x) / (2.0 * p.eta);
            },
            x - inner_hw, x + inner_hw, 801);
        return -std::fabs(x) - 0.5 * p.ridge * x * x + zy.log_normalizer();
    };
    Quadrature1D z_marg(marg_log, -hw, hw, 801);
    double worst = -1e300;
    for (double x = -4.0; x <= 4.0; x += 0.2) {
        double lr = (-0.5 * (L + p.ridge) * x * x - std::fabs(x) - z_start.log_normalizer()) -
                    (marg_log(x) - z_marg.log_normalizer());
        worst = std::max(worst, lr);
    }
    REQUIRE(worst <= std::log(2.0) + 0.5 * std::log(1.0 + kappa) + 1e-6);
}

TEST_CASE("shared-min composite sampler on the 1d lasso model") {
    auto model = lasso_model_1d();
    CompositeProblem prob{model.f, model.g, model.x_star, 0.1};
    CompositeOptions opts;
    opts.ck = 1.0;

    Quadrature1D q([](double x) { return -0.5 * x * x - std::fabs(x); }, -9.0, 9.0, 4001);
    RngStream root(307, 0);
    const int n = 1500;
    std::vector<double> outs(n);
    double total_rounds = 0.0, omega_rejects = 0.0, theta_max = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream rng = root.substream(i);
        auto res = composite_sample_shared_min(prob, rng, opts);
        outs[i] = res.x[0];
        total_rounds += res.outer_rounds;
        omega_rejects += static_cast<double>(res.omega_rejections);
        theta_max = std::max(theta_max, res.theta_max);
    }
    auto st = summarize(outs);
    REQUIRE(std::fabs(st.mean - q.mean()) < 3.0 * st.se_mean);
    REQUIRE(std::fabs(st.variance - q.variance()) < 3.0 * st.se_variance);

    // expected number of joint-chain calls per accepted draw
    REQUIRE(total_rounds / n <= 8.0);
    // estimator bound inside Omega
    REQUIRE(theta_max <= 4.0);
    // Omega membership rate of the joint-chain outputs
    double member_rate = 1.0 - omega_rejects / total_rounds;
    double se = std::sqrt(member_rate * (1 - member_rate) / total_rounds);
    REQUIRE(member_rate >= 1.0 - prob.eps / 3.0 - 3.0 * se);
}

TEST_CASE("composite sampler shifts and matches quadrature moments") {
    // f = (x-1)^2/2, g = |x|: minimizer of f+g at 0, grad f there is -1
    auto f = FunctionOracle(
        [](const Vec& x) { return 0.5 * (x[0] - 1.0) * (x[0] - 1.0); },
        [](const Vec& x) {
            Vec g(1);
            g[0] = x[0] - 1.0;
            return g;
        },
        ProblemMeta(1.0, 1.0, 1));
    auto model = lasso_model_1d();
    Vec xs = Vec::Zero(1);
    CompositeProblem prob{f, model.g, xs, 0.1};
    CompositeOptions opts;
    opts.ck = 1.0;

    Quadrature1D q([](double x) { return -0.5 * (x - 1.0) * (x - 1.0) - std::fabs(x); },
                   -8.0, 9.0, 4001);
    RngStream root(308, 0);
    const int n = 1500;
    std::vector<double> outs(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng = root.substream(i);
        outs[i] = composite_sample(prob, rng, opts).x[0];
    }
    auto st = summarize(outs);
    REQUIRE(std::fabs(st.mean - q.mean()) < 3.0 * st.se_mean);
    REQUIRE(std::fabs(st.variance - q.variance()) < 3.0 * st.se_variance);
}

TEST_CASE("composite sampler with g = 0 agrees with the rejection pipeline") {
    auto f = FunctionOracle(
        [](const Vec& x) { return x[0] * x[0]; },
        [](const Vec& x) {
            Vec g(1);
            g[0] = 2.0 * x[0];
            return g;
        },
        ProblemMeta(2.0, 2.0, 1));
    Vec xs = Vec::Zero(1);
    RgoHandle zero_g(
        [](double lambda, const Vec& v, double, RngStream& r) {
            return sample_gaussian(r, v, lambda);
        },
        std::numeric_limits<double>::infinity(), RgoExactness::exact);
    zero_g.with_value([](const Vec&) { return 0.0; });

    CompositeProblem prob{f, zero_g, xs, 0.1};
    CompositeOptions opts;
    opts.ck = 1.0;
    RngStream root(309, 0);
    const int n = 1200;
    std::vector<Vec> a, b;
    for (int i = 0; i < n; ++i) {
        RngStream r1 = root.substream(2 * i);
        RngStream r2 = root.substream(2 * i + 1);
        a.push_back(composite_sample(prob, r1, opts).x);
        b.push_back(sample_wellconditioned(f, xs, 0.1, r2, 2.0).x);
    }
    REQUIRE(two_sample_test(a, b, RngStream(309, 77), 300).pass(0.01));
}

TEST_CASE("accelerated composition: inner subproblems have condition number <= 2") {
    auto f = FunctionOracle(
        [](const Vec& x) { return 0.5 * (4.0 * x[0] * x[0] + x[1] * x[1]); },
        [](const Vec& x) {
            Vec g(2);
            g[0] = 4.0 * x[0];
            g[1] = x[1];
            return g;
        },
        ProblemMeta(4.0, 1.0, 2));
    Vec v = Vec::Zero(2);
    auto sub = add_quadratic(f, 1.0 / f.meta().L, v);
    REQUIRE(sub.meta().L == Catch::Approx(8.0));
    REQUIRE(sub.meta().mu == Catch::Approx(5.0));
    REQUIRE(sub.meta().kappa() == Catch::Approx((4.0 + 4.0) / (4.0 + 1.0)));
    REQUIRE(sub.meta().kappa() <= 2.0);
}

TEST_CASE("accelerated composition with g = 0 agrees with the rejection pipeline") {
    auto f = FunctionOracle(
        [](const Vec& x) { return x[0] * x[0]; },
        [](const Vec& x) {
            Vec g(1);
            g[0] = 2.0 * x[0];
            return g;
        },
        ProblemMeta(2.0, 2.0, 1));
    Vec xs = Vec::Zero(1);
    RgoHandle zero_g(
        [](double lambda, const Vec& v, double, RngStream& r) {
            return sample_gaussian(r, v, lambda);
        },
        std::numeric_limits<double>::infinity(), RgoExactness::exact);
    zero_g.with_value([](const Vec&) { return 0.0; });
    zero_g.with_prox([](double, const Vec& v) { return v; });

    CompositeProblem prob{f, zero_g, xs, 0.1};
    AcceleratedOptions opts;
    opts.ck = 0.5;
    opts.reduction_constant = 2.0;
    RngStream root(311, 0);
    const int n = 500;
    std::vector<Vec> a, b;
    for (int i = 0; i < n; ++i) {
        RngStream r1 = root.substream(2 * i);
        RngStream r2 = root.substream(2 * i + 1);
        a.push_back(accelerated_composite_sample(prob, r1, opts).x);
        b.push_back(sample_wellconditioned(f, xs, 0.1, r2, 2.0).x);
    }
    REQUIRE(two_sample_test(a, b, RngStream(311, 7), 300).pass(0.01));
}

TEST_CASE("accelerated composite sampler matches quadrature on the lasso target") {
    auto model = lasso_model_1d();
    CompositeProblem prob{model.f, model.g, model.x_star, 0.1};
    AcceleratedOptions opts;
    opts.ck = 0.5;
    opts.reduction_constant = 2.0;

    Quadrature1D q([](double x) { return -0.5 * x * x - std::fabs(x); }, -9.0, 9.0, 4001);
    RngStream root(310, 0);
    const int n = 400;
    std::vector<double> outs(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng = root.substream(i);
        outs[i] = accelerated_composite_sample(prob, rng, opts).x[0];
    }
    auto st = summarize(outs);
    REQUIRE(std::fabs(st.mean - q.mean()) < 3.0 * st.se_mean);
    REQUIRE(std::fabs(st.variance - q.variance()) < 4.0 * st.se_variance);
}
