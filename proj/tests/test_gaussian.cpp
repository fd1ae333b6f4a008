#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include "rgos/gaussian.hpp"
#include "rgos/quadrature.hpp"
#include "rgos/stats.hpp"

using namespace rgos;

TEST_CASE("isotropic gaussian moments") {
    RngStream rng(11, 0);
    const int d = 4, n = 100000;
    Vec mean = Vec::Zero(d);
    Vec coord_sum = Vec::Zero(d);
    double sqnorm_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec z = sample_gaussian(rng, mean, 1.0);
        coord_sum += z;
        sqnorm_sum += z.squaredNorm();
    }
    for (int j = 0; j < d; ++j)
        REQUIRE(std::fabs(coord_sum[j] / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    // E||z||^2 = d, Var ||z||^2 = 2d
    double se = std::sqrt(2.0 * d / n);
    REQUIRE(std::fabs(sqnorm_sum / n - d) < 5.0 * se);
}

TEST_CASE("fixed seed replay is identical") {
    Vec mean = Vec::Zero(3);
    RngStream a(5, 2), b(5, 2);
    for (int i = 0; i < 100; ++i) {
        Vec xa = sample_gaussian(a, mean, 2.5);
        Vec xb = sample_gaussian(b, mean, 2.5);
        REQUIRE(xa == xb);
    }
}

TEST_CASE("nonpositive variance rejected") {
    RngStream rng(1, 1);
    Vec mean = Vec::Zero(2);
    REQUIRE_THROWS_AS(sample_gaussian(rng, mean, 0.0), ConfigError);
    REQUIRE_THROWS_AS(sample_gaussian(rng, mean, -1.0), ConfigError);
}

TEST_CASE("half-normal mean") {
    RngStream rng(21, 0);
    TruncatedGaussian1D tg{0.0, 1.0, 0.0, std::numeric_limits<double>::infinity()};
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_truncated_gaussian_1d(rng, tg);
    auto st = summarize(xs);
    double expected = std::sqrt(2.0 / M_PI);
    REQUIRE(std::fabs(st.mean - expected) < 4.0 * st.se_mean);
}

TEST_CASE("untruncated reduces to plain gaussian") {
    RngStream rng(22, 0);
    TruncatedGaussian1D tg;  // (-inf, inf), standard
    const int n = 50000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_truncated_gaussian_1d(rng, tg);
    auto ks = ks_test_cdf(xs, [](double t) { return norm_cdf(t); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("far interval: support and KS against quadrature CDF") {
    RngStream rng(23, 0);
    TruncatedGaussian1D tg{5.0, 1.0, -1.0, 1.0};
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = sample_truncated_gaussian_1d(rng, tg);
        REQUIRE(xs[i] >= -1.0);
        REQUIRE(xs[i] <= 1.0);
    }
    Quadrature1D q([](double x) { return -0.5 * (x - 5.0) * (x - 5.0); }, -1.0, 1.0, 4001);
    auto ks = ks_test_cdf(xs, [&](double t) { return q.cdf(t); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("DKW band against quadrature CDF") {
    RngStream rng(24, 0);
    TruncatedGaussian1D tg{0.5, 2.0, -0.5, 3.0};
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_truncated_gaussian_1d(rng, tg);
    Quadrature1D q([](double x) { return -0.25 * (x - 0.5) * (x - 0.5); }, -0.5, 3.0, 4001);
    double dev = empirical_cdf_sup_deviation(xs, [&](double t) { return q.cdf(t); });
    REQUIRE(dev <= dkw_halfwidth(n, 0.01));
}

TEST_CASE("deep tail interval sampling stays exact") {
    RngStream rng(25, 0);
    TruncatedGaussian1D tg{0.0, 1.0, 9.0, 9.5};
    const int n = 20000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = sample_truncated_gaussian_1d(rng, tg);
        REQUIRE(xs[i] >= 9.0);
        REQUIRE(xs[i] <= 9.5);
    }
    Quadrature1D q([](double x) { return -0.5 * x * x; }, 9.0, 9.5, 4001);
    auto ks = ks_test_cdf(xs, [&](double t) { return q.cdf(t); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("interval mass underflow is reported") {
    RngStream rng(26, 0);
    TruncatedGaussian1D tg{0.0, 1.0, 40.0, 41.0};
    REQUIRE_THROWS_AS(sample_truncated_gaussian_1d(rng, tg), UnderflowError);
}

TEST_CASE("l1 quadratic sampler: regularizer off gives plain gaussian") {
    RngStream rng(31, 0);
    const int n = 50000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_l1_quadratic_1d(rng, 0.3, 2.0, 0.0);
    auto ks = ks_test_cdf(xs, [](double t) { return norm_cdf((t - 0.3) / std::sqrt(2.0)); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("l1 quadratic sampler: symmetric at v = 0") {
    RngStream rng(32, 0);
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_l1_quadratic_1d(rng, 0.0, 1.0, 1.0);
    auto st = summarize(xs);
    REQUIRE(std::fabs(st.mean) < 4.0 * st.se_mean);
}

TEST_CASE("l1 quadratic sampler: KS against quadrature") {
    RngStream rng(33, 0);
    const double v = 1.0, lambda = 0.5, reg = 2.0;
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_l1_quadratic_1d(rng, v, lambda, reg);
    Quadrature1D q(
        [&](double x) { return -(x - v) * (x - v) / (2.0 * lambda) - reg * std::fabs(x); },
        -8.0, 9.0, 8001);
    auto ks = ks_test_cdf(xs, [&](double t) { return q.cdf(t); });
    REQUIRE(ks.p_value > 0.01);
}

TEST_CASE("log gaussian normalizer values") {
    REQUIRE(log_gaussian_normalizer(1.0 / (2.0 * M_PI), 1) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(log_gaussian_normalizer(1.0, 2) == Catch::Approx(std::log(2.0 * M_PI)));
    REQUIRE(log_gaussian_normalizer(3.0, 4) == Catch::Approx(2.0 * std::log(6.0 * M_PI)));
    REQUIRE_THROWS_AS(log_gaussian_normalizer(0.0, 1), ConfigError);
}

TEST_CASE("subgaussian tail bound holds empirically") {
    RngStream rng(41, 0);
    const int d = 6, n = 50000;
    const double mu = 2.0, delta = 0.1;
    double radius = subgaussian_radius(mu, d, delta);
    Vec zero = Vec::Zero(d);
    int exceed = 0;
    for (int i = 0; i < n; ++i) {
        Vec x = sample_gaussian(rng, zero, 1.0 / mu);
        if (x.norm() > radius) ++exceed;
    }
    double frac = static_cast<double>(exceed) / n;
    double se = std::sqrt(delta * (1.0 - delta) / n);
    REQUIRE(frac <= delta + 3.0 * se);
}

TEST_CASE("reflection coupling: exact marginals and coalescence rate") {
    RngStream rng(51, 0);
    const double eta = 0.7;
    Vec x(2), xp(2);
    x << 0.0, 0.0;
    xp << std::sqrt(eta), 0.0;  // ||x - x'|| = sqrt(eta)
    const int n = 50000;
    int coupled_count = 0;
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) {
        bool coupled = false;
        auto [y, yp] = gaussian_reflection_coupling(rng, x, xp, eta, &coupled);
        coupled_count += coupled ? 1 : 0;
        REQUIRE((coupled ? (y - yp).norm() == 0.0 : true));
        ys[i] = yp[0];
    }
    // marginal of the second draw must stay N(xp, eta I)
    auto ks = ks_test_cdf(ys, [&](double t) { return norm_cdf((t - xp[0]) / std::sqrt(eta)); });
    REQUIRE(ks.p_value > 0.01);
    // TV between the two proposal laws is below 1/2 at this separation
    double not_coupled = 1.0 - static_cast<double>(coupled_count) / n;
    REQUIRE(not_coupled <= 0.5 + 3.0 / std::sqrt(static_cast<double>(n)));
}
