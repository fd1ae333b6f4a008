#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>
#include "rgos/gaussian.hpp"
#include "rgos/oracle.hpp"
#include "rgos/quadrature.hpp"
#include "rgos/rng.hpp"
#include "rgos/stats.hpp"
#include "rgos/types.hpp"

// Built-in target distributions with exact restricted Gaussian oracles and
// analytic or quadrature ground truth; these power the validation suites.

namespace rgos {

enum class ModelKind { gaussian, box_gaussian, lasso_gaussian, logistic_finitesum, custom_1d };
enum class GroundTruth { closed_form, quadrature_1d, quadrature_2d, reference_chain };

struct ModelSpec {
    ModelKind kind = ModelKind::gaussian;
    int dim = 1;
    std::vector<double> spectrum = {1.0};  // precision diagonal of the smooth part
    std::vector<double> center = {0.0};    // quadratic center
    double box_lo = -1.0, box_hi = 1.0;    // box_gaussian
    double l1_weight = 1.0;                // lasso_gaussian
    // logistic_finitesum data
    int n_data = 0;
    std::vector<std::vector<double>> features;
    std::vector<double> labels;  // +-1
    double ridge = 0.1;
    std::string custom_name = "logistic_quadratic";  // custom_1d targets
    GroundTruth ground_truth = GroundTruth::closed_form;

    static ModelSpec gaussian_spec(std::vector<double> precisions,
                                   std::vector<double> centers = {}) {
        ModelSpec s;
        s.kind = ModelKind::gaussian;
        s.dim = static_cast<int>(precisions.size());
        s.spectrum = std::move(precisions);
        s.center = centers.empty() ? std::vector<double>(s.dim, 0.0) : std::move(centers);
        return s;
    }
};

/// A constructed model: oracles, exact RGO handles, minimizer, ground truth.
struct Model {
    ModelSpec spec;
    ProblemMeta meta;           // of the smooth part f (or the full density)
    FunctionOracle f;           // smooth part
    RgoHandle g;                // RGO for the composite part (zero function when absent)
    RgoHandle rgo_total;        // exact RGO for the full negative log-density
    std::optional<FiniteSumOracle> fs;
    Vec x_star;                 // minimizer of f + g
    bool has_composite = false;

    std::function<double(const Vec&)> neg_log_density;       // full, unnormalized
    std::function<Vec(RngStream&)> exact_sampler;            // null when unavailable
    std::function<double(double)> marginal_log_density_1d;   // coordinate 0, others at truth mean

    Vec target_mean;      // per-coordinate ground truth (quadratic kinds)
    Vec target_variance;  // diagonal
};

namespace detail {

inline RgoHandle zero_rgo() {
    RgoHandle h(
        [](double lambda, const Vec& v, double, RngStream& rng) {
            return sample_gaussian(rng, v, lambda);
        },
        std::numeric_limits<double>::infinity(), RgoExactness::exact);
    h.with_value([](const Vec&) { return 0.0; });
    h.with_subgradient([](const Vec& x) { return Vec(Vec::Zero(x.size())); });
    h.with_prox([](double, const Vec& v) { return v; });
    return h;
}

// RGO for densities prop to exp(-||x-v||^2/(2 lambda) - sum_i s_i (x_i-c_i)^2 / 2),
// optionally restricted to a box or l1-regularized; all coordinate-separable.
struct SeparableRgoSpec {
    std::vector<double> quad_diag;    // s_i of the folded smooth part (0 = none)
    std::vector<double> quad_center;  // c_i
    bool box = false;
    double lo = 0.0, hi = 0.0;
    double l1 = 0.0;
};

inline RgoHandle separable_rgo(const SeparableRgoSpec& spec) {
    RgoHandle h(
        [spec](double lambda, const Vec& v, double, RngStream& rng) {
            Vec out(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                double s = spec.quad_diag.empty() ? 0.0 : spec.quad_diag[i];
                double prec = 1.0 / lambda + s;
                double mean = (v[i] / lambda +
                               s * (spec.quad_center.empty() ? 0.0 : spec.quad_center[i])) /
                              prec;
                double var = 1.0 / prec;
                if (spec.box) {
                    TruncatedGaussian1D tg{mean, var, spec.lo, spec.hi};
                    out[i] = sample_truncated_gaussian_1d(rng, tg);
                } else if (spec.l1 > 0.0) {
                    out[i] = sample_l1_quadratic_1d(rng, mean, var, spec.l1);
                } else {
                    out[i] = sample_gaussian_1d(rng, mean, var);
                }
            }
            return out;
        },
        std::numeric_limits<double>::infinity(), RgoExactness::exact);
    return h;
}

inline FunctionOracle diag_quadratic_oracle(const std::vector<double>& s,
                                            const std::vector<double>& c) {
    int d = static_cast<int>(s.size());
    double L = *std::max_element(s.begin(), s.end());
    double mu = *std::min_element(s.begin(), s.end());
    ProblemMeta meta(L, mu, d);
    return FunctionOracle(
        [s, c](const Vec& x) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                double dlt = x[i] - c[i];
                acc += 0.5 * s[i] * dlt * dlt;
            }
            return acc;
        },
        [s, c](const Vec& x) {
            Vec gr(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) gr[i] = s[i] * (x[i] - c[i]);
            return gr;
        },
        meta);
}

inline double truncated_normal_mean(double mean, double var, double lo, double hi) {
    double s = std::sqrt(var);
    double a = (lo - mean) / s, b = (hi - mean) / s;
    double z = norm_cdf(b) - norm_cdf(a);
    return mean + s * (norm_pdf(a) - norm_pdf(b)) / z;
}

inline double truncated_normal_variance(double mean, double var, double lo, double hi) {
    double s = std::sqrt(var);
    double a = (lo - mean) / s, b = (hi - mean) / s;
    double z = norm_cdf(b) - norm_cdf(a);
    double pa = norm_pdf(a), pb = norm_pdf(b);
    double ta = std::isinf(a) ? 0.0 : a * pa;
    double tb = std::isinf(b) ? 0.0 : b * pb;
    double m = (pa - pb) / z;
    return var * (1.0 + (ta - tb) / z - m * m);
}

}  // namespace detail

inline Model build_model(const ModelSpec& spec, RngStream data_rng = RngStream(7, 7)) {
    Model m;
    m.spec = spec;

    switch (spec.kind) {
        case ModelKind::gaussian:
        case ModelKind::box_gaussian:
        case ModelKind::lasso_gaussian: {
            require(static_cast<int>(spec.spectrum.size()) == spec.dim &&
                        static_cast<int>(spec.center.size()) == spec.dim,
                    "build_model: spectrum/center must match dim");
            m.f = detail::diag_quadratic_oracle(spec.spectrum, spec.center);
            m.meta = m.f.meta();
            const auto s = spec.spectrum;
            const auto c = spec.center;

            detail::SeparableRgoSpec total;
            total.quad_diag = s;
            total.quad_center = c;

            if (spec.kind == ModelKind::gaussian) {
                m.g = detail::zero_rgo();
                m.rgo_total = detail::separable_rgo(total);
                m.x_star = Eigen::Map<const Vec>(c.data(), spec.dim);
                m.target_mean = m.x_star;
                m.target_variance = Vec(spec.dim);
                for (int i = 0; i < spec.dim; ++i) m.target_variance[i] = 1.0 / s[i];
                m.exact_sampler = [mean = m.target_mean, var = m.target_variance](RngStream& r) {
                    Vec x(mean.size());
                    for (Eigen::Index i = 0; i < x.size(); ++i)
                        x[i] = sample_gaussian_1d(r, mean[i], var[i]);
                    return x;
                };
            } else if (spec.kind == ModelKind::box_gaussian) {
                double lo = spec.box_lo, hi = spec.box_hi;
                detail::SeparableRgoSpec gonly;
                gonly.box = true;
                gonly.lo = lo;
                gonly.hi = hi;
                m.g = detail::separable_rgo(gonly);
                m.g.with_value([lo, hi](const Vec& x) {
                    for (Eigen::Index i = 0; i < x.size(); ++i)
                        if (x[i] < lo || x[i] > hi)
                            return std::numeric_limits<double>::infinity();
                    return 0.0;
                });
                m.g.with_prox([lo, hi](double, const Vec& v) {
                    Vec out = v;
                    for (Eigen::Index i = 0; i < out.size(); ++i)
                        out[i] = std::clamp(out[i], lo, hi);
                    return out;
                });
                total.box = true;
                total.lo = lo;
                total.hi = hi;
                m.rgo_total = detail::separable_rgo(total);
                m.has_composite = true;
                m.x_star = Vec(spec.dim);
                m.target_mean = Vec(spec.dim);
                m.target_variance = Vec(spec.dim);
                for (int i = 0; i < spec.dim; ++i) {
                    m.x_star[i] = std::clamp(c[i], lo, hi);
                    m.target_mean[i] = detail::truncated_normal_mean(c[i], 1.0 / s[i], lo, hi);
                    m.target_variance[i] =
                        detail::truncated_normal_variance(c[i], 1.0 / s[i], lo, hi);
                }
                m.exact_sampler = [s, c, lo, hi](RngStream& r) {
                    Vec x(static_cast<Eigen::Index>(s.size()));
                    for (std::size_t i = 0; i < s.size(); ++i) {
                        TruncatedGaussian1D tg{c[i], 1.0 / s[i], lo, hi};
                        x[static_cast<Eigen::Index>(i)] = sample_truncated_gaussian_1d(r, tg);
                    }
                    return x;
                };
            } else {
                double w = spec.l1_weight;
                detail::SeparableRgoSpec gonly;
                gonly.l1 = w;
                m.g = detail::separable_rgo(gonly);
                m.g.with_value([w](const Vec& x) { return w * x.lpNorm<1>(); });
                m.g.with_subgradient([w](const Vec& x) {
                    Vec out(x.size());
                    for (Eigen::Index i = 0; i < x.size(); ++i)
                        out[i] = w * (x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0));
                    return out;
                });
                m.g.with_prox([w](double lambda, const Vec& v) {
                    Vec out(v.size());
                    double t = lambda * w;
                    for (Eigen::Index i = 0; i < v.size(); ++i)
                        out[i] = std::copysign(std::max(std::fabs(v[i]) - t, 0.0), v[i]);
                    return out;
                });
                total.l1 = w;
                m.rgo_total = detail::separable_rgo(total);
                m.has_composite = true;
                m.x_star = Vec(spec.dim);
                m.target_mean = Vec(spec.dim);
                m.target_variance = Vec(spec.dim);
                for (int i = 0; i < spec.dim; ++i) {
                    m.x_star[i] =
                        std::copysign(std::max(std::fabs(c[i]) - w / s[i], 0.0), c[i]);
                    Quadrature1D q(
                        [&, i](double x) {
                            double dlt = x - c[i];
                            return -0.5 * s[i] * dlt * dlt - w * std::fabs(x);
                        },
                        c[i] - quadrature_halfwidth(s[i]), c[i] + quadrature_halfwidth(s[i]),
                        8001);
                    m.target_mean[i] = q.mean();
                    m.target_variance[i] = q.variance();
                }
                m.exact_sampler = [s, c, w](RngStream& r) {
                    Vec x(static_cast<Eigen::Index>(s.size()));
                    for (std::size_t i = 0; i < s.size(); ++i)
                        x[static_cast<Eigen::Index>(i)] =
                            sample_l1_quadratic_1d(r, c[i], 1.0 / s[i], w);
                    return x;
                };
            }

            auto g_handle = m.g;
            auto f_handle = m.f;
            m.neg_log_density = [f_handle, g_handle](const Vec& x) {
                return f_handle.value(x) + g_handle.value(x);
            };
            double s0 = s[0], c0 = c[0];
            ModelKind kind = spec.kind;
            double lo = spec.box_lo, hi = spec.box_hi, w = spec.l1_weight;
            m.marginal_log_density_1d = [s0, c0, kind, lo, hi, w](double x) {
                double base = -0.5 * s0 * (x - c0) * (x - c0);
                if (kind == ModelKind::box_gaussian)
                    return (x < lo || x > hi) ? -std::numeric_limits<double>::infinity()
                                              : base;
                if (kind == ModelKind::lasso_gaussian) return base - w * std::fabs(x);
                return base;
            };
            break;
        }

        case ModelKind::logistic_finitesum: {
            require(spec.n_data >= 1, "build_model: logistic model needs n_data >= 1");
            int n = spec.n_data, d = spec.dim;
            std::vector<std::vector<double>> feats = spec.features;
            std::vector<double> labels = spec.labels;
            if (feats.empty()) {
                // synthesize a dataset deterministically from data_rng
                feats.resize(n, std::vector<double>(d));
                labels.resize(n);
                Vec truth(d);
                for (int j = 0; j < d; ++j) truth[j] = sample_gaussian_1d(data_rng, 0.0, 1.0);
                for (int i = 0; i < n; ++i) {
                    double dot = 0.0;
                    for (int j = 0; j < d; ++j) {
                        feats[i][j] = sample_gaussian_1d(data_rng, 0.0, 1.0) / std::sqrt(d);
                        dot += feats[i][j] * truth[j];
                    }
                    double pr = 1.0 / (1.0 + std::exp(-dot));
                    labels[i] = (data_rng.uniform() < pr) ? 1.0 : -1.0;
                }
            }
            std::vector<FunctionOracle> summands;
            summands.reserve(n);
            for (int i = 0; i < n; ++i) {
                Vec a = Eigen::Map<const Vec>(feats[i].data(), d);
                double b = labels[i];
                double Li = 0.25 * a.squaredNorm() + spec.ridge;
                ProblemMeta meta(Li, spec.ridge, d);
                double ridge = spec.ridge;
                summands.emplace_back(
                    [a, b, ridge](const Vec& x) {
                        double t = -b * a.dot(x);
                        double soft = t > 30.0 ? t : std::log1p(std::exp(t));
                        return soft + 0.5 * ridge * x.squaredNorm();
                    },
                    [a, b, ridge](const Vec& x) {
                        double t = -b * a.dot(x);
                        double sig = 1.0 / (1.0 + std::exp(-t));
                        return Vec(-b * sig * a + ridge * x);
                    },
                    meta);
            }
            m.fs = FiniteSumOracle(std::move(summands), spec.ridge);
            m.meta = m.fs->meta();
            auto fsv = *m.fs;
            m.f = FunctionOracle([fsv](const Vec& x) { return fsv.full_value(x); },
                                 [fsv](const Vec& x) { return fsv.full_gradient(x); }, m.meta);
            m.g = detail::zero_rgo();
            m.neg_log_density = [fsv](const Vec& x) { return fsv.full_value(x); };
            break;
        }

        case ModelKind::custom_1d: {
            require(spec.dim == 1, "build_model: custom_1d is one-dimensional");
            if (spec.custom_name == "logistic_quadratic") {
                // f(x) = log(1 + e^x) + x^2/2; f'' = sigma(1-sigma) + 1 in (1, 1.25]
                ProblemMeta meta(1.25, 1.0, 1);
                m.f = FunctionOracle(
                    [](const Vec& x) {
                        double t = x[0];
                        double soft = t > 30.0 ? t : std::log1p(std::exp(t));
                        return soft + 0.5 * t * t;
                    },
                    [](const Vec& x) {
                        double t = x[0];
                        double sig = 1.0 / (1.0 + std::exp(-t));
                        Vec g(1);
                        g[0] = sig + t;
                        return g;
                    },
                    meta);
            } else if (spec.custom_name == "logcosh") {
                // f(x) = 2 log cosh(x) + x^2/2; f'' = 2 sech^2 + 1 in (1, 3]
                ProblemMeta meta(3.0, 1.0, 1);
                m.f = FunctionOracle(
                    [](const Vec& x) {
                        double t = std::fabs(x[0]);
                        double lc = t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
                        return 2.0 * lc + 0.5 * x[0] * x[0];
                    },
                    [](const Vec& x) {
                        Vec g(1);
                        g[0] = 2.0 * std::tanh(x[0]) + x[0];
                        return g;
                    },
                    meta);
            } else {
                throw ConfigError("build_model: unknown custom_1d target '" +
                                  spec.custom_name + "'");
            }
            m.meta = m.f.meta();
            m.g = detail::zero_rgo();
            auto f_handle = m.f;
            m.neg_log_density = [f_handle](const Vec& x) { return f_handle.value(x); };
            m.marginal_log_density_1d = [f_handle](double x) {
                Vec v(1);
                v[0] = x;
                return -f_handle.value(v);
            };
            break;
        }
    }
    return m;
}

/// Quadrature check of the normalization-ratio bound: the ratio
/// int exp(-f) / int exp(-f - (x-x*)^2/(2 lambda)) against (1 + 1/(mu lambda))^{d/2}
/// for a one-dimensional f.
struct NormRatioResult {
    double ratio;
    double bound;
    bool pass() const { return ratio <= bound * (1.0 + 1e-9); }
};

inline NormRatioResult normratio_check(const std::function<double(double)>& f_1d, double mu,
                                       double x_star, double lambda, int nodes = 8001) {
    require(mu > 0.0 && lambda > 0.0, "normratio_check: mu, lambda must be positive");
    double hw = quadrature_halfwidth(mu);
    Quadrature1D plain([&](double x) { return -f_1d(x); }, x_star - hw, x_star + hw, nodes);
    Quadrature1D penalized(
        [&](double x) {
            double dlt = x - x_star;
            return -f_1d(x) - dlt * dlt / (2.0 * lambda);
        },
        x_star - hw, x_star + hw, nodes);
    double ratio = std::exp(plain.log_normalizer() - penalized.log_normalizer());
    double bound = std::sqrt(1.0 + 1.0 / (mu * lambda));
    return {ratio, bound};
}

/// Moment diagnostics of a sample stream from a mu-strongly logconcave law:
/// directional second moments, the fourth-moment bound 3 d^2 / mu^2, and the
/// squared distance to the minimizer d/mu.
struct MomentCheckReport {
    bool directional_pass = true;
    bool fourth_pass = true;
    bool distance_pass = true;
    double worst_directional = 0.0;  // max over directions of (E - bound)/SE
    double fourth_value = 0.0, fourth_bound = 0.0, fourth_se = 0.0;
    double distance_value = 0.0, distance_bound = 0.0, distance_se = 0.0;
    bool all_pass() const { return directional_pass && fourth_pass && distance_pass; }
};

inline MomentCheckReport slc_moment_check(const std::vector<Vec>& samples, double mu,
                                          const Vec& x_star, RngStream rng,
                                          int n_directions = 10) {
    require(samples.size() >= 100, "slc_moment_check: need a sizable sample");
    const int d = static_cast<int>(samples.front().size());
    const double n = static_cast<double>(samples.size());
    Vec mean = Vec::Zero(d);
    for (const auto& x : samples) mean += x;
    mean /= n;

    MomentCheckReport rep;
    rep.worst_directional = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_directions; ++k) {
        Vec theta(d);
        for (int i = 0; i < d; ++i) theta[i] = standard_normal(rng);
        theta.normalize();
        std::vector<double> proj2(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double t = theta.dot(samples[i] - mean);
            proj2[i] = t * t;
        }
        auto st = summarize(proj2);
        double slack = (st.mean - 1.0 / mu) / st.se_mean;
        rep.worst_directional = std::max(rep.worst_directional, slack);
        if (slack > 3.0) rep.directional_pass = false;
    }

    std::vector<double> fourth(samples.size()), dist2(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double c2 = (samples[i] - mean).squaredNorm();
        fourth[i] = c2 * c2;
        dist2[i] = (samples[i] - x_star).squaredNorm();
    }
    auto f4 = summarize(fourth);
    rep.fourth_value = f4.mean;
    rep.fourth_bound = 3.0 * d * d / (mu * mu);
    rep.fourth_se = f4.se_mean;
    rep.fourth_pass = f4.mean <= rep.fourth_bound + 3.0 * f4.se_mean;

    auto d2 = summarize(dist2);
    rep.distance_value = d2.mean;
    rep.distance_bound = d / mu;
    rep.distance_se = d2.se_mean;
    rep.distance_pass = d2.mean <= rep.distance_bound + 3.0 * d2.se_mean;
    return rep;
}

/// Quadrature check of the mean-versus-mode perturbation bound
/// ||E[y] - x|| <= 2 eta L R for the density exp(-f(y) - (y-x)^2/(2 eta)),
/// under eta <= min(1/(2 L^2 R^2), R^2/(400 d^2)).
struct MinPerturbResult {
    double deviation;
    double bound;
    double eta;
    bool pass() const { return deviation <= bound * (1.0 + 1e-9); }
};

inline MinPerturbResult min_perturb_check(const std::function<double(double)>& f_1d, double L,
                                          double x_star, double x, double R,
                                          int nodes = 8001) {
    require(std::fabs(x - x_star) <= R, "min_perturb_check: need |x - x*| <= R");
    double eta = std::min(1.0 / (2.0 * L * L * R * R), R * R / 400.0);
    double hw = 12.0 * std::sqrt(eta);
    Quadrature1D q(
        [&](double y) {
            double dlt = y - x;
            return -f_1d(y) - dlt * dlt / (2.0 * eta);
        },
        x - hw, x + hw, nodes);
    return {std::fabs(q.mean() - x), 2.0 * eta * L * R, eta};
}

}  // namespace rgos
