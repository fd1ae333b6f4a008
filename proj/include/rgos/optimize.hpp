#pragma once

#include <cmath>
#include "rgos/oracle.hpp"
#include "rgos/rng.hpp"
#include "rgos/types.hpp"

// Minimizer pre-computation: accelerated gradient descent for smooth
// strongly convex objectives, accelerated proximal gradient for composite
// objectives, and SVRG for finite sums.

namespace rgos {

struct OptResult {
    Vec x;
    double grad_norm = 0.0;  // prox-gradient-mapping norm for composite runs
    int iterations = 0;
    std::uint64_t value_queries = 0;
    std::uint64_t gradient_queries = 0;
    std::vector<double> anchor_values;  // SVRG: objective at each epoch anchor
};

inline constexpr double kDefaultOptTol = 1e-8;

/// Nesterov accelerated gradient descent for L-smooth, mu-strongly convex f.
/// Stops when ||grad f|| <= tol.
inline OptResult agd_minimize(const FunctionOracle& f, const Vec& x0, double tol,
                              int max_iter = 100000) {
    require(tol > 0.0, "agd_minimize: tol must be positive");
    const double L = f.meta().L, mu = f.meta().mu;
    const double beta = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));
    std::uint64_t v0 = f.counters().value_queries.load();
    std::uint64_t g0 = f.counters().gradient_queries.load();

    Vec x = x0, y = x0;
    Vec g = f.gradient(x);
    double gn = g.norm();
    int it = 0;
    while (gn > tol) {
        if (it >= max_iter)
            throw ConvergenceError("agd_minimize: max_iter exceeded, grad_norm=" +
                                   std::to_string(gn));
        Vec x_next = y - f.gradient(y) / L;
        y = x_next + beta * (x_next - x);
        x = x_next;
        g = f.gradient(x);
        gn = g.norm();
        ++it;
    }
    return {x, gn, it, f.counters().value_queries.load() - v0,
            f.counters().gradient_queries.load() - g0, {}};
}

/// FISTA-style accelerated proximal gradient for f + g where g is accessed
/// through a proximal oracle, called with lambda = 1/L throughout. Stops on
/// the gradient-mapping norm L * ||y - prox(y - grad f(y)/L)||.
inline OptResult prox_grad_minimize(const FunctionOracle& f, const RgoHandle::ProxFn& g_prox,
                                    const Vec& x0, double tol, int max_iter = 100000) {
    require(tol > 0.0, "prox_grad_minimize: tol must be positive");
    require(static_cast<bool>(g_prox), "prox_grad_minimize: proximal oracle required");
    const double L = f.meta().L, mu = f.meta().mu;
    const double beta = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));
    std::uint64_t v0 = f.counters().value_queries.load();
    std::uint64_t g0 = f.counters().gradient_queries.load();

    Vec x = x0, y = x0;
    double gmap = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec x_next = g_prox(1.0 / L, Vec(y - f.gradient(y) / L));
        gmap = L * (y - x_next).norm();
        Vec y_next = x_next + beta * (x_next - x);
        x = x_next;
        y = y_next;
        if (gmap <= tol)
            return {x, gmap, it + 1, f.counters().value_queries.load() - v0,
                    f.counters().gradient_queries.load() - g0, {}};
    }
    throw ConvergenceError("prox_grad_minimize: max_iter exceeded, gradient mapping norm=" +
                           std::to_string(gmap));
}

struct SvrgOptions {
    double epoch_factor = 2.0;   // inner steps per epoch = ceil(epoch_factor * kappa)
    double step_factor = 0.1;    // step size = step_factor / L
    int max_epochs = 10000;
};

/// Epoch-based variance-reduced SGD. Full gradient at each epoch anchor;
/// inner steps use grad f_i(x) - grad f_i(anchor) + full gradient. Stops
/// when the anchor's full-gradient norm reaches tol.
inline OptResult svrg_minimize(const FiniteSumOracle& fs, const Vec& x0, double tol,
                               RngStream& rng, SvrgOptions opts = {},
                               bool record_anchor_values = false) {
    require(tol > 0.0, "svrg_minimize: tol must be positive");
    const double L = fs.meta().L;
    const int n = fs.n();
    const int m = std::max(1, static_cast<int>(std::ceil(opts.epoch_factor * fs.meta().kappa())));
    const double step = opts.step_factor / L;
    std::uint64_t v0 = fs.summand_value_queries();
    std::uint64_t g0 = fs.summand_gradient_queries();

    OptResult res;
    Vec anchor = x0;
    int total_steps = 0;
    for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
        if (record_anchor_values) res.anchor_values.push_back(fs.full_value(anchor));
        Vec full_grad = fs.full_gradient(anchor);
        double gn = full_grad.norm();
        if (gn <= tol) {
            res.x = anchor;
            res.grad_norm = gn;
            res.iterations = total_steps;
            res.value_queries = fs.summand_value_queries() - v0;
            res.gradient_queries = fs.summand_gradient_queries() - g0;
            return res;
        }
        Vec x = anchor;
        for (int s = 0; s < m; ++s) {
            int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            Vec v = fs.summand_gradient(i, x) - fs.summand_gradient(i, anchor) + full_grad;
            x -= step * v;
            ++total_steps;
        }
        anchor = x;
    }
    throw ConvergenceError("svrg_minimize: max_epochs exceeded");
}

}  // namespace rgos
