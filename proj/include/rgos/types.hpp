#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rgos {

using Vec = Eigen::VectorXd;

// Invalid parameters or an incompatible (model, sampler) pairing.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A runtime condition that signals violated metadata (e.g. a rejection
// sampler exceeding its round cap, or an overflowing estimator).
struct AnomalyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An optimizer hit its iteration cap before reaching tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An operation that needs an oracle capability the caller did not provide.
struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Smoothness / strong-convexity metadata of a negative log-density.
struct ProblemMeta {
    double L = 1.0;   // upper Hessian bound
    double mu = 1.0;  // lower Hessian bound
    int dim = 1;

    ProblemMeta() = default;
    ProblemMeta(double L_, double mu_, int dim_) : L(L_), mu(mu_), dim(dim_) {
        if (!(L >= mu && mu > 0.0))
            throw ConfigError("ProblemMeta: need L >= mu > 0, got L=" + std::to_string(L) +
                              " mu=" + std::to_string(mu));
        if (dim < 1) throw ConfigError("ProblemMeta: dim must be >= 1");
    }

    double kappa() const { return L / mu; }
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

}  // namespace rgos
