#pragma once

#include <cmath>
#include <limits>
#include "rgos/types.hpp"

// Scalar special functions shared by the samplers, the quadrature oracle
// and the statistical tests. Everything here is deterministic.

namespace rgos {

inline constexpr double kLog2Pi = 1.8378770664093454836;
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// log Phi(x), stable into the deep left tail.
inline double log_norm_cdf(double x) {
    if (x > -30.0) {
        double c = 0.5 * std::erfc(-x / kSqrt2);
        if (c > 0.0) return std::log(c);
    }
    // Asymptotic expansion of Mills' ratio for x << 0.
    double x2 = x * x;
    double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - 0.5 * kLog2Pi - std::log(-x) + std::log(series);
}

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_diff_exp(double a, double b) {
    // log(e^a - e^b) for a > b
    return a + std::log1p(-std::exp(b - a));
}

namespace detail {

// Acklam's rational approximation for the probit function.
inline double inverse_norm_cdf_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Inverse standard normal CDF, refined to double precision by Halley steps.
inline double inverse_norm_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("inverse_norm_cdf: p must lie in (0, 1)");
    double x = detail::inverse_norm_cdf_approx(p);
    for (int i = 0; i < 2; ++i) {
        if (0.5 * x * x > 700.0) break;  // pdf underflow, approximation stands
        double e = norm_cdf(x) - p;
        double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

/// Lower regularized incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ConfigError("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // series expansion
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

inline double chi_square_sf(double x, double k) {
    return 1.0 - gamma_p(0.5 * k, 0.5 * x);
}

/// Kolmogorov distribution survival function Q(t) = 2 sum (-1)^{k-1} e^{-2k^2 t^2}.
inline double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, sum));
}

}  // namespace rgos
