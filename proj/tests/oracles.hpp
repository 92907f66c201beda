#pragma once

// Reference computations written independently of the library: plain closed
// forms, bisection and finite differences. Tests compare the library against these.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 300; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0 || b - a < 1e-15) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

inline double tanh_s(double a) { return std::tanh(a); }
inline double logistic_s(double a) { return 1.0 / (1.0 + std::exp(-a)) - 0.5; }
inline double gompertz_s(double a) { return std::exp(-std::exp(-a)) - std::exp(-1.0); }

/// Inverse of an increasing function by bisection on [-60, 60].
inline double inverse(const std::function<double(double)>& s, double y) {
    return bisect([&](double a) { return s(a) - y; }, -60.0, 60.0);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Fixed point x = S((beta - 1) x + u); unique when beta < beta_c, bracketed by the range.
inline double fixed_point(const std::function<double(double)>& s, double beta, double u, double lo, double hi) {
    return bisect([&](double x) { return x - s((beta - 1.0) * x + u); }, lo, hi);
}

/// x^2 - S^{-1}(x)/x + beta with the inverse by bisection.
inline double beta_hat_star(const std::function<double(double)>& s, double beta, double x) {
    return x * x - inverse(s, x) / x + beta;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
