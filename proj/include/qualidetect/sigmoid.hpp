#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace qualidetect {

enum class SigmoidKind { Tanh, Logistic, Gompertz, Sum };

std::string to_string(SigmoidKind kind);

/// An admissible sigmoid nonlinearity, centered so that S(0) = 0.
///
///   Tanh      c1 * tanh(c2 a)
///   Logistic  c1 / (1 + exp(-c2 a)) - c1 / 2
///   Gompertz  exp(-exp(-c1 a)) - exp(-1)      (c2 pinned to exp(-1))
///   Sum       sum of components
///
/// Immutable once constructed; the factories reject non-positive coefficients.
class Sigmoid {
public:
    static Sigmoid tanh(double c1 = 1.0, double c2 = 1.0);
    static Sigmoid logistic(double c1 = 1.0, double c2 = 1.0);
    static Sigmoid gompertz(double c1 = 1.0);
    static Sigmoid sum(std::vector<Sigmoid> components);

    SigmoidKind kind() const noexcept { return kind_; }
    double c1() const noexcept { return c1_; }
    double c2() const noexcept { return c2_; }
    const std::vector<Sigmoid>& components() const noexcept { return components_; }

    /// Open range S(R) = (lo, hi).
    std::pair<double, double> range() const;

    std::string describe() const;

private:
    Sigmoid(SigmoidKind kind, double c1, double c2, std::vector<Sigmoid> components);

    SigmoidKind kind_;
    double c1_;
    double c2_;
    std::vector<Sigmoid> components_;
};

double eval(const Sigmoid& s, double a);

/// Analytic first (order = 1) or second (order = 2) derivative.
double derivative(const Sigmoid& s, double a, int order);

/// S^{-1}(y) for y strictly inside the open range; throws RangeError otherwise.
double inverse(const Sigmoid& s, double y);

/// (S^{-1})'(y) = 1 / S'(S^{-1}(y)).
double inverse_derivative(const Sigmoid& s, double y);

/// Critical gain 1 / S'(0).
double beta_c(const Sigmoid& s);

struct ValidationGrid {
    double half_width = 10.0;
    std::size_t points = 4096;
};

struct ValidationReport {
    bool zero_at_origin = false;
    bool monotone = false;
    bool slope_max_at_origin = false;
    bool curvature_sign = false;
    /// Grid points where S' or S'' underflows to zero in double precision.
    std::size_t unresolved = 0;

    bool ok() const noexcept {
        return zero_at_origin && monotone && slope_max_at_origin && curvature_sign;
    }
};

/// Sample-based check of the sigmoid admissibility properties.
/// Failures are reported, never thrown.
ValidationReport validate(const Sigmoid& s, const ValidationGrid& grid = {});

}  // namespace qualidetect
