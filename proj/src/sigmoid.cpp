#include "qualidetect/sigmoid.hpp"

#include "qualidetect/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qualidetect {

namespace {

constexpr double kInvE = 0.36787944117144233;  // exp(-1)

void require_finite(double a, const char* what) {
    if (!std::isfinite(a)) {
        throw DomainError(std::string(what) + ": non-finite argument");
    }
}

void require_positive(double c, const char* name) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ConfigError(std::string("sigmoid coefficient ") + name + " must be finite and > 0");
    }
}

// Safeguarded Newton on a monotone increasing function; bracket [lo, hi] with
// f(lo) < y < f(hi).
double monotone_inverse(const Sigmoid& s, double y) {
    double lo = -1.0;
    double hi = 1.0;
    while (eval(s, lo) >= y) {
        lo *= 2.0;
        if (!std::isfinite(lo)) throw RangeError("sigmoid inverse: bracket search failed");
    }
    while (eval(s, hi) <= y) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw RangeError("sigmoid inverse: bracket search failed");
    }

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = eval(s, x) - y;
        if (std::abs(f) <= 1e-14) return x;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double d = derivative(s, x, 1);
        double next = (d > 0.0) ? x - f / d : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

}  // namespace

std::string to_string(SigmoidKind kind) {
    switch (kind) {
        case SigmoidKind::Tanh: return "tanh";
        case SigmoidKind::Logistic: return "logistic";
        case SigmoidKind::Gompertz: return "gompertz";
        case SigmoidKind::Sum: return "sum";
    }
    return "unknown";
}

Sigmoid::Sigmoid(SigmoidKind kind, double c1, double c2, std::vector<Sigmoid> components)
    : kind_(kind), c1_(c1), c2_(c2), components_(std::move(components)) {}

Sigmoid Sigmoid::tanh(double c1, double c2) {
    require_positive(c1, "c1");
    require_positive(c2, "c2");
    return Sigmoid(SigmoidKind::Tanh, c1, c2, {});
}

Sigmoid Sigmoid::logistic(double c1, double c2) {
    require_positive(c1, "c1");
    require_positive(c2, "c2");
    return Sigmoid(SigmoidKind::Logistic, c1, c2, {});
}

Sigmoid Sigmoid::gompertz(double c1) {
    require_positive(c1, "c1");
    return Sigmoid(SigmoidKind::Gompertz, c1, kInvE, {});
}

Sigmoid Sigmoid::sum(std::vector<Sigmoid> components) {
    if (components.empty()) throw ConfigError("sum sigmoid needs at least one component");
    return Sigmoid(SigmoidKind::Sum, 0.0, 0.0, std::move(components));
}

std::pair<double, double> Sigmoid::range() const {
    switch (kind_) {
        case SigmoidKind::Tanh: return {-c1_, c1_};
        case SigmoidKind::Logistic: return {-0.5 * c1_, 0.5 * c1_};
        case SigmoidKind::Gompertz: return {-kInvE, 1.0 - kInvE};
        case SigmoidKind::Sum: {
            double lo = 0.0;
            double hi = 0.0;
            for (const auto& c : components_) {
                const auto [l, h] = c.range();
                lo += l;
                hi += h;
            }
            return {lo, hi};
        }
    }
    return {0.0, 0.0};
}

std::string Sigmoid::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_);
    if (kind_ == SigmoidKind::Sum) {
        os << '(';
        for (std::size_t i = 0; i < components_.size(); ++i) {
            if (i) os << " + ";
            os << components_[i].describe();
        }
        os << ')';
    } else if (kind_ == SigmoidKind::Gompertz) {
        os << "(c1=" << c1_ << ')';
    } else {
        os << "(c1=" << c1_ << ",c2=" << c2_ << ')';
    }
    return os.str();
}

double eval(const Sigmoid& s, double a) {
    require_finite(a, "sigmoid eval");
    switch (s.kind()) {
        case SigmoidKind::Tanh: return s.c1() * std::tanh(s.c2() * a);
        // c1/(1+e^{-c2 a}) - c1/2 == (c1/2) tanh(c2 a / 2), exact zero at the origin
        case SigmoidKind::Logistic: return 0.5 * s.c1() * std::tanh(0.5 * s.c2() * a);
        case SigmoidKind::Gompertz:
            return kInvE * std::expm1(-std::expm1(-s.c1() * a));
        case SigmoidKind::Sum: {
            double total = 0.0;
            for (const auto& c : s.components()) total += eval(c, a);
            return total;
        }
    }
    return 0.0;
}

double derivative(const Sigmoid& s, double a, int order) {
    require_finite(a, "sigmoid derivative");
    if (order != 1 && order != 2) throw DomainError("sigmoid derivative: order must be 1 or 2");

    switch (s.kind()) {
        case SigmoidKind::Tanh: {
            const double t = std::tanh(s.c2() * a);
            const double sech2 = 1.0 - t * t;
            if (order == 1) return s.c1() * s.c2() * sech2;
            return -2.0 * s.c1() * s.c2() * s.c2() * t * sech2;
        }
        case SigmoidKind::Logistic: {
            const double t = std::tanh(0.5 * s.c2() * a);
            const double sech2 = 1.0 - t * t;
            if (order == 1) return 0.25 * s.c1() * s.c2() * sech2;
            return -0.25 * s.c1() * s.c2() * s.c2() * t * sech2;
        }
        case SigmoidKind::Gompertz: {
            const double c1 = s.c1();
            const double z = std::exp(-c1 * a);
            if (!std::isfinite(z)) return 0.0;
            const double g = std::exp(-c1 * a - z);  // z * exp(-z)
            if (order == 1) return c1 * g;
            return c1 * c1 * (z - 1.0) * g;
        }
        case SigmoidKind::Sum: {
            double total = 0.0;
            for (const auto& c : s.components()) total += derivative(c, a, order);
            return total;
        }
    }
    return 0.0;
}

double inverse(const Sigmoid& s, double y) {
    require_finite(y, "sigmoid inverse");
    const auto [lo, hi] = s.range();
    if (!(y > lo && y < hi)) {
        std::ostringstream os;
        os.precision(17);
        os << "sigmoid inverse: y=" << y << " outside open range (" << lo << ", " << hi << ")";
        throw RangeError(os.str());
    }
    if (y == 0.0) return 0.0;

    switch (s.kind()) {
        case SigmoidKind::Tanh: return std::atanh(y / s.c1()) / s.c2();
        case SigmoidKind::Logistic: return 2.0 * std::atanh(2.0 * y / s.c1()) / s.c2();
        case SigmoidKind::Gompertz: {
            // y + e^{-1} = exp(-z), z = exp(-c1 a)  =>  a = -log(z) / c1
            constexpr double e = std::numbers::e;
            return -std::log1p(-std::log1p(e * y)) / s.c1();
        }
        case SigmoidKind::Sum: return monotone_inverse(s, y);
    }
    return 0.0;
}

double inverse_derivative(const Sigmoid& s, double y) {
    return 1.0 / derivative(s, inverse(s, y), 1);
}

double beta_c(const Sigmoid& s) { return 1.0 / derivative(s, 0.0, 1); }

ValidationReport validate(const Sigmoid& s, const ValidationGrid& grid) {
    if (grid.points < 2 || !(grid.half_width > 0.0)) {
        throw ConfigError("validation grid needs >= 2 points and a positive half-width");
    }

    ValidationReport report;
    report.zero_at_origin = std::abs(eval(s, 0.0)) <= 1e-12;
    report.monotone = true;
    report.slope_max_at_origin = true;
    report.curvature_sign = true;

    const double slope0 = derivative(s, 0.0, 1);
    const double step = 2.0 * grid.half_width / static_cast<double>(grid.points - 1);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double a = -grid.half_width + step * static_cast<double>(i);
        const double d1 = derivative(s, a, 1);
        const double d2 = derivative(s, a, 2);

        if (d1 == 0.0) {
            ++report.unresolved;
            continue;
        }
        if (!(d1 > 0.0)) report.monotone = false;
        if (d1 > slope0 + 1e-9) report.slope_max_at_origin = false;

        if (std::abs(a) < 1e-6) continue;
        if (d2 == 0.0) {
            ++report.unresolved;
            continue;
        }
        const int expected = a > 0.0 ? -1 : 1;
        const int actual = d2 > 0.0 ? 1 : -1;
        if (expected != actual) report.curvature_sign = false;
    }
    return report;
}

}  // namespace qualidetect
