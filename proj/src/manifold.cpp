#include "qualidetect/manifold.hpp"

#include "qualidetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace qualidetect {

namespace {

constexpr std::size_t kGrid = 4096;
constexpr double kSmallXf = 1e-4;

// Bisection on [a, b] where f changes sign; stops at width 1e-12.
double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    if (fa == 0.0) return a;
    for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Points strictly inside the open range, evenly spaced.
std::vector<double> interior_grid(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    const double w = hi - lo;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = lo + w * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return xs;
}

// Shrinks an open interval slightly so S^{-1} stays finite at its ends.
std::pair<double, double> safe_range(const Sigmoid& s) {
    const auto [lo, hi] = s.range();
    const double pad = 1e-12 * (hi - lo);
    return {lo + pad, hi - pad};
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

double directed_vertex_to_polyline(const std::vector<Point>& a, const std::vector<Point>& b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = std::numeric_limits<double>::infinity();
        if (b.size() == 1) {
            best = std::hypot(p[0] - b[0][0], p[1] - b[0][1]);
        } else {
            for (std::size_t j = 0; j + 1 < b.size(); ++j) {
                best = std::min(best, point_segment_distance(p, b[j], b[j + 1]));
            }
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

const char* to_string(Branch b) {
    switch (b) {
        case Branch::Lower: return "lower";
        case Branch::Middle: return "middle";
        case Branch::Upper: return "upper";
        case Branch::Single: return "single";
    }
    return "unknown";
}

double critical_manifold(const PlanarParams& p, double x_f) {
    return -inverse(p.sigmoid, x_f) + p.beta * x_f + p.u;
}

double fold_residual(const PlanarParams& p, double x_f) {
    return -1.0 + p.beta * derivative(p.sigmoid, inverse(p.sigmoid, x_f), 1);
}

ManifoldSample sample_critical_manifold(const PlanarParams& p, double x_lo, double x_hi, std::size_t n) {
    if (n < 2) throw ConfigError("manifold sample needs n >= 2");
    if (!(x_hi > x_lo)) throw ConfigError("manifold sample: empty x_f range");
    const auto [lo, hi] = p.sigmoid.range();
    if (!(x_lo > lo && x_hi < hi)) throw RangeError("manifold sample: x_f range outside the range of S");

    const FoldPair folds = fold_points(p);
    ManifoldSample out;
    out.x_f.reserve(n);
    out.x_s.reserve(n);
    out.branch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        out.x_f.push_back(x);
        out.x_s.push_back(critical_manifold(p, x));
        Branch b = Branch::Single;
        if (folds.exists) {
            b = x < folds.x_fold_minus ? Branch::Lower
                : x > folds.x_fold_plus ? Branch::Upper
                                        : Branch::Middle;
        }
        out.branch.push_back(b);
    }
    return out;
}

double cubic_normal_form(double beta, double beta_c, double u, double x_f) {
    return -x_f * x_f * x_f + (beta - beta_c) * x_f + u;
}

FoldPair fold_points(const PlanarParams& p) {
    FoldPair f;
    if (!(p.beta > beta_c(p.sigmoid))) return f;

    const auto [lo, hi] = safe_range(p.sigmoid);
    const auto g = [&](double x) { return fold_residual(p, x); };

    // S' peaks at 0, so g is positive at 0 and crosses zero once on each side.
    const auto scan = [&](double from, double to) {
        double prev_x = from;
        double prev_g = g(from);
        for (std::size_t i = 1; i <= kGrid; ++i) {
            const double x = from + (to - from) * static_cast<double>(i) / static_cast<double>(kGrid);
            const double gx = g(x);
            if ((gx > 0.0) != (prev_g > 0.0)) return bisect(g, std::min(prev_x, x), std::max(prev_x, x));
            prev_x = x;
            prev_g = gx;
        }
        throw AnalysisError("fold_points: no sign change found");
    };

    f.x_fold_plus = scan(0.0, hi);
    f.x_fold_minus = scan(0.0, lo);
    f.x_s_fold_plus = critical_manifold(p, f.x_fold_plus);
    f.x_s_fold_minus = critical_manifold(p, f.x_fold_minus);
    f.exists = true;
    return f;
}

double beta_hat_star(const PlanarParams& p, double x_f) {
    const auto [lo, hi] = p.sigmoid.range();
    if (!(x_f > lo && x_f < hi)) {
        std::ostringstream os;
        os << "beta_hat_star: x_f=" << x_f << " outside the range of S";
        throw RangeError(os.str());
    }
    if (std::abs(x_f) < kSmallXf) return p.beta - beta_c(p.sigmoid);
    return x_f * x_f - inverse(p.sigmoid, x_f) / x_f + p.beta;
}

CondSufReport check_cond_suf(const Sigmoid& s, double beta) {
    PlanarParams p;
    p.sigmoid = s;
    p.beta = beta;
    p.u = 0.0;
    const FoldPair f = fold_points(p);
    if (!f.exists) throw DomainError("check_cond_suf: folds require beta > beta_c");

    const auto value = [&](double x) {
        return 2.0 * x * x + inverse(s, x) / x - inverse_derivative(s, x);
    };
    CondSufReport r;
    r.x_fold_plus = f.x_fold_plus;
    r.x_fold_minus = f.x_fold_minus;
    r.value_plus = value(f.x_fold_plus);
    r.value_minus = value(f.x_fold_minus);
    r.holds_plus = r.value_plus > 1e-12;
    r.holds_minus = r.value_minus > 1e-12;
    return r;
}

EstimateSample estimate_critical_manifold(const PlanarParams& p, double x_lo, double x_hi, std::size_t n) {
    const ManifoldSample m = sample_critical_manifold(p, x_lo, x_hi, n);
    EstimateSample out;
    out.x_f = m.x_f;
    out.x_s = m.x_s;
    out.beta_hat.reserve(n);
    for (double x : m.x_f) out.beta_hat.push_back(beta_hat_star(p, x));
    return out;
}

std::pair<double, double> layer_eigenvalues(const PlanarParams& p, const DetectorParams& dp, double x_f) {
    return {-dp.k * x_f * x_f, fold_residual(p, x_f)};
}

std::vector<double> planar_fixed_points(const PlanarParams& p) {
    const auto [lo, hi] = p.sigmoid.range();
    const auto h = [&](double x) { return eval(p.sigmoid, (p.beta - 1.0) * x + p.u) - x; };
    const auto xs = interior_grid(lo, hi, kGrid);

    std::vector<double> roots;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double hi_val = h(xs[i]);
        if (hi_val == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if (i + 1 < xs.size()) {
            const double next = h(xs[i + 1]);
            if (next != 0.0 && (next > 0.0) != (hi_val > 0.0)) roots.push_back(bisect(h, xs[i], xs[i + 1]));
        }
    }
    return roots;
}

SingularOrbit singular_orbit(const PlanarParams& p, std::size_t points_per_piece) {
    const double bc = beta_c(p.sigmoid);
    if (!(p.beta > bc && p.beta < bc + 1.0)) {
        std::ostringstream os;
        os << "singular_orbit: beta=" << p.beta << " outside the oscillatory window (" << bc << ", " << bc + 1.0
           << ")";
        throw DomainError(os.str());
    }
    if (points_per_piece < 2) throw ConfigError("singular_orbit: need >= 2 points per piece");

    SingularOrbit orbit;
    orbit.folds = fold_points(p);
    const FoldPair& f = orbit.folds;
    const auto [lo, hi] = safe_range(p.sigmoid);

    // phi is decreasing on the outer branches and tends to -/+ infinity at the range ends.
    orbit.landing_upper =
        bisect([&](double x) { return critical_manifold(p, x) - f.x_s_fold_minus; }, f.x_fold_plus, hi);
    orbit.landing_lower =
        bisect([&](double x) { return critical_manifold(p, x) - f.x_s_fold_plus; }, lo, f.x_fold_minus);

    const std::size_t n = points_per_piece;
    auto& pts = orbit.points;
    pts.reserve(4 * n + 1);
    const auto lerp = [n](double a, double b, std::size_t i) {
        return a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    };

    // upper arc: landing -> F+
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lerp(orbit.landing_upper, f.x_fold_plus, i);
        pts.push_back({x, critical_manifold(p, x)});
    }
    // jump F+ -> lower landing
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({lerp(f.x_fold_plus, orbit.landing_lower, i), f.x_s_fold_plus});
    }
    // lower arc: landing -> F-
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lerp(orbit.landing_lower, f.x_fold_minus, i);
        pts.push_back({x, i == 0 ? f.x_s_fold_plus : critical_manifold(p, x)});
    }
    // jump F- -> upper landing
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({lerp(f.x_fold_minus, orbit.landing_upper, i), f.x_s_fold_minus});
    }
    pts.push_back(pts.front());
    pts.front()[1] = f.x_s_fold_minus;
    pts.back()[1] = f.x_s_fold_minus;
    return orbit;
}

double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) throw AnalysisError("hausdorff_distance: empty point set");
    const auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                const double dx = p[0] - q[0];
                const double dy = p[1] - q[1];
                best = std::min(best, dx * dx + dy * dy);
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

double polyline_hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.empty() || b.empty()) throw AnalysisError("polyline_hausdorff_distance: empty polyline");
    return std::max(directed_vertex_to_polyline(a, b), directed_vertex_to_polyline(b, a));
}

std::vector<Point> resample_polyline(const std::vector<Point>& pts, std::size_t n) {
    if (pts.size() < 2 || n < 2) throw AnalysisError("resample_polyline: need >= 2 points in and out");
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        s[i] = s[i - 1] + std::hypot(pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]);
    }
    const double total = s.back();
    if (!(total > 0.0)) throw AnalysisError("resample_polyline: zero-length polyline");

    std::vector<Point> out;
    out.reserve(n);
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(n - 1);
        while (j + 1 < s.size() && s[j] < target) ++j;
        const double seg = s[j] - s[j - 1];
        const double w = seg > 0.0 ? std::clamp((target - s[j - 1]) / seg, 0.0, 1.0) : 0.0;
        out.push_back({pts[j - 1][0] + w * (pts[j][0] - pts[j - 1][0]), pts[j - 1][1] + w * (pts[j][1] - pts[j - 1][1])});
    }
    return out;
}

}  // namespace qualidetect
