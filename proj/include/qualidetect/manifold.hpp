#pragma once

#include "qualidetect/models.hpp"

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace qualidetect {

using Point = std::array<double, 2>;

// -----------------------------------------------------------------------------
// Critical manifold
// -----------------------------------------------------------------------------

enum class Branch { Lower, Middle, Upper, Single };

const char* to_string(Branch b);

/// x_s = phi(x_f) = -S^{-1}(x_f) + beta x_f + u
double critical_manifold(const PlanarParams& p, double x_f);

struct ManifoldSample {
    std::vector<double> x_f;
    std::vector<double> x_s;
    std::vector<Branch> branch;
};

/// n points evenly spaced on [x_lo, x_hi], which must lie inside the open range of S.
ManifoldSample sample_critical_manifold(const PlanarParams& p, double x_lo, double x_hi, std::size_t n);

/// x_s = -x_f^3 + (beta - beta_c) x_f + u
double cubic_normal_form(double beta, double beta_c, double u, double x_f);

struct FoldPair {
    bool exists = false;
    double x_fold_plus = 0.0;
    double x_fold_minus = 0.0;
    double x_s_fold_plus = 0.0;
    double x_s_fold_minus = 0.0;
};

/// Roots of -1 + beta S'(S^{-1}(x)) = 0; exists iff beta > beta_c.
FoldPair fold_points(const PlanarParams& p);

/// -1 + beta S'(S^{-1}(x)); positive strictly between the folds.
double fold_residual(const PlanarParams& p, double x_f);

// -----------------------------------------------------------------------------
// Detector steady state
// -----------------------------------------------------------------------------

/// (x_f^3 - S^{-1}(x_f) + beta x_f) / x_f, extended by beta - beta_c for |x_f| < 1e-4.
double beta_hat_star(const PlanarParams& p, double x_f);

struct CondSufReport {
    double x_fold_plus = 0.0;
    double x_fold_minus = 0.0;
    double value_plus = 0.0;
    double value_minus = 0.0;
    bool holds_plus = false;
    bool holds_minus = false;
};

/// Evaluates 2x^2 + S^{-1}(x)/x - (S^{-1})'(x) at both folds. Throws DomainError
/// when beta <= beta_c.
CondSufReport check_cond_suf(const Sigmoid& s, double beta);

struct EstimateSample {
    std::vector<double> x_f;
    std::vector<double> x_s;
    std::vector<double> beta_hat;
};

/// Critical manifold lifted by beta_hat_star.
EstimateSample estimate_critical_manifold(const PlanarParams& p, double x_lo, double x_hi, std::size_t n);

/// Nonzero eigenvalues of the layer Jacobian of the cascade on the estimate manifold:
/// (-k x_f^2, -1 + beta S'(S^{-1}(x_f))).
std::pair<double, double> layer_eigenvalues(const PlanarParams& p, const DetectorParams& dp, double x_f);

/// All solutions of x = S((beta - 1) x + u), ascending.
std::vector<double> planar_fixed_points(const PlanarParams& p);

// -----------------------------------------------------------------------------
// Singular orbit and distances
// -----------------------------------------------------------------------------

struct SingularOrbit {
    std::vector<Point> points;  ///< closed: front() == back()
    FoldPair folds;
    double landing_upper = 0.0;  ///< x_f where the jump from F- lands
    double landing_lower = 0.0;  ///< x_f where the jump from F+ lands
};

/// Requires beta_c < beta < beta_c + 1. Each arc and each jump gets `points_per_piece` points.
SingularOrbit singular_orbit(const PlanarParams& p, std::size_t points_per_piece = 1000);

/// Brute-force Hausdorff distance between finite point sets.
double hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);

/// Hausdorff distance between the polylines through `a` and `b` (point-to-segment).
double polyline_hausdorff_distance(const std::vector<Point>& a, const std::vector<Point>& b);

/// n points spaced evenly in arc length along the polyline.
std::vector<Point> resample_polyline(const std::vector<Point>& pts, std::size_t n);

}  // namespace qualidetect
