#pragma once

#include "qualidetect/manifold.hpp"
#include "qualidetect/models.hpp"
#include "qualidetect/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qualidetect {

// -----------------------------------------------------------------------------
// Persistency of excitation
// -----------------------------------------------------------------------------

struct PEReport {
    double T = 0.0;
    double mu = 0.0;
    double mu_min = 0.0;
    bool is_pe = false;
    /// Filled only when requested: window start times and window energies.
    std::vector<double> window_start;
    std::vector<double> window_energy;
};

/// Minimum over sliding windows of the trapezoidal integral of y^2 over [t, t+T].
/// `y` is sampled uniformly with spacing dt; its duration must be at least 2T.
PEReport measure_pe(const std::vector<double>& y, double dt, double T, double mu, bool keep_windows = false);

// -----------------------------------------------------------------------------
// Activity classification
// -----------------------------------------------------------------------------

enum class Activity { Resting, Oscillating, Undetermined };

const char* to_string(Activity a);

struct ActivityOptions {
    double settle_fraction = 0.3;
    std::string channel;           ///< empty: x_f, else V
    std::string detector_channel;  ///< empty: beta_hat, else g_na_hat
    double rest_threshold = 1e-3;
    double oscillation_threshold = 1e-1;
    double period_tolerance = 0.1;
    std::size_t min_cycles = 3;
    double dead_band = 0.02;
};

struct ActivityReport {
    Activity label = Activity::Undetermined;
    double amplitude = 0.0;
    std::optional<double> period;
    std::size_t cycles = 0;
    double beta_hat_summary = 0.0;  ///< NaN when the trajectory has no detector channel
    int beta_hat_sign = 0;
    double window_start = 0.0;
    /// Upward mean crossings of the activity channel inside the analysis window.
    std::vector<double> crossings;
};

ActivityReport classify_activity(const Trajectory& traj, const ActivityOptions& opts = {});

/// Sign with a symmetric dead band.
int dead_band_sign(double v, double band);

// -----------------------------------------------------------------------------
// Jumps
// -----------------------------------------------------------------------------

enum class JumpThreshold {
    GeometricMean,  ///< sqrt(median * peak) of |dx/dt|
    MedianMultiple  ///< multiple * median of |dx/dt|
};

struct JumpOptions {
    JumpThreshold rule = JumpThreshold::GeometricMean;
    double multiple = 10.0;
    std::size_t merge_gap = 5;
    ActivityOptions activity;
};

struct Interval {
    double start = 0.0;
    double end = 0.0;
};

/// Fast segments of the activity channel in the analysis window; empty unless the
/// trajectory classifies as Oscillating.
std::vector<Interval> detect_jumps(const Trajectory& traj, const JumpOptions& opts = {});

/// Total jump time divided by elapsed time, over the whole periods in the analysis window.
double jump_time_fraction(const Trajectory& traj, const JumpOptions& opts = {});

// -----------------------------------------------------------------------------
// Filters
// -----------------------------------------------------------------------------

enum class FilterKind { LowPass1, HighPass1, SlidingMean };

struct FilterSpec {
    FilterKind kind = FilterKind::LowPass1;
    double tau = 1.0;  ///< time constant, or window length for SlidingMean
};

std::vector<double> apply_filter(const std::vector<double>& y, double dt, const FilterSpec& f);

// -----------------------------------------------------------------------------
// Misc trajectory measurements
// -----------------------------------------------------------------------------

/// (x_f, x_s) samples of the last full period (between the last two upward crossings).
std::vector<Point> last_period(const Trajectory& traj, const ActivityOptions& opts = {});

/// First time after which `y` stays within `tol` of its final value.
double settle_time(const std::vector<double>& t, const std::vector<double>& y, double tol);

// -----------------------------------------------------------------------------
// Incremental stability of the detector
// -----------------------------------------------------------------------------

struct StabilityOptions {
    double pe_window = 100.0;
    double pe_mu = 1e-4;
    std::size_t grid_points = 40;
};

struct StabilityReport {
    PEReport pe;
    std::string flag;  ///< empty when x_f is PE
    double initial_difference = 0.0;
    double final_difference = 0.0;
    std::vector<double> grid_t;
    std::vector<double> ratio;  ///< |d(t)| / |d(0)| on grid_t (0 when d(0) = 0)
    double sup_ratio_after_pe = 0.0;
    double decay_rate = 0.0;  ///< fitted from log ratio; 0 when d(0) = 0
    bool contracts = false;
};

/// Runs two detector copies from beta_hat_1 and beta_hat_2, both driven by the
/// x_f and x_s channels of `plant` (uniformly sampled) with input u = p.u.
StabilityReport check_incremental_stability(const PlanarParams& p, const DetectorParams& dp, double beta_hat_1,
                                            double beta_hat_2, const Trajectory& plant,
                                            const StabilityOptions& opts = {});

}  // namespace qualidetect
