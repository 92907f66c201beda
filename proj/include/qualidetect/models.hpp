#pragma once

#include "qualidetect/sigmoid.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qualidetect {

// -----------------------------------------------------------------------------
// Planar slow-fast system and its detector
// -----------------------------------------------------------------------------

/// Parameters of  x_f' = -x_f + S(beta x_f + u - x_s),  x_s' = eps (x_f - x_s).
struct PlanarParams {
    double beta = 0.5;
    double eps = 0.001;
    double u = -0.01;
    Sigmoid sigmoid = Sigmoid::tanh();
};

/// Throws ConfigError on invalid parameters; returns warnings (e.g. eps > 0.1).
std::vector<std::string> validate(const PlanarParams& p);

struct DetectorParams {
    double k = 5.0;
};

void validate(const DetectorParams& dp);

struct CascadeState {
    double x_f = 0.3;
    double x_s = 0.2;
    double beta_hat = 0.0;
};

/// Additive disturbances: d_out(t) = amp sin(freq t) corrupts the detector's
/// measurements of x_f and x_s; d_in is a constant bias on the plant input.
struct NoiseSpec {
    double d_out_amp = 0.0;
    double d_out_freq = 0.0;
    double d_in = 0.0;

    double d_out(double t) const;
    bool active() const noexcept { return d_out_amp != 0.0 || d_in != 0.0; }
};

std::array<double, 2> planar_rhs(const PlanarParams& p, double x_f, double x_s, double t,
                                 const NoiseSpec* noise = nullptr);

/// beta_hat' = -k x_f (-x_f^3 + beta_hat x_f + u - x_s), evaluated on measured signals.
double detector_rhs(const DetectorParams& dp, double beta_hat, double x_f_meas, double x_s_meas,
                    double u);

std::array<double, 3> cascade_rhs(const PlanarParams& p, const DetectorParams& dp,
                                  const CascadeState& s, double t,
                                  const NoiseSpec* noise = nullptr);

// -----------------------------------------------------------------------------
// Piecewise-linear gain schedule
// -----------------------------------------------------------------------------

struct BetaSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    double beta_start = 0.0;
    double slope = 0.0;  ///< d beta / dt within the segment
};

/// Contiguous schedule; discontinuities between segments are allowed.
/// Segments are half-open [t_start, t_end) except the last, which is closed.
class BetaSchedule {
public:
    BetaSchedule() = default;
    explicit BetaSchedule(std::vector<BetaSegment> segments);

    static BetaSchedule constant(double beta, double t_end);

    /// Parses "t0:t1:beta0:slope;t0:t1:beta0:slope;...".
    static BetaSchedule parse(const std::string& text);
    std::string format() const;

    double value(double t) const;
    double t_begin() const;
    double t_end() const;
    bool empty() const noexcept { return segments_.empty(); }
    const std::vector<BetaSegment>& segments() const noexcept { return segments_; }

private:
    std::vector<BetaSegment> segments_;
};

// -----------------------------------------------------------------------------
// Hodgkin-Huxley with high-pass centered detector
// -----------------------------------------------------------------------------

enum class SlowSignal { N, M };

/// Units: mV, ms, mS/cm^2, uA/cm^2, uF/cm^2.
struct HHParams {
    double C = 1.0;
    double g_na = 120.0;
    double g_k = 36.0;
    double g_l = 0.3;
    double v_na = 50.0;
    double v_k = -77.0;
    double v_l = -54.4;
    double i_app = 0.0;
    double k = 4.0;
    SlowSignal slow_signal = SlowSignal::N;
    double tau_hp = 50.0;
};

void validate(const HHParams& p);

struct HHState {
    double V = -65.0;
    double m = 0.0;
    double n = 0.0;
    double h = 0.0;
    double g_na_hat = 0.0;
    double hp_V = -65.0;
    double hp_w = 0.0;

    static constexpr std::size_t size = 7;
    std::array<double, size> to_array() const;
    static HHState from_array(const std::array<double, size>& a);
};

namespace hh {

double alpha_m(double V);
double beta_m(double V);
double alpha_h(double V);
double beta_h(double V);
double alpha_n(double V);
double beta_n(double V);

double m_inf(double V);
double h_inf(double V);
double n_inf(double V);
double tau_m(double V);
double tau_h(double V);
double tau_n(double V);

/// Resting initial state at V0 with gating at steady state, detector at 0 and
/// the high-pass filters primed with the initial signals.
HHState initial_state(const HHParams& p, double V0 = -65.0);

double slow_value(const HHParams& p, const HHState& s);

}  // namespace hh

HHState hh_rhs(const HHParams& p, const HHState& s, double t);

}  // namespace qualidetect
