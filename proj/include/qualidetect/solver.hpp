#pragma once

#include "qualidetect/models.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qualidetect {

// =============================================================================
// Systems
// =============================================================================

/// A first-order ODE system the integrators can advance.
///
/// `observe` maps a state to the recorded channels (by default the state itself);
/// `project` is applied after every accepted step (e.g. clamping gating variables).
class OdeSystem {
public:
    virtual ~OdeSystem() = default;

    virtual std::size_t dimension() const = 0;
    virtual void rhs(double t, std::span<const double> x, std::span<double> dxdt) const = 0;
    virtual std::vector<std::string> channel_names() const = 0;

    virtual void observe(double t, std::span<const double> x, std::span<double> out) const;
    virtual void project(std::span<double> x) const { (void)x; }

    /// Largest step the fixed-step RK4 integrator accepts for this system.
    virtual double max_fixed_step() const { return std::numeric_limits<double>::infinity(); }
};

/// Wraps a callable; mostly for tests and ad hoc systems.
class FunctionSystem final : public OdeSystem {
public:
    using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

    FunctionSystem(std::vector<std::string> names, Rhs rhs);

    std::size_t dimension() const override { return names_.size(); }
    void rhs(double t, std::span<const double> x, std::span<double> dxdt) const override;
    std::vector<std::string> channel_names() const override { return names_; }

private:
    std::vector<std::string> names_;
    Rhs rhs_;
};

/// Planar slow-fast plant. Channels: x_f, x_s (and beta when a schedule is set).
class PlanarSystem final : public OdeSystem {
public:
    explicit PlanarSystem(PlanarParams p, NoiseSpec noise = {});
    PlanarSystem(PlanarParams p, BetaSchedule schedule, NoiseSpec noise = {});

    std::size_t dimension() const override { return 2; }
    void rhs(double t, std::span<const double> x, std::span<double> dxdt) const override;
    std::vector<std::string> channel_names() const override;
    void observe(double t, std::span<const double> x, std::span<double> out) const override;
    double max_fixed_step() const override { return 0.2; }

    const PlanarParams& params() const noexcept { return p_; }

private:
    double beta_at(double t) const;

    PlanarParams p_;
    BetaSchedule schedule_;
    NoiseSpec noise_;
};

/// Plant plus detector. Channels: x_f, x_s, beta_hat, beta.
class CascadeSystem final : public OdeSystem {
public:
    CascadeSystem(PlanarParams p, DetectorParams dp, NoiseSpec noise = {});
    CascadeSystem(PlanarParams p, DetectorParams dp, BetaSchedule schedule, NoiseSpec noise = {});

    std::size_t dimension() const override { return 3; }
    void rhs(double t, std::span<const double> x, std::span<double> dxdt) const override;
    std::vector<std::string> channel_names() const override;
    void observe(double t, std::span<const double> x, std::span<double> out) const override;
    double max_fixed_step() const override { return 0.2; }

private:
    double beta_at(double t) const;

    PlanarParams p_;
    DetectorParams dp_;
    BetaSchedule schedule_;
    NoiseSpec noise_;
};

/// Hodgkin-Huxley neuron with the centered detector.
/// Channels: V, m, n, h, g_na_hat, hp_V, hp_w.
class HHSystem final : public OdeSystem {
public:
    explicit HHSystem(HHParams p);

    std::size_t dimension() const override { return HHState::size; }
    void rhs(double t, std::span<const double> x, std::span<double> dxdt) const override;
    std::vector<std::string> channel_names() const override;
    void project(std::span<double> x) const override;
    double max_fixed_step() const override { return 0.01; }

    const HHParams& params() const noexcept { return p_; }

private:
    HHParams p_;
};

/// Detector pair driven by recorded measurement channels on a uniform grid
/// (linear interpolation between samples). State: (beta_hat_1, beta_hat_2).
class DrivenDetectorSystem final : public OdeSystem {
public:
    DrivenDetectorSystem(DetectorParams dp, std::vector<double> times, std::vector<double> x_f,
                         std::vector<double> x_s, double u);

    std::size_t dimension() const override { return 2; }
    void rhs(double t, std::span<const double> x, std::span<double> dxdt) const override;
    std::vector<std::string> channel_names() const override { return {"beta_hat_1", "beta_hat_2"}; }

    double t_end() const { return times_.back(); }

private:
    std::pair<double, double> inputs_at(double t) const;

    DetectorParams dp_;
    std::vector<double> times_;
    std::vector<double> x_f_;
    std::vector<double> x_s_;
    double u_;
    double t0_;
    double h_;
};

// =============================================================================
// Trajectory
// =============================================================================

enum class Termination { Completed, Diverged };

std::string to_string(Termination t);

/// Recorded time series. Times strictly increase; all channels have equal length.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<std::string> channel_names);

    void append(double t, std::span<const double> values);
    /// Adds a derived channel; its length must match the recorded times.
    void add_channel(const std::string& name, std::vector<double> values);

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<std::string>& channel_names() const noexcept { return names_; }
    bool has_channel(std::string_view name) const;
    const std::vector<double>& channel(std::string_view name) const;
    const std::vector<double>& channel(std::size_t index) const { return data_.at(index); }

    /// Common sample spacing; throws AnalysisError when sampling is not uniform.
    double sample_interval(double rel_tol = 1e-6) const;

    Termination termination = Termination::Completed;
    std::map<std::string, std::string> metadata;

private:
    std::vector<std::string> names_;
    std::vector<double> times_;
    std::vector<std::vector<double>> data_;
};

// =============================================================================
// Integration
// =============================================================================

enum class Method { RK4Fixed, DormandPrince45 };

std::string to_string(Method m);
Method parse_method(std::string_view text);

struct IntegratorConfig {
    Method method = Method::RK4Fixed;
    /// RK4 step; for DormandPrince45 the base of the output grid (samples every dt * record_stride).
    double dt = 0.01;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_start = 0.0;
    double t_end = 1000.0;
    std::size_t record_stride = 10;
    double blowup_threshold = 1e6;
};

void validate(const IntegratorConfig& cfg);

/// Integrates `system` from `initial`. A state or channel exceeding the blow-up
/// threshold ends the run with Termination::Diverged; NaN throws IntegrationError.
Trajectory integrate(const OdeSystem& system, std::vector<double> initial, const IntegratorConfig& cfg);

/// Cascade with a time-varying gain; the schedule must cover [t_start, t_end].
Trajectory integrate_piecewise_beta(const BetaSchedule& schedule, const PlanarParams& p,
                                    const DetectorParams& dp, const CascadeState& initial,
                                    const IntegratorConfig& cfg, const NoiseSpec& noise = {});

}  // namespace qualidetect
