#include "qualidetect/solver.hpp"

#include "qualidetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qualidetect {

// =============================================================================
// Systems
// =============================================================================

void OdeSystem::observe(double t, std::span<const double> x, std::span<double> out) const {
    (void)t;
    std::copy(x.begin(), x.end(), out.begin());
}

FunctionSystem::FunctionSystem(std::vector<std::string> names, Rhs rhs)
    : names_(std::move(names)), rhs_(std::move(rhs)) {}

void FunctionSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) const {
    rhs_(t, x, dxdt);
}

// -----------------------------------------------------------------------------

PlanarSystem::PlanarSystem(PlanarParams p, NoiseSpec noise) : p_(std::move(p)), noise_(noise) {
    validate(p_);
}

PlanarSystem::PlanarSystem(PlanarParams p, BetaSchedule schedule, NoiseSpec noise)
    : p_(std::move(p)), schedule_(std::move(schedule)), noise_(noise) {
    validate(p_);
}

double PlanarSystem::beta_at(double t) const {
    return schedule_.empty() ? p_.beta : schedule_.value(t);
}

void PlanarSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) const {
    PlanarParams p = p_;
    p.beta = beta_at(t);
    const auto d = planar_rhs(p, x[0], x[1], t, &noise_);
    dxdt[0] = d[0];
    dxdt[1] = d[1];
}

std::vector<std::string> PlanarSystem::channel_names() const {
    if (schedule_.empty()) return {"x_f", "x_s"};
    return {"x_f", "x_s", "beta"};
}

void PlanarSystem::observe(double t, std::span<const double> x, std::span<double> out) const {
    out[0] = x[0];
    out[1] = x[1];
    if (!schedule_.empty()) out[2] = beta_at(t);
}

// -----------------------------------------------------------------------------

CascadeSystem::CascadeSystem(PlanarParams p, DetectorParams dp, NoiseSpec noise)
    : p_(std::move(p)), dp_(dp), noise_(noise) {
    validate(p_);
    validate(dp_);
}

CascadeSystem::CascadeSystem(PlanarParams p, DetectorParams dp, BetaSchedule schedule, NoiseSpec noise)
    : p_(std::move(p)), dp_(dp), schedule_(std::move(schedule)), noise_(noise) {
    validate(p_);
    validate(dp_);
}

double CascadeSystem::beta_at(double t) const {
    return schedule_.empty() ? p_.beta : schedule_.value(t);
}

void CascadeSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) const {
    PlanarParams p = p_;
    p.beta = beta_at(t);
    const auto d = cascade_rhs(p, dp_, CascadeState{x[0], x[1], x[2]}, t, &noise_);
    dxdt[0] = d[0];
    dxdt[1] = d[1];
    dxdt[2] = d[2];
}

std::vector<std::string> CascadeSystem::channel_names() const {
    return {"x_f", "x_s", "beta_hat", "beta"};
}

void CascadeSystem::observe(double t, std::span<const double> x, std::span<double> out) const {
    out[0] = x[0];
    out[1] = x[1];
    out[2] = x[2];
    out[3] = beta_at(t);
}

// -----------------------------------------------------------------------------

HHSystem::HHSystem(HHParams p) : p_(p) { validate(p_); }

void HHSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) const {
    const HHState s{x[0], x[1], x[2], x[3], x[4], x[5], x[6]};
    const auto d = hh_rhs(p_, s, t).to_array();
    std::copy(d.begin(), d.end(), dxdt.begin());
}

std::vector<std::string> HHSystem::channel_names() const {
    return {"V", "m", "n", "h", "g_na_hat", "hp_V", "hp_w"};
}

void HHSystem::project(std::span<double> x) const {
    constexpr double kOvershoot = 1e-9;
    for (std::size_t i = 1; i <= 3; ++i) {
        if (x[i] < -kOvershoot || x[i] > 1.0 + kOvershoot) {
            std::ostringstream os;
            os << "HH gating variable left [0,1]: " << channel_names()[i] << " = " << x[i];
            throw IntegrationError(os.str());
        }
        x[i] = std::clamp(x[i], 0.0, 1.0);
    }
}

// -----------------------------------------------------------------------------

DrivenDetectorSystem::DrivenDetectorSystem(DetectorParams dp, std::vector<double> times,
                                           std::vector<double> x_f, std::vector<double> x_s, double u)
    : dp_(dp), times_(std::move(times)), x_f_(std::move(x_f)), x_s_(std::move(x_s)), u_(u) {
    validate(dp_);
    if (times_.size() < 2 || x_f_.size() != times_.size() || x_s_.size() != times_.size()) {
        throw AnalysisError("driven detector: channels must have equal length >= 2");
    }
    t0_ = times_.front();
    h_ = (times_.back() - t0_) / static_cast<double>(times_.size() - 1);
}

std::pair<double, double> DrivenDetectorSystem::inputs_at(double t) const {
    const double pos = (t - t0_) / h_;
    const auto last = static_cast<double>(times_.size() - 1);
    if (pos <= 0.0) return {x_f_.front(), x_s_.front()};
    if (pos >= last) return {x_f_.back(), x_s_.back()};
    const auto i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return {(1.0 - w) * x_f_[i] + w * x_f_[i + 1], (1.0 - w) * x_s_[i] + w * x_s_[i + 1]};
}

void DrivenDetectorSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) const {
    const auto [xf, xs] = inputs_at(t);
    dxdt[0] = detector_rhs(dp_, x[0], xf, xs, u_);
    dxdt[1] = detector_rhs(dp_, x[1], xf, xs, u_);
}

// =============================================================================
// Trajectory
// =============================================================================

std::string to_string(Termination t) {
    return t == Termination::Completed ? "completed" : "diverged";
}

Trajectory::Trajectory(std::vector<std::string> channel_names)
    : names_(std::move(channel_names)), data_(names_.size()) {}

void Trajectory::append(double t, std::span<const double> values) {
    if (values.size() != names_.size()) throw AnalysisError("trajectory: channel count mismatch");
    if (!times_.empty() && !(t > times_.back())) {
        throw AnalysisError("trajectory: times must be strictly increasing");
    }
    times_.push_back(t);
    for (std::size_t i = 0; i < values.size(); ++i) data_[i].push_back(values[i]);
}

void Trajectory::add_channel(const std::string& name, std::vector<double> values) {
    if (values.size() != times_.size()) throw AnalysisError("trajectory: derived channel has wrong length");
    if (has_channel(name)) throw AnalysisError("trajectory: duplicate channel '" + name + "'");
    names_.push_back(name);
    data_.push_back(std::move(values));
}

bool Trajectory::has_channel(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Trajectory::channel(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw AnalysisError("trajectory: no channel '" + std::string(name) + "'");
    return data_[static_cast<std::size_t>(it - names_.begin())];
}

double Trajectory::sample_interval(double rel_tol) const {
    if (times_.size() < 2) throw AnalysisError("trajectory: fewer than two samples");
    const double h = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (std::abs(times_[i] - times_[i - 1] - h) > rel_tol * h) {
            throw AnalysisError("trajectory: sampling is not uniform");
        }
    }
    return h;
}

// =============================================================================
// Integration
// =============================================================================

std::string to_string(Method m) { return m == Method::RK4Fixed ? "rk4" : "dopri45"; }

Method parse_method(std::string_view text) {
    if (text == "rk4" || text == "RK4Fixed") return Method::RK4Fixed;
    if (text == "dopri45" || text == "DormandPrince45") return Method::DormandPrince45;
    throw ConfigError("unknown solver method '" + std::string(text) + "'");
}

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("solver.dt must be > 0");
    if (!(cfg.t_end > cfg.t_start)) throw ConfigError("solver.t_end must exceed the start time");
    if (cfg.record_stride < 1) throw ConfigError("solver.stride must be >= 1");
    if (cfg.method == Method::DormandPrince45 && !(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0)) {
        throw ConfigError("adaptive solver needs positive tolerances");
    }
    if (!(cfg.blowup_threshold > 0.0)) throw ConfigError("blow-up threshold must be > 0");
}

namespace {

class Recorder {
public:
    Recorder(const OdeSystem& system, double threshold)
        : system_(system), traj_(system.channel_names()), buf_(system.channel_names().size()),
          threshold_(threshold) {}

    // false when a recorded channel exceeds the blow-up threshold
    bool record(double t, std::span<const double> x) {
        system_.observe(t, x, buf_);
        traj_.append(t, buf_);
        return std::all_of(buf_.begin(), buf_.end(), [&](double v) { return std::abs(v) <= threshold_; });
    }

    Trajectory take() { return std::move(traj_); }
    Trajectory& trajectory() { return traj_; }

private:
    const OdeSystem& system_;
    Trajectory traj_;
    std::vector<double> buf_;
    double threshold_;
};

void check_finite(std::span<const double> v, double t) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            std::ostringstream os;
            os << "non-finite value in right-hand side at t=" << t;
            throw IntegrationError(os.str());
        }
    }
}

bool exceeds(std::span<const double> x, double threshold) {
    return std::any_of(x.begin(), x.end(), [&](double v) { return std::abs(v) > threshold; });
}

void eval_rhs(const OdeSystem& s, double t, std::span<const double> x, std::span<double> out) {
    s.rhs(t, x, out);
    check_finite(out, t);
}

Trajectory integrate_rk4(const OdeSystem& system, std::vector<double> x, const IntegratorConfig& cfg) {
    if (cfg.dt > system.max_fixed_step()) {
        std::ostringstream os;
        os << "RK4 step " << cfg.dt << " exceeds the stability bound " << system.max_fixed_step()
           << " for this system";
        throw ConfigError(os.str());
    }
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    const double span = cfg.t_end - cfg.t_start;
    auto steps = static_cast<std::size_t>(std::llround(span / cfg.dt));
    if (std::abs(static_cast<double>(steps) * cfg.dt - span) > 1e-9 * span) {
        steps = static_cast<std::size_t>(std::ceil(span / cfg.dt));
    }
    steps = std::max<std::size_t>(steps, 1);

    Recorder rec(system, cfg.blowup_threshold);
    if (!rec.record(cfg.t_start, x)) {
        auto tr = rec.take();
        tr.termination = Termination::Diverged;
        return tr;
    }

    double t = cfg.t_start;
    for (std::size_t i = 1; i <= steps; ++i) {
        const double t_next = (i == steps) ? cfg.t_end : cfg.t_start + static_cast<double>(i) * cfg.dt;
        const double h = t_next - t;

        eval_rhs(system, t, x, k1);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
        eval_rhs(system, t + 0.5 * h, tmp, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
        eval_rhs(system, t + 0.5 * h, tmp, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * k3[j];
        eval_rhs(system, t + h, tmp, k4);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] += h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        check_finite(x, t_next);
        system.project(x);
        t = t_next;

        if (exceeds(x, cfg.blowup_threshold)) {
            rec.record(t, x);
            auto tr = rec.take();
            tr.termination = Termination::Diverged;
            return tr;
        }
        if (i % cfg.record_stride == 0 && !rec.record(t, x)) {
            auto tr = rec.take();
            tr.termination = Termination::Diverged;
            return tr;
        }
    }
    return rec.take();
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Trajectory integrate_dopri(const OdeSystem& system, std::vector<double> x, const IntegratorConfig& cfg) {
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), xn(n);

    const double h_rec = cfg.dt * static_cast<double>(cfg.record_stride);
    const double span = cfg.t_end - cfg.t_start;
    const auto records = static_cast<std::size_t>(std::floor(span / h_rec + 1e-9));
    const double h_min = 1e-14 * std::max(1.0, std::abs(cfg.t_end));

    Recorder rec(system, cfg.blowup_threshold);
    if (!rec.record(cfg.t_start, x)) {
        auto tr = rec.take();
        tr.termination = Termination::Diverged;
        return tr;
    }

    double t = cfg.t_start;
    double h = std::min(h_rec, 1e-3 * span);
    std::size_t next = 1;
    while (next <= records) {
        const double target = cfg.t_start + static_cast<double>(next) * h_rec;
        bool hit = false;
        if (t + h >= target - 1e-12 * h_rec) {
            h = target - t;
            hit = true;
        }

        eval_rhs(system, t, x, k1);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * a21 * k1[j];
        eval_rhs(system, t + c2 * h, tmp, k2);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * (a31 * k1[j] + a32 * k2[j]);
        eval_rhs(system, t + c3 * h, tmp, k3);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * (a41 * k1[j] + a42 * k2[j] + a43 * k3[j]);
        eval_rhs(system, t + c4 * h, tmp, k4);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = x[j] + h * (a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
        eval_rhs(system, t + c5 * h, tmp, k5);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = x[j] + h * (a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j]);
        eval_rhs(system, t + h, tmp, k6);
        for (std::size_t j = 0; j < n; ++j)
            xn[j] = x[j] + h * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] + b6 * k6[j]);
        eval_rhs(system, t + h, xn, k7);

        double err = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
            const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x[j]), std::abs(xn[j]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0 || h <= h_min) {
            if (err > 1.0) throw IntegrationError("adaptive step size underflow");
            x.swap(xn);
            system.project(x);
            t = hit ? target : t + h;
            if (exceeds(x, cfg.blowup_threshold)) {
                auto tr = rec.take();
                tr.termination = Termination::Diverged;
                return tr;
            }
            if (hit) {
                if (!rec.record(t, x)) {
                    auto tr = rec.take();
                    tr.termination = Termination::Diverged;
                    return tr;
                }
                ++next;
            }
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(h * factor, h_rec);
        h = std::max(h, h_min);
    }
    return rec.take();
}

}  // namespace

Trajectory integrate(const OdeSystem& system, std::vector<double> initial, const IntegratorConfig& cfg) {
    validate(cfg);
    if (initial.size() != system.dimension()) {
        throw ConfigError("initial state has wrong dimension");
    }
    for (double v : initial) {
        if (!std::isfinite(v)) throw ConfigError("initial state must be finite");
    }
    Trajectory tr = cfg.method == Method::RK4Fixed ? integrate_rk4(system, std::move(initial), cfg)
                                                   : integrate_dopri(system, std::move(initial), cfg);
    tr.metadata["solver.method"] = to_string(cfg.method);
    tr.metadata["termination"] = to_string(tr.termination);
    return tr;
}

Trajectory integrate_piecewise_beta(const BetaSchedule& schedule, const PlanarParams& p,
                                    const DetectorParams& dp, const CascadeState& initial,
                                    const IntegratorConfig& cfg, const NoiseSpec& noise) {
    if (schedule.empty()) throw ConfigError("beta schedule: empty");
    if (schedule.t_begin() > cfg.t_start || schedule.t_end() < cfg.t_end) {
        throw ConfigError("beta schedule does not cover the integration interval");
    }
    CascadeSystem system(p, dp, schedule, noise);
    auto tr = integrate(system, {initial.x_f, initial.x_s, initial.beta_hat}, cfg);
    tr.metadata["schedule"] = schedule.format();
    return tr;
}

}  // namespace qualidetect
