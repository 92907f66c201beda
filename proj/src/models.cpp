#include "qualidetect/models.hpp"

#include "qualidetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qualidetect {

namespace {

bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// x / (1 - exp(-x / 10)), with the removable singularity at x = 0 taken by its series.
double linear_over_expm1(double x) {
    const double denom = -std::expm1(-x / 10.0);
    if (std::abs(denom) < 1e-7) return 10.0 + 0.5 * x + x * x / 120.0;
    return x / denom;
}

}  // namespace

// -----------------------------------------------------------------------------

std::vector<std::string> validate(const PlanarParams& p) {
    if (!finite_all({p.beta, p.eps, p.u})) throw ConfigError("planar parameters must be finite");
    if (!(p.eps > 0.0)) throw ConfigError("eps must be > 0");
    std::vector<std::string> warnings;
    if (p.eps > 0.1) warnings.emplace_back("eps > 0.1: not singularly perturbed");
    return warnings;
}

void validate(const DetectorParams& dp) {
    if (!(dp.k > 0.0) || !std::isfinite(dp.k)) throw ConfigError("detector gain k must be > 0");
}

double NoiseSpec::d_out(double t) const {
    if (d_out_amp == 0.0) return 0.0;
    return d_out_amp * std::sin(d_out_freq * t);
}

std::array<double, 2> planar_rhs(const PlanarParams& p, double x_f, double x_s, double t,
                                 const NoiseSpec* noise) {
    (void)t;
    if (!finite_all({x_f, x_s})) throw IntegrationError("planar_rhs: non-finite state");
    const double u = p.u + (noise ? noise->d_in : 0.0);
    return {-x_f + eval(p.sigmoid, p.beta * x_f + u - x_s), p.eps * (x_f - x_s)};
}

double detector_rhs(const DetectorParams& dp, double beta_hat, double x_f_meas, double x_s_meas,
                    double u) {
    const double x = x_f_meas;
    return -dp.k * x * (-x * x * x + beta_hat * x + u - x_s_meas);
}

std::array<double, 3> cascade_rhs(const PlanarParams& p, const DetectorParams& dp,
                                  const CascadeState& s, double t, const NoiseSpec* noise) {
    const auto plant = planar_rhs(p, s.x_f, s.x_s, t, noise);
    const double d = noise ? noise->d_out(t) : 0.0;
    const double bh = detector_rhs(dp, s.beta_hat, s.x_f + d, s.x_s + d, p.u);
    return {plant[0], plant[1], bh};
}

// -----------------------------------------------------------------------------

BetaSchedule::BetaSchedule(std::vector<BetaSegment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ConfigError("beta schedule: no segments");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!finite_all({s.t_start, s.t_end, s.beta_start, s.slope})) {
            throw ConfigError("beta schedule: non-finite segment value");
        }
        if (!(s.t_end > s.t_start)) throw ConfigError("beta schedule: empty or reversed segment");
        if (i > 0 && segments_[i - 1].t_end != s.t_start) {
            throw ConfigError(segments_[i - 1].t_end < s.t_start ? "beta schedule: gap between segments"
                                                                 : "beta schedule: overlapping segments");
        }
    }
}

BetaSchedule BetaSchedule::constant(double beta, double t_end) {
    return BetaSchedule({BetaSegment{0.0, t_end, beta, 0.0}});
}

BetaSchedule BetaSchedule::parse(const std::string& text) {
    std::vector<BetaSegment> segs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        BetaSegment s;
        char c1 = 0, c2 = 0, c3 = 0;
        std::istringstream is(item);
        if (!(is >> s.t_start >> c1 >> s.t_end >> c2 >> s.beta_start >> c3 >> s.slope) || c1 != ':' ||
            c2 != ':' || c3 != ':') {
            throw ConfigError("beta schedule: cannot parse segment '" + item + "'");
        }
        segs.push_back(s);
    }
    return BetaSchedule(std::move(segs));
}

std::string BetaSchedule::format() const {
    std::string out;
    char buf[128];
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        std::snprintf(buf, sizeof buf, "%s%.17g:%.17g:%.17g:%.17g", i ? ";" : "", s.t_start, s.t_end,
                      s.beta_start, s.slope);
        out += buf;
    }
    return out;
}

double BetaSchedule::value(double t) const {
    if (segments_.empty()) throw ConfigError("beta schedule: empty");
    const BetaSegment* seg = &segments_.back();
    for (const auto& s : segments_) {
        if (t < s.t_end) {
            seg = &s;
            break;
        }
    }
    return seg->beta_start + seg->slope * (t - seg->t_start);
}

double BetaSchedule::t_begin() const { return segments_.empty() ? 0.0 : segments_.front().t_start; }
double BetaSchedule::t_end() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }

// -----------------------------------------------------------------------------

void validate(const HHParams& p) {
    if (!finite_all({p.C, p.g_na, p.g_k, p.g_l, p.v_na, p.v_k, p.v_l, p.i_app, p.k, p.tau_hp})) {
        throw ConfigError("HH parameters must be finite");
    }
    if (!(p.C > 0.0)) throw ConfigError("HH: C must be > 0");
    if (p.g_na < 0.0 || p.g_k < 0.0 || p.g_l < 0.0) throw ConfigError("HH: conductances must be >= 0");
    if (!(p.k > 0.0)) throw ConfigError("HH: detector gain k must be > 0");
    if (!(p.tau_hp > 0.0)) throw ConfigError("HH: tau_hp must be > 0");
}

std::array<double, HHState::size> HHState::to_array() const {
    return {V, m, n, h, g_na_hat, hp_V, hp_w};
}

HHState HHState::from_array(const std::array<double, size>& a) {
    return HHState{a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
}

namespace hh {

double alpha_m(double V) { return 0.1 * linear_over_expm1(V + 40.0); }
double beta_m(double V) { return 4.0 * std::exp(-(V + 65.0) / 18.0); }
double alpha_h(double V) { return 0.07 * std::exp(-(V + 65.0) / 20.0); }
double beta_h(double V) { return 1.0 / (1.0 + std::exp(-(V + 35.0) / 10.0)); }
double alpha_n(double V) { return 0.01 * linear_over_expm1(V + 55.0); }
double beta_n(double V) { return 0.125 * std::exp(-(V + 65.0) / 80.0); }

double m_inf(double V) { return alpha_m(V) / (alpha_m(V) + beta_m(V)); }
double h_inf(double V) { return alpha_h(V) / (alpha_h(V) + beta_h(V)); }
double n_inf(double V) { return alpha_n(V) / (alpha_n(V) + beta_n(V)); }
double tau_m(double V) { return 1.0 / (alpha_m(V) + beta_m(V)); }
double tau_h(double V) { return 1.0 / (alpha_h(V) + beta_h(V)); }
double tau_n(double V) { return 1.0 / (alpha_n(V) + beta_n(V)); }

HHState initial_state(const HHParams& p, double V0) {
    HHState s;
    s.V = V0;
    s.m = m_inf(V0);
    s.n = n_inf(V0);
    s.h = h_inf(V0);
    s.g_na_hat = 0.0;
    s.hp_V = V0;
    s.hp_w = slow_value(p, s);
    return s;
}

double slow_value(const HHParams& p, const HHState& s) {
    return p.slow_signal == SlowSignal::N ? s.n : s.m;
}

}  // namespace hh

HHState hh_rhs(const HHParams& p, const HHState& s, double t) {
    (void)t;
    const double V = s.V;
    if (!finite_all({V, s.m, s.n, s.h, s.g_na_hat, s.hp_V, s.hp_w})) {
        throw IntegrationError("hh_rhs: non-finite state");
    }

    const double n2 = s.n * s.n;
    const double i_k = p.g_k * n2 * n2 * (V - p.v_k);
    const double i_na = p.g_na * s.m * s.m * s.m * s.h * (V - p.v_na);
    const double i_l = p.g_l * (V - p.v_l);

    HHState d;
    d.V = (-i_k - i_na - i_l + p.i_app) / p.C;
    d.m = hh::alpha_m(V) * (1.0 - s.m) - hh::beta_m(V) * s.m;
    d.n = hh::alpha_n(V) * (1.0 - s.n) - hh::beta_n(V) * s.n;
    d.h = hh::alpha_h(V) * (1.0 - s.h) - hh::beta_h(V) * s.h;

    const double v_bar = V - s.hp_V;
    const double slow = hh::slow_value(p, s);
    const double w_bar = slow - s.hp_w;
    d.g_na_hat = -p.k * v_bar * (-v_bar * v_bar * v_bar + s.g_na_hat * v_bar + p.i_app - w_bar);
    d.hp_V = v_bar / p.tau_hp;
    d.hp_w = w_bar / p.tau_hp;
    return d;
}

}  // namespace qualidetect
