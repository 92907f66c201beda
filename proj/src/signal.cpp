#include "qualidetect/signal.hpp"

#include "qualidetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qualidetect {

namespace {

const std::string& pick_channel(const Trajectory& traj, const std::string& requested,
                                std::initializer_list<const char*> fallbacks, bool required) {
    static const std::string none;
    if (!requested.empty()) {
        traj.channel(requested);  // throws when missing
        return requested;
    }
    for (const char* name : fallbacks) {
        for (const auto& c : traj.channel_names()) {
            if (c == name) return c;
        }
    }
    if (required) throw AnalysisError("trajectory has no activity channel (x_f or V)");
    return none;
}

std::size_t window_begin(const std::vector<double>& t, double settle_fraction) {
    if (!(settle_fraction > 0.0 && settle_fraction <= 1.0)) {
        throw ConfigError("settle_fraction must be in (0, 1]");
    }
    const double start = t.back() - settle_fraction * (t.back() - t.front());
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), start) - t.begin());
}

// Upward crossings of `level`, re-armed only after y drops below level - band.
std::vector<double> upward_crossings(const std::vector<double>& t, const std::vector<double>& y,
                                     std::size_t begin, double level, double band) {
    std::vector<double> out;
    bool armed = false;
    for (std::size_t i = begin; i < y.size(); ++i) {
        if (y[i] < level - band) armed = true;
        if (armed && i > begin && y[i - 1] < level && y[i] >= level) {
            const double w = (level - y[i - 1]) / (y[i] - y[i - 1]);
            out.push_back(t[i - 1] + w * (t[i] - t[i - 1]));
            armed = false;
        }
    }
    return out;
}

// Mean of y over [a, b] by trapezoids on the samples inside, with linear end pieces.
double time_mean(const std::vector<double>& t, const std::vector<double>& y, double a, double b) {
    const auto value_at = [&](double x) {
        auto it = std::lower_bound(t.begin(), t.end(), x);
        if (it == t.begin()) return y.front();
        if (it == t.end()) return y.back();
        const auto j = static_cast<std::size_t>(it - t.begin());
        const double w = (x - t[j - 1]) / (t[j] - t[j - 1]);
        return y[j - 1] + w * (y[j] - y[j - 1]);
    };
    double area = 0.0;
    double prev_t = a;
    double prev_y = value_at(a);
    for (auto it = std::upper_bound(t.begin(), t.end(), a); it != t.end() && *it < b; ++it) {
        const auto j = static_cast<std::size_t>(it - t.begin());
        area += 0.5 * (prev_y + y[j]) * (t[j] - prev_t);
        prev_t = t[j];
        prev_y = y[j];
    }
    area += 0.5 * (prev_y + value_at(b)) * (b - prev_t);
    return area / (b - a);
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

// -----------------------------------------------------------------------------

PEReport measure_pe(const std::vector<double>& y, double dt, double T, double mu, bool keep_windows) {
    if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("measure_pe: dt and T must be > 0");
    if (y.size() < 2) throw AnalysisError("measure_pe: need at least two samples");
    const double duration = dt * static_cast<double>(y.size() - 1);
    if (duration < 2.0 * T * (1.0 - 1e-12)) throw AnalysisError("measure_pe: channel shorter than 2T");

    const auto m = static_cast<std::size_t>(std::llround(T / dt));
    if (m == 0) throw ConfigError("measure_pe: T shorter than one sample");

    // prefix sums of the trapezoid areas, accumulated in extended precision
    std::vector<long double> cum(y.size(), 0.0L);
    for (std::size_t i = 1; i < y.size(); ++i) {
        const long double a = y[i - 1];
        const long double b = y[i];
        cum[i] = cum[i - 1] + 0.5L * (a * a + b * b) * dt;
    }

    PEReport r;
    r.T = static_cast<double>(m) * dt;
    r.mu = mu;
    r.mu_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + m < y.size(); ++i) {
        const auto e = static_cast<double>(cum[i + m] - cum[i]);
        r.mu_min = std::min(r.mu_min, e);
        if (keep_windows) {
            r.window_start.push_back(static_cast<double>(i) * dt);
            r.window_energy.push_back(e);
        }
    }
    r.mu_min = std::max(r.mu_min, 0.0);
    r.is_pe = r.mu_min >= mu;
    return r;
}

// -----------------------------------------------------------------------------

const char* to_string(Activity a) {
    switch (a) {
        case Activity::Resting: return "resting";
        case Activity::Oscillating: return "oscillating";
        case Activity::Undetermined: return "undetermined";
    }
    return "unknown";
}

int dead_band_sign(double v, double band) {
    if (std::isnan(v)) return 0;
    if (v > band) return 1;
    if (v < -band) return -1;
    return 0;
}

ActivityReport classify_activity(const Trajectory& traj, const ActivityOptions& opts) {
    if (traj.termination == Termination::Diverged) throw AnalysisError("cannot classify a diverged trajectory");
    if (traj.size() < 3) throw AnalysisError("trajectory too short to classify");

    const auto& t = traj.times();
    const auto& y = traj.channel(pick_channel(traj, opts.channel, {"x_f", "V"}, true));
    const std::string& det_name = pick_channel(traj, opts.detector_channel, {"beta_hat", "g_na_hat"}, false);

    const std::size_t begin = window_begin(t, opts.settle_fraction);
    if (t.size() - begin < 3) throw AnalysisError("analysis window holds fewer than three samples");

    ActivityReport r;
    r.window_start = t[begin];
    const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(begin), y.end());
    r.amplitude = *hi - *lo;

    if (r.amplitude < opts.rest_threshold) {
        r.label = Activity::Resting;
    } else if (r.amplitude >= opts.oscillation_threshold) {
        const double level = std::accumulate(y.begin() + static_cast<std::ptrdiff_t>(begin), y.end(), 0.0) /
                             static_cast<double>(y.size() - begin);
        r.crossings = upward_crossings(t, y, begin, level, 0.05 * r.amplitude);
        if (r.crossings.size() >= 2) {
            const std::size_t cycles = r.crossings.size() - 1;
            const double mean_period = (r.crossings.back() - r.crossings.front()) / static_cast<double>(cycles);
            bool consistent = true;
            for (std::size_t i = 1; i < r.crossings.size(); ++i) {
                const double d = r.crossings[i] - r.crossings[i - 1];
                if (std::abs(d - mean_period) > opts.period_tolerance * mean_period) consistent = false;
            }
            r.cycles = cycles;
            if (cycles >= opts.min_cycles && consistent) {
                r.label = Activity::Oscillating;
                r.period = mean_period;
            }
        }
    }

    if (det_name.empty()) {
        r.beta_hat_summary = std::numeric_limits<double>::quiet_NaN();
    } else {
        const auto& d = traj.channel(det_name);
        switch (r.label) {
            case Activity::Resting: r.beta_hat_summary = d.back(); break;
            case Activity::Oscillating:
                r.beta_hat_summary = time_mean(t, d, r.crossings[r.crossings.size() - 2], r.crossings.back());
                break;
            case Activity::Undetermined: r.beta_hat_summary = time_mean(t, d, t[begin], t.back()); break;
        }
    }
    r.beta_hat_sign = dead_band_sign(r.beta_hat_summary, opts.dead_band);
    return r;
}

// -----------------------------------------------------------------------------

std::vector<Interval> detect_jumps(const Trajectory& traj, const JumpOptions& opts) {
    const ActivityReport act = classify_activity(traj, opts.activity);
    if (act.label != Activity::Oscillating) return {};

    const auto& t = traj.times();
    const auto& y = traj.channel(pick_channel(traj, opts.activity.channel, {"x_f", "V"}, true));
    const std::size_t begin = window_begin(t, opts.activity.settle_fraction);
    const std::size_t n = t.size() - begin;

    std::vector<double> rate(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = begin + k;
        const std::size_t a = (k == 0) ? i : i - 1;
        const std::size_t b = (i + 1 == t.size()) ? i : i + 1;
        rate[k] = std::abs((y[b] - y[a]) / (t[b] - t[a]));
    }
    const double med = median(rate);
    const double peak = *std::max_element(rate.begin(), rate.end());
    const double threshold =
        opts.rule == JumpThreshold::GeometricMean ? std::sqrt(med * peak) : opts.multiple * med;

    // runs of above-threshold samples, as index ranges
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(rate[k] > threshold)) continue;
        if (!runs.empty() && k - runs.back().second <= opts.merge_gap) {
            runs.back().second = k;
        } else {
            runs.emplace_back(k, k);
        }
    }

    std::vector<Interval> out;
    out.reserve(runs.size());
    for (const auto& [a, b] : runs) {
        const std::size_t ia = begin + a;
        const std::size_t ib = begin + b;
        const double left = ia > 0 ? 0.5 * (t[ia] + t[ia - 1]) : t[ia];
        const double right = ib + 1 < t.size() ? 0.5 * (t[ib] + t[ib + 1]) : t[ib];
        out.push_back({left, right});
    }
    return out;
}

double jump_time_fraction(const Trajectory& traj, const JumpOptions& opts) {
    const ActivityReport act = classify_activity(traj, opts.activity);
    if (act.label != Activity::Oscillating) throw AnalysisError("jump fraction needs an oscillating trajectory");
    const double a = act.crossings.front();
    const double b = act.crossings.back();
    double total = 0.0;
    for (const auto& iv : detect_jumps(traj, opts)) {
        total += std::max(0.0, std::min(iv.end, b) - std::max(iv.start, a));
    }
    return total / (b - a);
}

// -----------------------------------------------------------------------------

std::vector<double> apply_filter(const std::vector<double>& y, double dt, const FilterSpec& f) {
    if (!(dt > 0.0)) throw ConfigError("filter: dt must be > 0");
    if (!(f.tau >= 2.0 * dt)) throw ConfigError("filter: time constant must be at least twice the sample interval");

    std::vector<double> out(y.size());
    switch (f.kind) {
        case FilterKind::LowPass1:
        case FilterKind::HighPass1: {
            const double a = std::exp(-dt / f.tau);
            double z = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                z = a * z + (1.0 - a) * y[i];
                out[i] = f.kind == FilterKind::LowPass1 ? z : y[i] - z;
            }
            break;
        }
        case FilterKind::SlidingMean: {
            const auto half = static_cast<std::size_t>(std::llround(0.5 * f.tau / dt));
            std::vector<double> cum(y.size() + 1, 0.0);
            for (std::size_t i = 0; i < y.size(); ++i) cum[i + 1] = cum[i] + y[i];
            for (std::size_t i = 0; i < y.size(); ++i) {
                const std::size_t a = i >= half ? i - half : 0;
                const std::size_t b = std::min(y.size(), i + half + 1);
                out[i] = (cum[b] - cum[a]) / static_cast<double>(b - a);
            }
            break;
        }
    }
    return out;
}

// -----------------------------------------------------------------------------

std::vector<Point> last_period(const Trajectory& traj, const ActivityOptions& opts) {
    const ActivityReport act = classify_activity(traj, opts);
    if (act.crossings.size() < 2) throw AnalysisError("last_period: fewer than two upward crossings");
    const double a = act.crossings[act.crossings.size() - 2];
    const double b = act.crossings.back();

    const auto& t = traj.times();
    const auto& xf = traj.channel("x_f");
    const auto& xs = traj.channel("x_s");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= a && t[i] <= b) pts.push_back({xf[i], xs[i]});
    }
    return pts;
}

double settle_time(const std::vector<double>& t, const std::vector<double>& y, double tol) {
    if (t.empty() || t.size() != y.size()) throw AnalysisError("settle_time: bad input");
    const double final_value = y.back();
    std::size_t i = y.size();
    while (i > 0 && std::abs(y[i - 1] - final_value) <= tol) --i;
    return i == 0 ? t.front() : t[std::min(i, t.size() - 1)];
}

// -----------------------------------------------------------------------------

StabilityReport check_incremental_stability(const PlanarParams& p, const DetectorParams& dp, double beta_hat_1,
                                            double beta_hat_2, const Trajectory& plant,
                                            const StabilityOptions& opts) {
    const double h = plant.sample_interval();
    const auto& t = plant.times();

    StabilityReport r;
    r.pe = measure_pe(plant.channel("x_f"), h, opts.pe_window, opts.pe_mu);
    if (!r.pe.is_pe) r.flag = "PE not satisfied; no contraction guarantee";

    DrivenDetectorSystem sys(dp, t, plant.channel("x_f"), plant.channel("x_s"), p.u);
    IntegratorConfig cfg;
    cfg.method = Method::RK4Fixed;
    cfg.dt = h;
    cfg.t_start = t.front();
    cfg.t_end = t.back();
    cfg.record_stride = 1;
    const Trajectory out = integrate(sys, {beta_hat_1, beta_hat_2}, cfg);
    if (out.termination == Termination::Diverged) throw AnalysisError("detector pair diverged");

    const auto& tt = out.times();
    const auto& b1 = out.channel(std::size_t{0});
    const auto& b2 = out.channel(std::size_t{1});
    r.initial_difference = std::abs(beta_hat_1 - beta_hat_2);
    r.final_difference = std::abs(b1.back() - b2.back());

    // log-spaced grid over the elapsed time
    const double span = tt.back() - tt.front();
    const double first = std::min(h, span);
    const std::size_t m = std::max<std::size_t>(opts.grid_points, 2);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t fit_n = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double frac = static_cast<double>(j) / static_cast<double>(m - 1);
        const double target = tt.front() + first * std::pow(span / first, frac);
        auto it = std::lower_bound(tt.begin(), tt.end(), target - 1e-9 * span);
        if (it == tt.end()) --it;
        const auto i = static_cast<std::size_t>(it - tt.begin());
        const double ratio = r.initial_difference > 0.0 ? std::abs(b1[i] - b2[i]) / r.initial_difference : 0.0;
        r.grid_t.push_back(tt[i]);
        r.ratio.push_back(ratio);
        if (tt[i] >= tt.front() + opts.pe_window) r.sup_ratio_after_pe = std::max(r.sup_ratio_after_pe, ratio);
        if (ratio > 1e-12) {
            const double x = tt[i] - tt.front();
            const double ly = std::log(ratio);
            sx += x;
            sy += ly;
            sxx += x * x;
            sxy += x * ly;
            ++fit_n;
        }
    }
    if (fit_n >= 2) {
        const double denom = static_cast<double>(fit_n) * sxx - sx * sx;
        if (denom > 0.0) r.decay_rate = -(static_cast<double>(fit_n) * sxy - sx * sy) / denom;
    }

    if (r.initial_difference == 0.0) {
        r.contracts = r.final_difference == 0.0;
    } else {
        r.contracts = r.pe.is_pe && r.sup_ratio_after_pe < 1.0 && r.decay_rate > 0.0;
    }
    return r;
}

}  // namespace qualidetect
