#include "qualidetect/harness.hpp"

#include "qualidetect/errors.hpp"
#include "qualidetect/manifold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

namespace qualidetect {

namespace {

using KeyList = std::vector<std::pair<std::string, std::string>>;

const KeyList kPlanarCommon = {
    {"eps", "0.001"},           {"u", "-0.01"},         {"k", "5"},
    {"solver.method", "rk4"},   {"solver.dt", "0.01"},  {"solver.stride", "10"},
    {"solver.t_end", "20000"},  {"analysis.settle_fraction", "0.3"},
};

const char* kFig4Offsets = "-0.5,-0.4,-0.3,-0.2,-0.1,0,0.1,0.2,0.3,0.4,0.5";

KeyList with(KeyList base, const KeyList& extra) {
    for (const auto& kv : extra) {
        auto it = std::find_if(base.begin(), base.end(), [&](const auto& b) { return b.first == kv.first; });
        if (it != base.end()) {
            it->second = kv.second;
        } else {
            base.push_back(kv);
        }
    }
    return base;
}

KeyList without(KeyList base, const std::string& key) {
    base.erase(std::remove_if(base.begin(), base.end(), [&](const auto& kv) { return kv.first == key; }), base.end());
    return base;
}

KeyList preset_base(const std::string& name) {
    if (name == "fig2") return with(kPlanarCommon, {{"model", "planar"}});
    if (name == "fig3") {
        return with(kPlanarCommon, {{"model", "cascade"},
                                    {"sigmoid", "tanh"},
                                    {"schedule", "0:300:0.5:0;300:425:0.5:0.005;425:1000:1.2:0"},
                                    {"solver.t_end", "1000"},
                                    {"analysis.lowpass_tau", "5"}});
    }
    if (name == "fig4") {
        return with(kPlanarCommon, {{"model", "cascade"}, {"sweep.param", "beta_offset"}, {"sweep.values", kFig4Offsets}});
    }
    if (name == "fig5") {
        return with(preset_base("fig4"), {{"sigmoid", "tanh"},
                                          {"noise.d_out_amp", "0.005"},
                                          {"noise.d_out_freq", "50"},
                                          {"noise.d_in", "0.008"}});
    }
    if (name == "fig7") {
        return {{"model", "hh"},
                {"k", "4"},
                {"hh.g_k", "9"},
                {"hh.slow_signal", "n"},
                {"hh.tau_hp", "50"},
                {"solver.method", "dopri45"},
                {"solver.dt", "0.01"},
                {"solver.stride", "10"},
                {"solver.rel_tol", "1e-8"},
                {"solver.abs_tol", "1e-10"},
                {"solver.t_end", "500"},
                {"analysis.settle_fraction", "0.3"},
                {"sweep.param", "hh.g_na"},
                {"sweep.values", "23,25,27,29,31"}};
    }
    if (name == "eps_scaling") {
        return with(without(kPlanarCommon, "solver.t_end"), {{"model", "planar"},
                                    {"sigmoid", "tanh"},
                                    {"beta", "1.2"},
                                    {"solver.eps_t_end", "12"},
                                    {"analysis.hausdorff", "true"},
                                    {"sweep.param", "eps"},
                                    {"sweep.values", "0.004,0.002,0.001,0.0005"}});
    }
    throw ConfigError("unknown preset '" + name + "'");
}

bool known_key(const std::string& key) {
    static const std::set<std::string> keys = {
        "model",           "beta",           "beta_offset",     "eps",
        "u",               "k",              "noise.d_out_amp", "noise.d_out_freq",
        "noise.d_in",      "hh.g_na",        "hh.g_k",          "hh.i_app",
        "hh.slow_signal",  "hh.tau_hp",      "solver.method",   "solver.dt",
        "solver.t_end",    "solver.eps_t_end", "solver.stride", "solver.rel_tol",
        "solver.abs_tol",  "init.x_f",       "init.x_s",        "init.beta_hat",
        "init.V",          "schedule",       "analysis.settle_fraction",
        "analysis.lowpass_tau",              "analysis.hausdorff",
        "preset",          "sweep.param",    "sweep.values",    "name",
    };
    static const std::regex sigmoid_key(R"(sigmoid(\.component\.\d+)*(\.c1|\.c2)?)");
    return keys.count(key) != 0 || std::regex_match(key, sigmoid_key);
}

Sigmoid build_sigmoid(const Config& cfg, const std::string& prefix) {
    const std::string kind = cfg.get_string(prefix, "tanh");
    const double c1 = cfg.get_double(prefix + ".c1", 1.0);
    const double c2 = cfg.get_double(prefix + ".c2", 1.0);
    if (kind == "tanh") return Sigmoid::tanh(c1, c2);
    if (kind == "logistic") return Sigmoid::logistic(c1, c2);
    if (kind == "gompertz") {
        if (cfg.has(prefix + ".c2") && std::abs(c2 - std::exp(-1.0)) > 1e-12) {
            throw ConfigError(prefix + ".c2: Gompertz requires c2 = exp(-1) so that S(0) = 0");
        }
        return Sigmoid::gompertz(c1);
    }
    if (kind == "sum") {
        std::vector<Sigmoid> parts;
        for (std::size_t i = 0; cfg.has(prefix + ".component." + std::to_string(i)); ++i) {
            parts.push_back(build_sigmoid(cfg, prefix + ".component." + std::to_string(i)));
        }
        return Sigmoid::sum(std::move(parts));
    }
    throw ConfigError(prefix + ": unknown sigmoid '" + kind + "'");
}

std::string detector_channel(const Trajectory& t) {
    if (t.has_channel("beta_hat")) return "beta_hat";
    if (t.has_channel("g_na_hat")) return "g_na_hat";
    return {};
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IOError("cannot create directory '" + dir + "': " + ec.message());
}

std::string trajectory_script(const std::string& csv, const Trajectory& t) {
    std::string s = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n";
    s += "set multiplot layout " + std::to_string(t.channel_names().size()) + ",1\n";
    for (std::size_t i = 0; i < t.channel_names().size(); ++i) {
        s += "plot '" + csv + "' using 1:" + std::to_string(i + 2) + " with lines\n";
    }
    s += "unset multiplot\n";
    return s;
}

std::string sweep_script(const std::string& csv, const std::string& param) {
    return "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" + param +
           "'\nset ylabel 'detector summary'\nset xzeroaxis\nplot '" + csv +
           "' using 1:7 with linespoints\n";
}

}  // namespace

const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Planar: return "planar";
        case ModelKind::Cascade: return "cascade";
        case ModelKind::HH: return "hh";
    }
    return "unknown";
}

// -----------------------------------------------------------------------------

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5", "fig7", "eps_scaling"}; }

Config expand_preset(const Config& cfg) {
    const auto name = cfg.get("preset");
    if (!name) return cfg;
    Config out = cfg;
    for (const auto& [k, v] : preset_base(*name)) {
        if (k == "beta" && out.has("beta_offset")) continue;
        if (k == "beta_offset" && out.has("beta")) continue;
        if (k == "solver.eps_t_end" && out.has("solver.t_end")) continue;
        if (!out.has(k)) out.set(k, v);
    }
    return out;
}

std::vector<PresetJob> preset_jobs(const std::string& name) {
    preset_base(name);  // validates the name
    std::vector<std::pair<std::string, KeyList>> jobs;
    const std::vector<std::pair<std::string, std::string>> sigmoids = {
        {"s1", "tanh"}, {"s2", "gompertz"}, {"s3", "logistic"}};

    if (name == "fig2") {
        for (const auto& [tag, kind] : sigmoids) {
            jobs.push_back({"fig2_" + tag + "_below", {{"sigmoid", kind}, {"beta_offset", "-0.5"}}});
            jobs.push_back({"fig2_" + tag + "_above", {{"sigmoid", kind}, {"beta_offset", "0.2"}}});
        }
    } else if (name == "fig4") {
        for (const auto& [tag, kind] : sigmoids) jobs.push_back({"fig4_" + tag, {{"sigmoid", kind}}});
    } else if (name == "fig7") {
        for (const char* i : {"18", "20", "22"}) jobs.push_back({std::string("fig7_iapp") + i, {{"hh.i_app", i}}});
    } else {
        jobs.push_back({name, {}});
    }

    std::vector<PresetJob> out;
    for (auto& [job_name, keys] : jobs) {
        Config c;
        c.set("preset", name);
        c.set("name", job_name);
        for (const auto& [k, v] : keys) c.set(k, v);
        out.push_back({job_name, expand_preset(c)});
    }
    return out;
}

ExperimentConfig resolve(const Config& raw) {
    const Config cfg = expand_preset(raw);
    for (const auto& [k, v] : cfg.values()) {
        if (!known_key(k)) throw ConfigError("unknown config key '" + k + "'");
    }

    ExperimentConfig ec;
    ec.preset = cfg.get_string("preset", "");
    ec.name = cfg.get_string("name", "run");

    const std::string model = cfg.get_string("model", "cascade");
    if (model == "planar") {
        ec.model = ModelKind::Planar;
    } else if (model == "cascade") {
        ec.model = ModelKind::Cascade;
    } else if (model == "hh") {
        ec.model = ModelKind::HH;
    } else {
        throw ConfigError("model: expected planar, cascade or hh, got '" + model + "'");
    }

    // planar + detector
    ec.planar.sigmoid = build_sigmoid(cfg, "sigmoid");
    if (cfg.has("beta") && cfg.has("beta_offset")) throw ConfigError("set either beta or beta_offset, not both");
    ec.planar.beta = cfg.has("beta_offset") ? beta_c(ec.planar.sigmoid) + cfg.get_double("beta_offset", 0.0)
                                            : cfg.get_double("beta", ec.planar.beta);
    ec.planar.eps = cfg.get_double("eps", ec.planar.eps);
    ec.planar.u = cfg.get_double("u", ec.planar.u);
    ec.detector.k = cfg.get_double("k", ec.model == ModelKind::HH ? ec.hh.k : ec.detector.k);

    ec.noise.d_out_amp = cfg.get_double("noise.d_out_amp", 0.0);
    ec.noise.d_out_freq = cfg.get_double("noise.d_out_freq", 0.0);
    ec.noise.d_in = cfg.get_double("noise.d_in", 0.0);

    ec.init.x_f = cfg.get_double("init.x_f", ec.init.x_f);
    ec.init.x_s = cfg.get_double("init.x_s", ec.init.x_s);
    ec.init.beta_hat = cfg.get_double("init.beta_hat", ec.init.beta_hat);
    ec.hh_v0 = cfg.get_double("init.V", ec.hh_v0);

    if (const auto s = cfg.get("schedule")) ec.schedule = BetaSchedule::parse(*s);

    // HH
    ec.hh.g_na = cfg.get_double("hh.g_na", ec.hh.g_na);
    ec.hh.g_k = cfg.get_double("hh.g_k", ec.hh.g_k);
    ec.hh.i_app = cfg.get_double("hh.i_app", ec.hh.i_app);
    ec.hh.tau_hp = cfg.get_double("hh.tau_hp", ec.hh.tau_hp);
    ec.hh.k = ec.detector.k;
    const std::string slow = cfg.get_string("hh.slow_signal", "n");
    if (slow == "n") {
        ec.hh.slow_signal = SlowSignal::N;
    } else if (slow == "m") {
        ec.hh.slow_signal = SlowSignal::M;
    } else {
        throw ConfigError("hh.slow_signal: expected n or m");
    }

    // solver
    const bool hh = ec.model == ModelKind::HH;
    ec.solver.method = parse_method(cfg.get_string("solver.method", hh ? "dopri45" : "rk4"));
    ec.solver.dt = cfg.get_double("solver.dt", hh ? 0.01 : std::min(0.01, 10.0 * ec.planar.eps));
    ec.solver.record_stride = cfg.get_size("solver.stride", ec.solver.record_stride);
    ec.solver.rel_tol = cfg.get_double("solver.rel_tol", ec.solver.rel_tol);
    ec.solver.abs_tol = cfg.get_double("solver.abs_tol", ec.solver.abs_tol);
    if (cfg.has("solver.t_end") && cfg.has("solver.eps_t_end")) {
        throw ConfigError("set either solver.t_end or solver.eps_t_end, not both");
    }
    ec.solver.t_end = cfg.has("solver.eps_t_end") ? cfg.get_double("solver.eps_t_end", 0.0) / ec.planar.eps
                                                  : cfg.get_double("solver.t_end", hh ? 500.0 : 2000.0);

    // analysis
    ec.activity.settle_fraction = cfg.get_double("analysis.settle_fraction", ec.activity.settle_fraction);
    ec.lowpass_tau = cfg.get_double("analysis.lowpass_tau", 0.0);
    ec.hausdorff = cfg.get_bool("analysis.hausdorff", false);

    if (const auto param = cfg.get("sweep.param")) {
        SweepSpec s;
        s.param = *param;
        if (!known_key(s.param) || s.param.rfind("sweep.", 0) == 0 || s.param == "model" || s.param == "preset") {
            throw ConfigError("sweep.param: '" + s.param + "' is not a numeric parameter");
        }
        const auto text = cfg.get("sweep.values");
        if (!text) throw ConfigError("sweep.param set without sweep.values");
        const auto nums = parse_double_list(*text, "sweep.values");
        std::stringstream ss(*text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            s.values.push_back(item);
        }
        for (std::size_t i = 2; i < nums.size(); ++i) {
            if ((nums[i] - nums[i - 1]) * (nums[1] - nums[0]) <= 0.0) throw ConfigError("sweep.values must be monotone");
        }
        if (nums.size() == 2 && nums[0] == nums[1]) throw ConfigError("sweep.values must be monotone");
        ec.sweep = s;
    } else if (cfg.has("sweep.values")) {
        throw ConfigError("sweep.values set without sweep.param");
    }

    // validation
    ec.warnings = validate(ec.planar);
    validate(ec.detector);
    validate(ec.hh);
    validate(ec.solver);
    if (!ec.schedule.empty() && ec.model != ModelKind::Cascade && ec.model != ModelKind::Planar) {
        throw ConfigError("schedule applies to planar and cascade models only");
    }
    if (ec.lowpass_tau < 0.0) throw ConfigError("analysis.lowpass_tau must be >= 0");
    return ec;
}

// -----------------------------------------------------------------------------

Trajectory simulate(const ExperimentConfig& ec) {
    Trajectory traj;
    switch (ec.model) {
        case ModelKind::Planar: {
            if (ec.schedule.empty()) {
                PlanarSystem sys(ec.planar, ec.noise);
                traj = integrate(sys, {ec.init.x_f, ec.init.x_s}, ec.solver);
            } else {
                PlanarSystem sys(ec.planar, ec.schedule, ec.noise);
                traj = integrate(sys, {ec.init.x_f, ec.init.x_s}, ec.solver);
            }
            break;
        }
        case ModelKind::Cascade: {
            if (ec.schedule.empty()) {
                CascadeSystem sys(ec.planar, ec.detector, ec.noise);
                traj = integrate(sys, {ec.init.x_f, ec.init.x_s, ec.init.beta_hat}, ec.solver);
            } else {
                traj = integrate_piecewise_beta(ec.schedule, ec.planar, ec.detector, ec.init, ec.solver, ec.noise);
            }
            break;
        }
        case ModelKind::HH: {
            HHSystem sys(ec.hh);
            const auto s0 = hh::initial_state(ec.hh, ec.hh_v0).to_array();
            traj = integrate(sys, std::vector<double>(s0.begin(), s0.end()), ec.solver);
            break;
        }
    }
    traj.metadata["model"] = to_string(ec.model);
    return traj;
}

RunResult run_single(const ExperimentConfig& ec) {
    RunResult r;
    r.trajectory = simulate(ec);
    if (r.trajectory.termination == Termination::Diverged) {
        throw IntegrationError("run diverged at t=" + format_real(r.trajectory.times().back()));
    }
    const std::string det = detector_channel(r.trajectory);
    if (ec.lowpass_tau > 0.0 && !det.empty()) {
        const auto lp = apply_filter(r.trajectory.channel(det), r.trajectory.sample_interval(),
                                     FilterSpec{FilterKind::LowPass1, ec.lowpass_tau});
        r.trajectory.add_channel(det + "_lp", lp);
    }
    r.report = classify_activity(r.trajectory, ec.activity);
    r.settle_time = det.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : settle_time(r.trajectory.times(), r.trajectory.channel(det), 1e-2);
    if (ec.hausdorff) {
        if (ec.model == ModelKind::HH) throw ConfigError("analysis.hausdorff needs the planar or cascade model");
        const auto orbit = singular_orbit(ec.planar, 5000);
        const auto period = resample_polyline(last_period(r.trajectory, ec.activity), 2000);
        r.hausdorff = polyline_hausdorff_distance(period, orbit.points);
    }
    return r;
}

std::string report_line(const ActivityReport& r) {
    std::string s = "label=" + std::string(to_string(r.label));
    s += " amplitude=" + format_real(r.amplitude);
    s += " period=" + (r.period ? format_real(*r.period) : std::string("none"));
    s += " cycles=" + std::to_string(r.cycles);
    s += " detector_summary=" + format_real(r.beta_hat_summary);
    s += " detector_sign=" + std::to_string(r.beta_hat_sign);
    return s;
}

// -----------------------------------------------------------------------------

Table SweepResult::to_table() const {
    const bool with_dh = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.hausdorff.has_value(); });
    Table t;
    t.header = {param, "status", "label", "amplitude", "period", "cycles", "beta_hat_summary", "beta_hat_sign",
                "settle_time"};
    if (with_dh) t.header.push_back("hausdorff");
    t.header.push_back("error");
    const std::string nan = format_real(std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
        std::vector<std::string> cells = {r.value, r.ok ? "ok" : "failed"};
        if (r.ok) {
            cells.insert(cells.end(), {to_string(r.report.label), format_real(r.report.amplitude),
                                       r.report.period ? format_real(*r.report.period) : nan,
                                       std::to_string(r.report.cycles), format_real(r.report.beta_hat_summary),
                                       std::to_string(r.report.beta_hat_sign), format_real(r.settle_time)});
            if (with_dh) cells.push_back(r.hausdorff ? format_real(*r.hausdorff) : nan);
        } else {
            cells.insert(cells.end(), {"", nan, nan, "0", nan, "0", nan});
            if (with_dh) cells.push_back(nan);
        }
        cells.push_back(sanitize(r.error));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::size_t sweep_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QUALIDETECT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) n = std::min(n, static_cast<std::size_t>(v));
    }
    return n;
}

SweepResult run_sweep(const Config& raw, std::size_t threads) {
    const Config cfg = expand_preset(raw);
    const ExperimentConfig base = resolve(cfg);
    if (!base.sweep) throw ConfigError("run_sweep: no sweep.param");

    SweepResult result;
    result.param = base.sweep->param;
    result.rows.resize(base.sweep->values.size());

    std::vector<Config> row_cfgs;
    for (const auto& v : base.sweep->values) {
        Config c = cfg;
        c.erase("sweep.param");
        c.erase("sweep.values");
        if (result.param == "beta_offset") c.erase("beta");
        if (result.param == "beta") c.erase("beta_offset");
        c.set(result.param, v);
        row_cfgs.push_back(std::move(c));
    }

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < row_cfgs.size(); i = next++) {
            SweepRow& row = result.rows[i];
            row.value = base.sweep->values[i];
            try {
                const RunResult rr = run_single(resolve(row_cfgs[i]));
                row.report = rr.report;
                row.settle_time = rr.settle_time;
                row.hausdorff = rr.hausdorff;
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };

    if (threads == 0) threads = sweep_threads();
    threads = std::min(threads, row_cfgs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (std::none_of(result.rows.begin(), result.rows.end(), [](const SweepRow& r) { return r.ok; })) {
        throw AnalysisError("every sweep row failed; first error: " + result.rows.front().error);
    }
    return result;
}

// -----------------------------------------------------------------------------

std::vector<std::string> run_config(const Config& raw, const std::string& out_dir) {
    const Config cfg = expand_preset(raw);
    const ExperimentConfig ec = resolve(cfg);
    ensure_dir(out_dir);
    std::vector<std::string> written;

    if (ec.sweep) {
        const SweepResult sr = run_sweep(cfg);
        const std::string csv = ec.name + "_sweep.csv";
        emit_csv(sr.to_table(), join(out_dir, csv));
        written.push_back(join(out_dir, csv));
        write_text(join(out_dir, ec.name + "_sweep.gp"), sweep_script(csv, sr.param));
        written.push_back(join(out_dir, ec.name + "_sweep.gp"));
    } else {
        const RunResult rr = run_single(ec);
        const std::string csv = ec.name + ".csv";
        emit_csv(rr.trajectory, join(out_dir, csv));
        written.push_back(join(out_dir, csv));

        std::string report = report_line(rr.report) + "\n";
        if (rr.hausdorff) report += "hausdorff=" + format_real(*rr.hausdorff) + "\n";
        for (const auto& w : ec.warnings) report += "warning: " + w + "\n";
        report += "\n# resolved config\n" + cfg.to_text();
        write_text(join(out_dir, ec.name + "_report.txt"), report);
        written.push_back(join(out_dir, ec.name + "_report.txt"));

        write_text(join(out_dir, ec.name + ".gp"), trajectory_script(csv, rr.trajectory));
        written.push_back(join(out_dir, ec.name + ".gp"));
    }
    return written;
}

std::vector<std::string> run_preset(const std::string& name, const std::string& out_dir) {
    std::vector<std::string> written;
    for (const auto& job : preset_jobs(name)) {
        const auto files = run_config(job.config, out_dir);
        written.insert(written.end(), files.begin(), files.end());
    }
    return written;
}

std::vector<std::string> write_manifold(const Config& raw, const std::string& out_dir) {
    const ExperimentConfig ec = resolve(raw);
    const PlanarParams& p = ec.planar;
    ensure_dir(out_dir);
    std::vector<std::string> written;

    const auto [lo, hi] = p.sigmoid.range();
    const double pad = 1e-3 * (hi - lo);
    const EstimateSample est = estimate_critical_manifold(p, lo + pad, hi - pad, 1001);
    const ManifoldSample man = sample_critical_manifold(p, lo + pad, hi - pad, 1001);
    Table m;
    m.header = {"x_f", "x_s", "beta_hat_star", "branch"};
    for (std::size_t i = 0; i < est.x_f.size(); ++i) {
        m.rows.push_back({format_real(est.x_f[i]), format_real(est.x_s[i]), format_real(est.beta_hat[i]),
                          to_string(man.branch[i])});
    }
    emit_csv(m, join(out_dir, "manifold.csv"));
    written.push_back(join(out_dir, "manifold.csv"));

    const FoldPair f = fold_points(p);
    Table ft;
    ft.header = {"exists", "x_fold_minus", "x_s_fold_minus", "x_fold_plus", "x_s_fold_plus"};
    ft.rows.push_back({f.exists ? "1" : "0", format_real(f.x_fold_minus), format_real(f.x_s_fold_minus),
                       format_real(f.x_fold_plus), format_real(f.x_s_fold_plus)});
    emit_csv(ft, join(out_dir, "folds.csv"));
    written.push_back(join(out_dir, "folds.csv"));

    const double bc = beta_c(p.sigmoid);
    if (p.beta > bc && p.beta < bc + 1.0) {
        const auto orbit = singular_orbit(p, 500);
        Table o;
        o.header = {"x_f", "x_s"};
        for (const auto& pt : orbit.points) o.rows.push_back({format_real(pt[0]), format_real(pt[1])});
        emit_csv(o, join(out_dir, "singular_orbit.csv"));
        written.push_back(join(out_dir, "singular_orbit.csv"));
    }
    return written;
}

}  // namespace qualidetect
