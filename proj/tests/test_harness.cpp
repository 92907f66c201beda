#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "qualidetect/errors.hpp"
#include "qualidetect/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace qualidetect;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qualidetect_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config short_cascade(double beta) {
    Config c;
    c.set("model", "cascade");
    c.set("beta", format_real(beta));
    c.set("solver.t_end", "300");
    return c;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(QD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// -----------------------------------------------------------------------------
// Config files
// -----------------------------------------------------------------------------

TEST_CASE("config parsing", "[harness][config]") {
    const auto c = Config::parse("# header\nmodel = planar\n\n beta=1.2  # trailing\nu = -0.01\nbeta = 1.3\n");
    CHECK(c.get_string("model", "") == "planar");
    CHECK(c.get_double("beta", 0.0) == 1.3);
    CHECK(c.get_double("u", 0.0) == -0.01);
    CHECK(c.get_double("eps", 0.5) == 0.5);
    CHECK_FALSE(c.has("header"));
    CHECK(Config::parse(c.to_text()) == c);
}

TEST_CASE("config syntax errors", "[harness][config]") {
    CHECK_THROWS_AS(Config::parse("model planar\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse(" = 3\n"), ConfigError);
    Config c;
    CHECK_THROWS_AS(c.apply_override("beta"), ConfigError);
    c.apply_override("beta=2");
    CHECK(c.get_double("beta", 0.0) == 2.0);
    c.set("n", "2.5");
    CHECK_THROWS_AS(c.get_size("n", 0), ConfigError);
    c.set("b", "maybe");
    CHECK_THROWS_AS(c.get_bool("b", false), ConfigError);
    c.set("x", "1e400");
    CHECK_THROWS_AS(c.get_double("x", 0.0), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/qualidetect.cfg"), ConfigError);
    CHECK(parse_double_list("1, 2,3", "v") == std::vector<double>{1, 2, 3});
}

TEST_CASE("resolve applies defaults and rejects bad keys", "[harness][config]") {
    Config c;
    auto ec = resolve(c);
    CHECK(ec.model == ModelKind::Cascade);
    CHECK(ec.solver.method == Method::RK4Fixed);
    CHECK(ec.solver.dt == 0.01);
    CHECK(ec.solver.t_end == 2000.0);

    c.set("eps", "0.0002");
    CHECK(resolve(c).solver.dt == Approx(0.002));
    c.set("eps", "0.5");
    CHECK(resolve(c).warnings.size() == 1);

    c = Config{};
    c.set("model", "hh");
    ec = resolve(c);
    CHECK(ec.solver.method == Method::DormandPrince45);
    CHECK(ec.solver.t_end == 500.0);

    c = Config{};
    c.set("betta", "1");
    CHECK_THROWS_AS(resolve(c), ConfigError);
    c = Config{};
    c.set("beta", "1");
    c.set("beta_offset", "0.2");
    CHECK_THROWS_AS(resolve(c), ConfigError);
    c = Config{};
    c.set("solver.t_end", "10");
    c.set("solver.eps_t_end", "10");
    CHECK_THROWS_AS(resolve(c), ConfigError);
    c = Config{};
    c.set("model", "fitzhugh");
    CHECK_THROWS_AS(resolve(c), ConfigError);
    c = Config{};
    c.set("sweep.param", "beta");
    c.set("sweep.values", "1,3,2");
    CHECK_THROWS_AS(resolve(c), ConfigError);
}

TEST_CASE("sigmoid keys", "[harness][config]") {
    Config c;
    c.set("sigmoid", "sum");
    c.set("sigmoid.component.0", "tanh");
    c.set("sigmoid.component.1", "logistic");
    c.set("sigmoid.component.1.c2", "2");
    c.set("beta_offset", "0.2");
    const auto ec = resolve(c);
    CHECK(ec.planar.sigmoid.components().size() == 2);
    CHECK(ec.planar.beta == Approx(beta_c(ec.planar.sigmoid) + 0.2).epsilon(1e-15));
    CHECK(beta_c(ec.planar.sigmoid) == Approx(1.0 / 1.5).epsilon(1e-12));

    Config g;
    g.set("sigmoid", "gompertz");
    g.set("sigmoid.c2", "1");
    CHECK_THROWS_AS(resolve(g), ConfigError);
    g.set("sigmoid", "arctan");
    g.erase("sigmoid.c2");
    CHECK_THROWS_AS(resolve(g), ConfigError);
}

// -----------------------------------------------------------------------------
// Presets
// -----------------------------------------------------------------------------

TEST_CASE("preset expansion is idempotent", "[harness][preset]") {
    for (const auto& name : preset_names()) {
        for (const auto& job : preset_jobs(name)) {
            CHECK(expand_preset(job.config) == job.config);
            CHECK(expand_preset(expand_preset(job.config)) == job.config);
            CHECK_NOTHROW(resolve(job.config));
        }
        Config c;
        c.set("preset", name);
        CHECK(expand_preset(expand_preset(c)) == expand_preset(c));
    }
}

TEST_CASE("explicit keys win over the preset", "[harness][preset]") {
    Config c;
    c.set("preset", "fig3");
    c.set("solver.t_end", "50");
    c.set("k", "2");
    const auto e = expand_preset(c);
    CHECK(e.get_string("solver.t_end", "") == "50");
    CHECK(e.get_string("k", "") == "2");
    CHECK(e.has("schedule"));

    Config s;
    s.set("preset", "eps_scaling");
    s.set("solver.t_end", "100");
    CHECK_NOTHROW(resolve(s));
    CHECK(resolve(s).solver.t_end == 100.0);
}

TEST_CASE("preset catalogue", "[harness][preset]") {
    CHECK(preset_names() == std::vector<std::string>{"fig2", "fig3", "fig4", "fig5", "fig7", "eps_scaling"});
    CHECK(preset_jobs("fig2").size() == 6);
    CHECK(preset_jobs("fig4").size() == 3);
    CHECK(preset_jobs("fig7").size() == 3);
    CHECK_THROWS_AS(preset_jobs("fig9"), ConfigError);
    Config c;
    c.set("preset", "fig9");
    CHECK_THROWS_AS(expand_preset(c), ConfigError);

    const auto fig7 = resolve(preset_jobs("fig7")[1].config);
    CHECK(fig7.model == ModelKind::HH);
    CHECK(fig7.hh.i_app == 20.0);
    REQUIRE(fig7.sweep.has_value());
    CHECK(fig7.sweep->values == std::vector<std::string>{"23", "25", "27", "29", "31"});

    const auto eps = resolve(preset_jobs("eps_scaling")[0].config);
    CHECK(eps.hausdorff);
    CHECK(eps.sweep->values.size() == 4);
}

// -----------------------------------------------------------------------------
// CSV
// -----------------------------------------------------------------------------

TEST_CASE("trajectory CSV", "[harness][csv]") {
    Config c;
    c.set("schedule", "0:20:0.5:0;20:40:0.5:0.01");
    c.set("solver.t_end", "40");
    const auto rr = simulate(resolve(c));
    const std::string text = to_csv(rr);
    CHECK(text.rfind("t,x_f,x_s,beta_hat,beta\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');

    const Trajectory back = parse_trajectory_csv(text);
    REQUIRE(back.size() == rr.size());
    CHECK(back.times() == rr.times());
    for (const auto& ch : rr.channel_names()) CHECK(back.channel(ch) == rr.channel(ch));
    CHECK(to_csv(back) == text);

    CHECK(to_csv(Trajectory({"x_f", "x_s"})) == "t,x_f,x_s\n");
    CHECK_THROWS_AS(parse_trajectory_csv("t,x\n0,abc\n"), AnalysisError);
}

TEST_CASE("format_real round-trips", "[harness][csv][property]") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0)}) {
        CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("write_text reports the path", "[harness][csv]") {
    try {
        write_text("/nonexistent/dir/file.csv", "x");
        FAIL("expected IOError");
    } catch (const IOError& e) {
        CHECK(std::strstr(e.what(), "/nonexistent/dir/file.csv") != nullptr);
    }
}

// -----------------------------------------------------------------------------
// Runs and sweeps
// -----------------------------------------------------------------------------

TEST_CASE("singleton sweep equals the single run", "[harness][sweep]") {
    Config single = short_cascade(0.5);
    const auto rr = run_single(resolve(single));
    Config sweep = single;
    sweep.erase("beta");
    sweep.set("sweep.param", "beta");
    sweep.set("sweep.values", "0.5");
    const auto sr = run_sweep(sweep, 1);
    REQUIRE(sr.rows.size() == 1);
    REQUIRE(sr.rows[0].ok);
    CHECK(sr.rows[0].report.beta_hat_summary == rr.report.beta_hat_summary);
    CHECK(sr.rows[0].report.amplitude == rr.report.amplitude);
    CHECK(sr.rows[0].settle_time == rr.settle_time);
}

TEST_CASE("larger detector gain settles no later", "[harness][sweep]") {
    const double x = oracle::fixed_point(oracle::tanh_s, 0.5, -0.01, -1.0, 1.0);
    Config c;
    c.set("beta", "0.5");
    c.set("init.x_f", format_real(x));
    c.set("init.x_s", format_real(x));
    c.set("solver.t_end", "20000");
    c.set("sweep.param", "k");
    c.set("sweep.values", "1,5,25");
    const auto sr = run_sweep(c, 1);
    REQUIRE(sr.rows.size() == 3);
    for (const auto& r : sr.rows) REQUIRE(r.ok);
    CHECK(sr.rows[1].settle_time <= sr.rows[0].settle_time);
    CHECK(sr.rows[2].settle_time <= sr.rows[1].settle_time);
}

TEST_CASE("failed rows keep their error", "[harness][sweep]") {
    Config c = short_cascade(0.5);
    c.set("sweep.param", "eps");
    c.set("sweep.values", "-0.001,0.001");
    const auto sr = run_sweep(c, 1);
    CHECK_FALSE(sr.rows[0].ok);
    CHECK_FALSE(sr.rows[0].error.empty());
    CHECK(sr.rows[1].ok);
    const Table t = sr.to_table();
    CHECK(t.rows[0][1] == "failed");
    CHECK(t.rows[1][1] == "ok");
    CHECK(t.header.front() == "eps");
    CHECK(t.header.back() == "error");

    c.set("sweep.values", "-0.002,-0.001");
    CHECK_THROWS_AS(run_sweep(c, 1), AnalysisError);
}

TEST_CASE("sweep results do not depend on the worker count", "[harness][sweep][property]") {
    Config c = short_cascade(0.5);
    c.erase("beta");
    c.set("sweep.param", "beta_offset");
    c.set("sweep.values", "-0.4,-0.2,0,0.2,0.4");
    const auto a = to_csv(run_sweep(c, 1).to_table());
    const auto b = to_csv(run_sweep(c, 3).to_table());
    CHECK(a == b);
}

TEST_CASE("diverged single runs throw", "[harness]") {
    Config c = short_cascade(0.5);
    c.set("init.x_f", "1e7");
    CHECK_THROWS_AS(run_single(resolve(c)), IntegrationError);
}

TEST_CASE("run_config writes deterministic artifacts", "[harness][io]") {
    Config c = short_cascade(1.2);
    c.set("name", "probe");
    c.set("analysis.lowpass_tau", "5");
    const auto d1 = scratch("run1");
    const auto d2 = scratch("run2");
    const auto files = run_config(c, d1.string());
    run_config(c, d2.string());
    REQUIRE(files.size() == 3);
    for (const auto& f : files) {
        const auto name = fs::path(f).filename();
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    const auto tr = read_csv((d1 / "probe.csv").string());
    CHECK(tr.has_channel("beta_hat_lp"));
    CHECK(slurp(d1 / "probe_report.txt").find("label=") == 0);
}

TEST_CASE("manifold artifacts", "[harness][io]") {
    Config c;
    c.set("beta", "1.2");
    const auto d = scratch("manifold");
    const auto files = write_manifold(c, d.string());
    CHECK(files.size() == 3);
    const auto folds = slurp(d / "folds.csv");
    CHECK(folds.find("0.40824829") != std::string::npos);
    c.set("beta", "0.5");
    CHECK(write_manifold(c, scratch("manifold_rest").string()).size() == 2);
}

// -----------------------------------------------------------------------------
// Command line
// -----------------------------------------------------------------------------

TEST_CASE("command-line exit codes", "[harness][cli]") {
    const auto d = scratch("cli");
    {
        std::ofstream cfg(d / "ok.cfg");
        cfg << "model = cascade\nbeta = 0.5\nsolver.t_end = 100\nname = cli\n";
        std::ofstream bad(d / "bad.cfg");
        bad << "betta = 1\n";
        std::ofstream diverge(d / "diverge.cfg");
        diverge << "solver.t_end = 100\ninit.x_f = 1e7\n";
    }
    CHECK(cli("run --config " + (d / "ok.cfg").string() + " --out " + d.string()) == 0);
    CHECK(fs::exists(d / "cli.csv"));
    CHECK(cli("analyze " + (d / "cli.csv").string() + " --windows " + (d / "w.csv").string() + " --pe-window 20") == 0);
    CHECK(fs::exists(d / "w.csv"));
    CHECK(cli("run --config " + (d / "ok.cfg").string() + " --set beta=1.2 --set name=cli2 --out " + d.string()) == 0);
    CHECK(cli("manifold --config " + (d / "ok.cfg").string() + " --set beta=1.2 --out " + d.string()) == 0);
    CHECK(cli("--help") == 0);
    CHECK(cli("") == 1);
    CHECK(cli("frobnicate") == 1);
    CHECK(cli("run --config " + (d / "bad.cfg").string()) == 1);
    CHECK(cli("preset fig9 --out " + d.string()) == 1);
    CHECK(cli("run --config " + (d / "diverge.cfg").string() + " --out " + d.string()) == 2);
    CHECK(cli("analyze " + (d / "missing.csv").string()) == 2);
}
