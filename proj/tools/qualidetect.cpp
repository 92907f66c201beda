// qualidetect command-line front end.
//
//   qualidetect run --config FILE [--set key=value]... [--out DIR]
//   qualidetect preset NAME --out DIR
//   qualidetect analyze FILE.csv [--windows OUT.csv] [--pe-window T] [--settle F]
//   qualidetect manifold --config FILE [--set key=value]... --out DIR
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include "qualidetect/config.hpp"
#include "qualidetect/csv.hpp"
#include "qualidetect/errors.hpp"
#include "qualidetect/harness.hpp"
#include "qualidetect/signal.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

using namespace qualidetect;

namespace {

Config load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
    Config cfg = path.empty() ? Config{} : Config::load(path);
    for (const auto& s : sets) cfg.apply_override(s);
    return cfg;
}

void print_written(const std::vector<std::string>& files) {
    for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qualitative detector for slow-fast systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = ".";

    auto* run = app.add_subcommand("run", "simulate and analyze one configuration (or its sweep)");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--set", sets, "override, key=value");
    run->add_option("--out", out_dir, "output directory");

    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "run a named experiment preset");
    preset->add_option("name", preset_name, "fig2|fig3|fig4|fig5|fig7|eps_scaling")->required();
    preset->add_option("--out", out_dir, "output directory")->required();

    std::string csv_path;
    std::string windows_path;
    double pe_window = 100.0;
    double settle = 0.3;
    auto* analyze = app.add_subcommand("analyze", "classify a trajectory CSV");
    analyze->add_option("file", csv_path, "trajectory CSV")->required();
    analyze->add_option("--windows", windows_path, "write per-window excitation energies here");
    analyze->add_option("--pe-window", pe_window, "excitation window length");
    analyze->add_option("--settle", settle, "analysis window as a fraction of the run");

    auto* manifold = app.add_subcommand("manifold", "write critical manifold, folds and singular orbit");
    manifold->add_option("--config", config_path, "config file")->required();
    manifold->add_option("--set", sets, "override, key=value");
    manifold->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            print_written(run_config(load_with_overrides(config_path, sets), out_dir));
        } else if (*preset) {
            print_written(run_preset(preset_name, out_dir));
        } else if (*analyze) {
            const Trajectory traj = read_csv(csv_path);
            ActivityOptions opts;
            opts.settle_fraction = settle;
            std::cout << report_line(classify_activity(traj, opts)) << '\n';
            if (!windows_path.empty()) {
                const std::string ch = traj.has_channel("x_f") ? "x_f" : "V";
                const PEReport pe = measure_pe(traj.channel(ch), traj.sample_interval(), pe_window, 0.0, true);
                Table t;
                t.header = {"window_start", "energy"};
                for (std::size_t i = 0; i < pe.window_start.size(); ++i) {
                    t.rows.push_back({format_real(traj.times().front() + pe.window_start[i]),
                                      format_real(pe.window_energy[i])});
                }
                emit_csv(t, windows_path);
                std::cout << "pe_window=" << format_real(pe.T) << " mu_min=" << format_real(pe.mu_min) << '\n';
            }
        } else if (*manifold) {
            print_written(write_manifold(load_with_overrides(config_path, sets), out_dir));
        }
    } catch (const ConfigError& e) {
        std::cerr << "qualidetect: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "qualidetect: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
