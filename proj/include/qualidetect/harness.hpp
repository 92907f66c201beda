#pragma once

#include "qualidetect/config.hpp"
#include "qualidetect/csv.hpp"
#include "qualidetect/models.hpp"
#include "qualidetect/signal.hpp"
#include "qualidetect/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qualidetect {

enum class ModelKind { Planar, Cascade, HH };

const char* to_string(ModelKind m);

struct SweepSpec {
    std::string param;
    std::vector<std::string> values;  ///< as written, so each row config is exact
};

/// Fully resolved experiment.
struct ExperimentConfig {
    ModelKind model = ModelKind::Cascade;
    PlanarParams planar;
    DetectorParams detector;
    HHParams hh;
    NoiseSpec noise;
    IntegratorConfig solver;
    CascadeState init;
    double hh_v0 = -65.0;
    BetaSchedule schedule;  ///< empty: constant beta
    ActivityOptions activity;
    double lowpass_tau = 0.0;  ///< > 0 adds a low-passed detector channel
    bool hausdorff = false;    ///< distance of the last period to the singular orbit
    std::optional<SweepSpec> sweep;
    std::string preset;
    std::string name = "run";
    std::vector<std::string> warnings;
};

// -----------------------------------------------------------------------------
// Presets
// -----------------------------------------------------------------------------

std::vector<std::string> preset_names();

/// Fills every key of the named preset that `cfg` does not set; a no-op without
/// a `preset` key. Expanding twice gives the same config.
Config expand_preset(const Config& cfg);

struct PresetJob {
    std::string name;
    Config config;  ///< already expanded
};

/// Throws ConfigError for an unknown preset.
std::vector<PresetJob> preset_jobs(const std::string& name);

/// Expands the preset (if any) and builds the experiment. Unknown keys are errors.
ExperimentConfig resolve(const Config& cfg);

// -----------------------------------------------------------------------------
// Running
// -----------------------------------------------------------------------------

Trajectory simulate(const ExperimentConfig& ec);

struct RunResult {
    Trajectory trajectory;
    ActivityReport report;
    double settle_time = 0.0;  ///< detector within 1e-2 of its final value from here on
    std::optional<double> hausdorff;
};

/// Simulates, adds derived channels and analyzes. A diverged run throws.
RunResult run_single(const ExperimentConfig& ec);

std::string report_line(const ActivityReport& r);

struct SweepRow {
    std::string value;
    bool ok = false;
    std::string error;
    ActivityReport report;
    double settle_time = 0.0;
    std::optional<double> hausdorff;
};

struct SweepResult {
    std::string param;
    std::vector<SweepRow> rows;
    Table to_table() const;
};

/// Worker count from QUALIDETECT_THREADS (default: hardware concurrency).
std::size_t sweep_threads();

/// One simulate+analyze per sweep value, in axis order. Failed rows keep their
/// error text; throws when every row fails.
SweepResult run_sweep(const Config& cfg, std::size_t threads = 0);

/// Runs `cfg` (single run or sweep) and writes its artifacts to `out_dir`.
/// Returns the written paths.
std::vector<std::string> run_config(const Config& cfg, const std::string& out_dir);

/// Runs every job of a preset into `out_dir`, plus gnuplot scripts.
std::vector<std::string> run_preset(const std::string& name, const std::string& out_dir);

/// Critical manifold, estimate manifold, folds and (when defined) singular orbit CSVs.
std::vector<std::string> write_manifold(const Config& cfg, const std::string& out_dir);

}  // namespace qualidetect
