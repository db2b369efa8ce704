#pragma once

#include "gpeot/io.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace gpeot::cli {

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> tracker;
    std::optional<int> mc_runs;
};

/// Config file (or built-in defaults) with the overrides applied, validated.
io::RunConfig resolve_config(const Overrides& overrides);

/// Output layout below the run's output directory.
struct Layout {
    io::fs::path root;

    [[nodiscard]] io::fs::path config() const { return root / "config.json"; }
    [[nodiscard]] io::fs::path scenario() const { return root / "scenario.json"; }
    [[nodiscard]] io::fs::path truth() const { return root / "truth.csv"; }
    [[nodiscard]] io::fs::path measurements(int run) const;
    [[nodiscard]] io::fs::path estimates(const std::string& tracker, int run) const;
    [[nodiscard]] io::fs::path mesh(const std::string& tracker, int run) const;
    [[nodiscard]] io::fs::path run_metrics(const std::string& tracker, int run) const;
    [[nodiscard]] io::fs::path iou(const std::string& tracker) const;
    [[nodiscard]] io::fs::path summary_csv(const std::string& tracker) const;
    [[nodiscard]] io::fs::path summary_json(const std::string& tracker) const;
};

/// Writes the scenario, the truth and one measurement CSV per Monte-Carlo run.
void cmd_simulate(const io::RunConfig& cfg, std::ostream& log);
/// Filters every run's measurements; writes per-frame estimates and the final extent as OBJ.
void cmd_track(const io::RunConfig& cfg, std::ostream& log);
/// Scores the estimates against the truth; writes per-frame and summary reports.
eval::EvaluationReport cmd_evaluate(const io::RunConfig& cfg, std::ostream& log);
eval::EvaluationReport cmd_run_all(const io::RunConfig& cfg, std::ostream& log);

}  // namespace gpeot::cli
