#pragma once

#include "gpeot/eval.hpp"
#include "gpeot/experiment.hpp"
#include "gpeot/sim.hpp"
#include "gpeot/tracker.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpeot::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Invalid configuration; the message lists every offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::vector<std::string>& problems);
    [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    sim::Scenario scenario;
    tracking::TrackerConfig tracker = tracking::TrackerConfig::gpeot_defaults();
    experiment::EvalSettings eval;
    int mc_runs = 1;
    std::string out_dir = "out";
    bool init_from_truth = true;
    int threads = 0;

    /// Every problem found, empty when valid.
    [[nodiscard]] std::vector<std::string> problems() const;
    /// Throws ConfigError when problems() is non-empty.
    void validate() const;
};

Json to_json(const sim::Scenario& scenario);
sim::Scenario scenario_from_json(const Json& j);

Json to_json(const RunConfig& cfg);
/// Fields absent from `j` keep the defaults of the selected tracker. A "scenario_path"
/// entry is resolved relative to base_dir.
RunConfig run_config_from_json(const Json& j, const fs::path& base_dir = {});
RunConfig load_run_config(const fs::path& path);

Json read_json(const fs::path& path);
void write_json(const fs::path& path, const Json& j);

/// Columns t,x,y,z,point_id,frame_id. A frame without points is written as one row with
/// empty coordinates and point_id -1 so that its time survives the round trip.
void write_measurements_csv(const fs::path& path, const std::vector<meas::MeasurementFrame>& frames);
std::vector<meas::MeasurementFrame> read_measurements_csv(const fs::path& path,
                                                          const geometry::Mat3& noise_cov);

void write_truth_csv(const fs::path& path, const sim::GroundTruth& truth);
sim::GroundTruth read_truth_csv(const fs::path& path);

/// Per-frame state estimates: kinematics, orientation, extent coefficients and their stds.
void write_estimates_csv(const fs::path& path, const experiment::RunEstimates& estimates);
experiment::RunEstimates read_estimates_csv(const fs::path& path);

void write_obj(const fs::path& path, const eval::TriangleMesh& mesh);
/// Contours as closed polylines in the object frame.
void write_contours_obj(const fs::path& path, const eval::ProjectionContours& contours);

/// Columns frame,iou_mean,iou_std.
void write_iou_csv(const fs::path& path, const eval::EvaluationReport& report);
/// One row per run: run,steady_iou,velocity_rmse,rate_rmse.
void write_summary_csv(const fs::path& path, const eval::EvaluationReport& report);
Json summary_json(const eval::EvaluationReport& report);
/// Columns frame,t,iou,orientation_error.
void write_run_metrics_csv(const fs::path& path, const eval::RunEvaluation& run);

}  // namespace gpeot::io
