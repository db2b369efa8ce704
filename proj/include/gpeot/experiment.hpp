#pragma once

#include "gpeot/eval.hpp"
#include "gpeot/sim.hpp"
#include "gpeot/tracker.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace gpeot::experiment {

using geometry::UnitQuaternion;
using geometry::Vec3;

struct FrameEstimate {
    double t = 0.0;
    Vec3 center = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    UnitQuaternion orientation;
    Vec3 rate = Vec3::Zero();
    Eigen::VectorXd extent;
    Eigen::VectorXd extent_std;
    tracking::StepReport report;
};

using RunEstimates = std::vector<FrameEstimate>;

FrameEstimate snapshot(const filter::TrackerState& state, const tracking::StepReport& report);

/// Filters a frame sequence from scratch; the first frame initializes the state.
RunEstimates run_tracker(const tracking::TrackerConfig& cfg, const meas::ExtentModels& models,
                         const std::vector<meas::MeasurementFrame>& frames);

struct EvalSettings {
    double cell_fraction = 0.01;        ///< voxel edge relative to the true shape's box diagonal
    int iou_stride = 1;                 ///< evaluate IOU every n-th frame
    double steady_state_start = 5.0;    ///< [s] start of the steady-state IOU window
    double rate_error_start = 2.0;      ///< [s] start of the angular-rate error window
    int contour_samples = 720;          ///< contour resolution for projection carving

    void validate() const;
};

/// IOU per evaluated frame, velocity RMSE over all frames, angular-rate RMSE and steady
/// IOU over their windows.
eval::RunEvaluation evaluate_run(const sim::ShapeSpec& shape, const sim::GroundTruth& truth,
                                 const meas::ExtentModels& models, const RunEstimates& estimates,
                                 const EvalSettings& settings);

/// IOU of one estimate against the posed true shape.
double frame_iou(const sim::ShapeSpec& shape, const sim::TruthSample& truth,
                 const meas::ExtentModels& models, const FrameEstimate& est, double cell_size,
                 int contour_samples);

/// Copies the truth at t0 (center, velocity, attitude) into the tracker's initial prior.
void init_prior_from_truth(tracking::TrackerConfig& cfg, const sim::TruthSample& t0);

struct ExperimentConfig {
    sim::Scenario scenario;
    tracking::TrackerConfig tracker = tracking::TrackerConfig::gpeot_defaults();
    EvalSettings eval;
    int mc_runs = 1;
    bool init_from_truth = true;
    int threads = 0;  ///< 0: one per hardware thread
    bool keep_estimates = false;
};

struct ExperimentResult {
    eval::EvaluationReport report;
    std::vector<RunEstimates> estimates;  ///< filled when keep_estimates is set
    double seconds_per_update = 0.0;
};

/// Runs are independent; each uses its own measurement streams, so results do not depend
/// on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs fn(run) for run in [0, n) on up to `threads` worker threads.
void parallel_for_runs(int n, int threads, const std::function<void(int)>& fn);

}  // namespace gpeot::experiment
