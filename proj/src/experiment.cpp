#include "gpeot/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace gpeot::experiment {

FrameEstimate snapshot(const filter::TrackerState& state, const tracking::StepReport& report) {
    FrameEstimate e;
    e.t = state.t;
    e.center = state.center();
    e.velocity = state.velocity();
    e.orientation = state.orientation();
    e.rate = state.rate();
    const Eigen::Index n = state.dim() - motion::kKinematicDim;
    e.extent = state.x.tail(n);
    e.extent_std = state.P.diagonal().tail(n).cwiseMax(0.0).cwiseSqrt();
    e.report = report;
    return e;
}

RunEstimates run_tracker(const tracking::TrackerConfig& cfg, const meas::ExtentModels& models,
                         const std::vector<meas::MeasurementFrame>& frames) {
    RunEstimates out;
    if (frames.empty()) return out;
    out.reserve(frames.size());
    filter::TrackerState state = tracking::initial_state(cfg, models, frames.front());
    for (const auto& frame : frames) {
        tracking::StepReport rep;
        state = tracking::step(state, frame, cfg, models, &rep);
        out.push_back(snapshot(state, rep));
    }
    return out;
}

void EvalSettings::validate() const {
    if (!(cell_fraction > 0.0)) throw std::invalid_argument("eval.cell_fraction must be > 0");
    if (iou_stride < 1) throw std::invalid_argument("eval.iou_stride must be >= 1");
    if (contour_samples < 3) throw std::invalid_argument("eval.contour_samples must be >= 3");
}

double frame_iou(const sim::ShapeSpec& shape, const sim::TruthSample& truth,
                 const meas::ExtentModels& models, const FrameEstimate& est, double cell_size,
                 int contour_samples) {
    const geometry::Pose est_pose{est.center, est.orientation};
    if (models.kind == meas::TrackerKind::gpeot) {
        const eval::TriangleMesh mesh = eval::radial_to_mesh(est.extent, models.models.front().grid(), est_pose);
        return eval::iou(shape, truth.pose(), mesh, cell_size);
    }
    const eval::ProjectionContours contours = eval::contours_from_extent(models, est.extent, contour_samples);
    return eval::iou(shape, truth.pose(), contours, est_pose, cell_size);
}

eval::RunEvaluation evaluate_run(const sim::ShapeSpec& shape, const sim::GroundTruth& truth,
                                 const meas::ExtentModels& models, const RunEstimates& estimates,
                                 const EvalSettings& settings) {
    settings.validate();
    if (estimates.size() != truth.samples.size()) {
        throw std::invalid_argument("evaluate_run: estimate and truth lengths differ");
    }
    const double cell = settings.cell_fraction * (shape.bounds_max() - shape.bounds_min()).norm();
    eval::RunEvaluation r;
    std::vector<Vec3> v_est, v_true, w_est, w_true;
    std::vector<UnitQuaternion> q_est, q_true;
    double steady_sum = 0.0;
    int steady_n = 0;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        const FrameEstimate& e = estimates[k];
        const sim::TruthSample& s = truth.samples[k];
        r.t.push_back(s.t);
        double value = std::numeric_limits<double>::quiet_NaN();
        if (k % static_cast<std::size_t>(settings.iou_stride) == 0) {
            value = frame_iou(shape, s, models, e, cell, settings.contour_samples);
            if (s.t >= settings.steady_state_start - 1e-9) {
                steady_sum += value;
                ++steady_n;
            }
        }
        r.iou.push_back(value);
        v_est.push_back(e.velocity);
        v_true.push_back(s.velocity);
        q_est.push_back(e.orientation);
        q_true.push_back(s.orientation);
        if (s.t >= settings.rate_error_start - 1e-9) {
            w_est.push_back(e.rate);
            w_true.push_back(s.rate);
        }
    }
    if (!estimates.empty()) r.velocity_rmse = eval::velocity_rmse(v_est, v_true);
    const eval::OrientationErrors oe = eval::orientation_errors(q_est, q_true, w_est, w_true);
    r.orientation_error = oe.angle;
    r.rate_rmse = oe.rate_rmse;
    r.steady_iou = steady_n > 0 ? steady_sum / steady_n : std::numeric_limits<double>::quiet_NaN();
    return r;
}

void init_prior_from_truth(tracking::TrackerConfig& cfg, const sim::TruthSample& t0) {
    cfg.prior.center = t0.center;
    cfg.prior.velocity = t0.velocity;
    cfg.prior.orientation = t0.orientation;
}

void parallel_for_runs(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.mc_runs < 1) throw std::invalid_argument("mc_runs must be >= 1");
    cfg.scenario.validate();
    cfg.eval.validate();
    tracking::TrackerConfig tracker_cfg = cfg.tracker;
    tracker_cfg.validate();

    const sim::GroundTruth truth = sim::generate_truth(cfg.scenario.trajectory);
    if (cfg.init_from_truth) init_prior_from_truth(tracker_cfg, truth.samples.front());
    const meas::ExtentModels models = tracking::build_models(tracker_cfg);

    ExperimentResult result;
    result.report.runs.resize(static_cast<std::size_t>(cfg.mc_runs));
    if (cfg.keep_estimates) result.estimates.resize(static_cast<std::size_t>(cfg.mc_runs));
    std::vector<double> filter_seconds(static_cast<std::size_t>(cfg.mc_runs), 0.0);

    parallel_for_runs(cfg.mc_runs, cfg.threads, [&](int run) {
        const auto frames = sim::simulate_run(cfg.scenario, truth, static_cast<std::uint64_t>(run));
        const auto t0 = std::chrono::steady_clock::now();
        RunEstimates est = run_tracker(tracker_cfg, models, frames);
        filter_seconds[static_cast<std::size_t>(run)] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.report.runs[static_cast<std::size_t>(run)] =
            evaluate_run(cfg.scenario.shape, truth, models, est, cfg.eval);
        if (cfg.keep_estimates) result.estimates[static_cast<std::size_t>(run)] = std::move(est);
    });

    result.report.summarize();
    double total = 0.0;
    for (const double s : filter_seconds) total += s;
    result.seconds_per_update = total / (static_cast<double>(cfg.mc_runs) * static_cast<double>(truth.samples.size()));
    return result;
}

}  // namespace gpeot::experiment
