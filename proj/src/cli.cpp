#include "gpeot/cli.hpp"

#include <cstdio>
#include <mutex>
#include <sstream>

namespace gpeot::cli {

namespace {

std::string run_name(int run) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run_%03d", run);
    return buf;
}

std::string tracker_name(const io::RunConfig& cfg) { return std::string(meas::to_string(cfg.tracker.kind)); }

/// Frames of the scenario timeline without points, for prediction-only runs.
std::vector<meas::MeasurementFrame> empty_timeline(const sim::Scenario& s) {
    std::vector<meas::MeasurementFrame> frames;
    for (const auto& sample : sim::generate_truth(s.trajectory).samples) {
        meas::MeasurementFrame f;
        f.t = sample.t;
        f.noise_cov = s.sensor.noise_cov;
        frames.push_back(f);
    }
    return frames;
}

}  // namespace

io::fs::path Layout::measurements(int run) const { return root / "measurements" / (run_name(run) + ".csv"); }

io::fs::path Layout::estimates(const std::string& tracker, int run) const {
    return root / "estimates" / tracker / (run_name(run) + ".csv");
}

io::fs::path Layout::mesh(const std::string& tracker, int run) const {
    return root / "estimates" / tracker / (run_name(run) + ".obj");
}

io::fs::path Layout::run_metrics(const std::string& tracker, int run) const {
    return root / "metrics" / tracker / (run_name(run) + ".csv");
}

io::fs::path Layout::iou(const std::string& tracker) const { return root / ("iou_" + tracker + ".csv"); }

io::fs::path Layout::summary_csv(const std::string& tracker) const {
    return root / ("summary_" + tracker + ".csv");
}

io::fs::path Layout::summary_json(const std::string& tracker) const {
    return root / ("summary_" + tracker + ".json");
}

io::RunConfig resolve_config(const Overrides& o) {
    io::Json j = io::Json::object();
    io::fs::path base;
    if (o.config_path) {
        j = io::read_json(*o.config_path);
        base = io::fs::path(*o.config_path).parent_path();
    }
    if (o.tracker) j["tracker"] = *o.tracker;
    if (o.mc_runs) j["mc_runs"] = *o.mc_runs;
    if (o.seed) j["seed"] = *o.seed;
    if (o.out_dir) j["out"] = *o.out_dir;
    return io::run_config_from_json(j, base);
}

void cmd_simulate(const io::RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Layout out{cfg.out_dir};
    io::write_json(out.config(), io::to_json(cfg));
    io::write_json(out.scenario(), io::to_json(cfg.scenario));
    const sim::GroundTruth truth = sim::generate_truth(cfg.scenario.trajectory);
    io::write_truth_csv(out.truth(), truth);
    experiment::parallel_for_runs(cfg.mc_runs, cfg.threads, [&](int run) {
        io::write_measurements_csv(out.measurements(run),
                                   sim::simulate_run(cfg.scenario, truth, static_cast<std::uint64_t>(run)));
    });
    log << "simulate: " << cfg.mc_runs << " run(s), " << truth.samples.size() << " frames each -> "
        << out.root.string() << '\n';
}

void cmd_track(const io::RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Layout out{cfg.out_dir};
    const std::string name = tracker_name(cfg);
    tracking::TrackerConfig tracker_cfg = cfg.tracker;
    if (cfg.init_from_truth && io::fs::exists(out.truth())) {
        const sim::GroundTruth truth = io::read_truth_csv(out.truth());
        if (!truth.samples.empty()) experiment::init_prior_from_truth(tracker_cfg, truth.samples.front());
    }
    const meas::ExtentModels models = tracking::build_models(tracker_cfg);

    std::mutex log_mutex;
    experiment::parallel_for_runs(cfg.mc_runs, cfg.threads, [&](int run) {
        const io::fs::path in = out.measurements(run);
        if (!io::fs::exists(in)) throw io::ParseError("missing measurement file " + in.string());
        auto frames = io::read_measurements_csv(in, cfg.scenario.sensor.noise_cov);
        if (frames.empty()) frames = empty_timeline(cfg.scenario);
        const experiment::RunEstimates est = experiment::run_tracker(tracker_cfg, models, frames);

        std::ostringstream msgs;
        for (std::size_t k = 0; k < est.size(); ++k) {
            if (!est[k].report.error.empty()) {
                msgs << "track: run " << run << " frame " << k << ": " << est[k].report.error << '\n';
            }
        }
        io::write_estimates_csv(out.estimates(name, run), est);
        if (!est.empty()) {
            const auto& last = est.back();
            if (models.kind == meas::TrackerKind::gpeot) {
                io::write_obj(out.mesh(name, run),
                              eval::radial_to_mesh(last.extent, models.models.front().grid(),
                                                   geometry::Pose{last.center, last.orientation}));
            } else {
                io::write_contours_obj(out.mesh(name, run),
                                       eval::contours_from_extent(models, last.extent, cfg.eval.contour_samples));
            }
        }
        std::lock_guard<std::mutex> lock(log_mutex);
        log << msgs.str();
    });
    log << "track: " << name << ", " << cfg.mc_runs << " run(s), state dimension "
        << motion::kKinematicDim + models.extent_dim() << '\n';
}

eval::EvaluationReport cmd_evaluate(const io::RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Layout out{cfg.out_dir};
    const std::string name = tracker_name(cfg);
    if (!io::fs::exists(out.truth())) throw io::ParseError("missing truth file " + out.truth().string());
    const sim::GroundTruth truth = io::read_truth_csv(out.truth());
    const meas::ExtentModels models = tracking::build_models(cfg.tracker);

    eval::EvaluationReport report;
    report.runs.resize(static_cast<std::size_t>(cfg.mc_runs));
    experiment::parallel_for_runs(cfg.mc_runs, cfg.threads, [&](int run) {
        const io::fs::path in = out.estimates(name, run);
        if (!io::fs::exists(in)) throw io::ParseError("missing estimate file " + in.string());
        const auto est = io::read_estimates_csv(in);
        auto r = experiment::evaluate_run(cfg.scenario.shape, truth, models, est, cfg.eval);
        io::write_run_metrics_csv(out.run_metrics(name, run), r);
        report.runs[static_cast<std::size_t>(run)] = std::move(r);
    });
    report.summarize();
    io::write_iou_csv(out.iou(name), report);
    io::write_summary_csv(out.summary_csv(name), report);
    io::write_json(out.summary_json(name), io::summary_json(report));
    log << "evaluate: " << name << " steady IOU " << report.steady_iou_mean << " (std " << report.steady_iou_std
        << "), velocity RMSE " << report.velocity_rmse_mean << " m/s, rate RMSE " << report.rate_rmse_mean
        << " rad/s\n";
    return report;
}

eval::EvaluationReport cmd_run_all(const io::RunConfig& cfg, std::ostream& log) {
    cmd_simulate(cfg, log);
    cmd_track(cfg, log);
    return cmd_evaluate(cfg, log);
}

}  // namespace gpeot::cli
