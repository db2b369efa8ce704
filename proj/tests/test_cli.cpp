#include "gpeot/cli.hpp"
#include "gpeot/experiment.hpp"
#include "gpeot/io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace gpeot;
using geometry::Mat3;
using geometry::Vec3;
namespace fs = std::filesystem;

namespace {

/// Fresh directory below the system temp path, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("gpeot_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

/// Short run so that each command finishes quickly.
io::RunConfig short_config(const fs::path& out, meas::TrackerKind kind = meas::TrackerKind::gpeot) {
    io::Json j{{"tracker", std::string(meas::to_string(kind))},
               {"scenario", {{"trajectory", {{"duration", 0.5}}}}},
               {"out", out.string()},
               {"threads", 1}};
    return io::run_config_from_json(j);
}

}  // namespace

TEST(Config, DefaultsMatchReferenceSetup) {
    const io::RunConfig c;
    EXPECT_EQ(c.scenario.shape.kind, sim::ShapeKind::cube);
    EXPECT_DOUBLE_EQ(c.scenario.shape.edge, 3.0);
    EXPECT_DOUBLE_EQ(c.scenario.trajectory.speed, 10.0);
    EXPECT_DOUBLE_EQ(c.scenario.trajectory.duration, 10.0);
    EXPECT_DOUBLE_EQ(c.scenario.trajectory.rate, 10.0);
    EXPECT_EQ(c.scenario.sensor.n_points, 20);
    EXPECT_TRUE(c.scenario.sensor.noise_cov.isApprox(0.01 * Mat3::Identity()));

    const auto& g = c.tracker;
    EXPECT_EQ(g.kind, meas::TrackerKind::gpeot);
    EXPECT_DOUBLE_EQ(g.hyper.sigma_f, 1.0);
    EXPECT_DOUBLE_EQ(g.hyper.sigma_r, 0.2);
    EXPECT_DOUBLE_EQ(g.hyper.length_scale, std::numbers::pi / 8.0);
    EXPECT_DOUBLE_EQ(g.noise.sigma_c, 0.1);
    EXPECT_DOUBLE_EQ(g.noise.sigma_alpha, 0.1);
    EXPECT_DOUBLE_EQ(g.noise.lambda, 0.99);
    EXPECT_EQ(tracking::build_models(g).extent_dim(), 642);

    const auto p = tracking::TrackerConfig::gpeot_p_defaults();
    EXPECT_DOUBLE_EQ(p.hyper.length_scale, std::numbers::pi / 5.0);
    EXPECT_DOUBLE_EQ(p.noise.sigma_alpha, 0.4);
    EXPECT_DOUBLE_EQ(p.projection.scale_mean, 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(p.projection.scale_var, 1.0 / 18.0);
    EXPECT_EQ(tracking::build_models(p).extent_dim(), 150);
}

TEST(Config, JsonRoundTrip) {
    io::Json j{{"tracker", "gpeot_p"},
               {"scenario",
                {{"shape", {{"kind", "cone"}, {"base_radius", 1.2}, {"height", 3.0}}},
                 {"trajectory", {{"kind", "maneuver"}, {"duration", 4.0}}},
                 {"sensor", {{"n_points", 7}}}}},
               {"process_noise", {{"extent_dynamics", "forgetting"}, {"forgetting_alpha", 0.01}}},
               {"mc_runs", 4},
               {"seed", 99}};
    const io::RunConfig c = io::run_config_from_json(j);
    EXPECT_EQ(c.tracker.kind, meas::TrackerKind::gpeot_p);
    EXPECT_EQ(c.scenario.shape.kind, sim::ShapeKind::cone);
    EXPECT_EQ(c.scenario.trajectory.kind, sim::TrajectoryKind::maneuver);
    EXPECT_DOUBLE_EQ(c.scenario.trajectory.speed, 0.5);
    EXPECT_EQ(c.scenario.sensor.n_points, 7);
    EXPECT_EQ(c.scenario.seed, 99u);
    EXPECT_EQ(c.tracker.noise.extent_dynamics, motion::ExtentDynamics::forgetting);

    const io::Json once = io::to_json(c);
    EXPECT_EQ(io::to_json(io::run_config_from_json(once)), once);
}

TEST(Config, ErrorListsEveryProblem) {
    io::Json j{{"mc_runs", 0}, {"process_noise", {{"lambda", 1.5}}}, {"scenario", {{"sensor", {{"n_points", -1}}}}}};
    try {
        io::run_config_from_json(j);
        FAIL() << "expected ConfigError";
    } catch (const io::ConfigError& e) {
        EXPECT_EQ(e.problems().size(), 3u);
        const std::string what = e.what();
        EXPECT_NE(what.find("mc_runs"), std::string::npos);
        EXPECT_NE(what.find("lambda"), std::string::npos);
        EXPECT_NE(what.find("n_points"), std::string::npos);
    }
    EXPECT_THROW(io::run_config_from_json(io::Json{{"tracker", "kalman"}}), io::ConfigError);
}

TEST(Config, OverridesTakePrecedence) {
    TempDir dir;
    io::write_json(dir.path() / "c.json", io::Json{{"tracker", "gpeot"}, {"mc_runs", 2}, {"seed", 5}});
    cli::Overrides o;
    o.config_path = (dir.path() / "c.json").string();
    o.tracker = "gpeot_p";
    o.seed = 17;
    const io::RunConfig c = cli::resolve_config(o);
    EXPECT_EQ(c.tracker.kind, meas::TrackerKind::gpeot_p);
    EXPECT_EQ(c.mc_runs, 2);
    EXPECT_EQ(c.scenario.seed, 17u);
}

TEST(Csv, MeasurementsRoundTripWithEmptyFrame) {
    TempDir dir;
    std::vector<meas::MeasurementFrame> frames(3);
    frames[0].t = 0.0;
    frames[0].points = {Vec3(1.0 / 3.0, -2.5e-7, 4.0), Vec3(0.1, 0.2, 0.3)};
    frames[1].t = 0.1;
    frames[2].t = 0.2;
    frames[2].points = {Vec3(std::numbers::pi, 0.0, -1.0)};
    io::write_measurements_csv(dir.path() / "m.csv", frames);
    const auto back = io::read_measurements_csv(dir.path() / "m.csv", 0.04 * Mat3::Identity());
    ASSERT_EQ(back.size(), 3u);
    EXPECT_TRUE(back[1].points.empty());
    EXPECT_DOUBLE_EQ(back[1].t, 0.1);
    for (std::size_t k = 0; k < 3; ++k) {
        ASSERT_EQ(back[k].points.size(), frames[k].points.size());
        for (std::size_t i = 0; i < frames[k].points.size(); ++i) EXPECT_EQ(back[k].points[i], frames[k].points[i]);
        EXPECT_DOUBLE_EQ(back[k].noise_cov(2, 2), 0.04);
    }
}

TEST(Csv, MalformedMeasurementsAreRejected) {
    TempDir dir;
    std::ofstream(dir.path() / "bad.csv") << "t,x,y,z,point_id,frame_id\n0,1,2,3,0\n";
    EXPECT_THROW(io::read_measurements_csv(dir.path() / "bad.csv", Mat3::Identity()), io::ParseError);
    std::ofstream(dir.path() / "nan.csv") << "t,x,y,z,point_id,frame_id\n0,abc,2,3,0,0\n";
    EXPECT_THROW(io::read_measurements_csv(dir.path() / "nan.csv", Mat3::Identity()), io::ParseError);
    EXPECT_THROW(io::read_measurements_csv(dir.path() / "missing.csv", Mat3::Identity()), std::exception);
}

TEST(Csv, TruthAndEstimatesRoundTrip) {
    TempDir dir;
    const sim::GroundTruth truth = sim::generate_truth(sim::TrajectorySpec::maneuver_defaults());
    io::write_truth_csv(dir.path() / "t.csv", truth);
    const sim::GroundTruth tb = io::read_truth_csv(dir.path() / "t.csv");
    ASSERT_EQ(tb.samples.size(), truth.samples.size());
    for (std::size_t k = 0; k < truth.samples.size(); ++k) {
        EXPECT_EQ(tb.samples[k].center, truth.samples[k].center);
        EXPECT_EQ(tb.samples[k].rate, truth.samples[k].rate);
        EXPECT_TRUE(tb.samples[k].orientation.coeffs().isApprox(truth.samples[k].orientation.coeffs(), 1e-15));
    }

    experiment::RunEstimates est(2);
    for (auto& e : est) {
        e.extent = Eigen::VectorXd::LinSpaced(5, 0.5, 1.5);
        e.extent_std = Eigen::VectorXd::Constant(5, 0.01);
        e.center = Vec3(1.0, 2.0, 3.0);
        e.report.updated = true;
        e.report.used_points = 20;
    }
    est[1].t = 0.1;
    io::write_estimates_csv(dir.path() / "e.csv", est);
    const auto eb = io::read_estimates_csv(dir.path() / "e.csv");
    ASSERT_EQ(eb.size(), 2u);
    EXPECT_EQ(eb[1].extent, est[1].extent);
    EXPECT_EQ(eb[1].extent_std, est[1].extent_std);
    EXPECT_EQ(eb[0].center, est[0].center);
    EXPECT_TRUE(eb[0].report.updated);
    EXPECT_EQ(eb[0].report.used_points, 20);
}

TEST(Commands, SameSeedGivesIdenticalFiles) {
    TempDir a, b, c;
    std::ostringstream log;
    io::RunConfig ca = short_config(a.path());
    ca.mc_runs = 2;
    io::RunConfig cb = ca;
    cb.out_dir = b.path().string();
    io::RunConfig cc = ca;
    cc.out_dir = c.path().string();
    cc.scenario.seed = ca.scenario.seed + 1;
    cli::cmd_simulate(ca, log);
    cli::cmd_simulate(cb, log);
    cli::cmd_simulate(cc, log);
    const cli::Layout la{a.path()}, lb{b.path()}, lc{c.path()};
    for (int run = 0; run < 2; ++run) {
        EXPECT_EQ(slurp(la.measurements(run)), slurp(lb.measurements(run)));
        EXPECT_NE(slurp(la.measurements(run)), slurp(lc.measurements(run)));
    }
    EXPECT_EQ(slurp(la.truth()), slurp(lb.truth()));
}

TEST(Commands, OneMeasurementFilePerRun) {
    TempDir dir;
    std::ostringstream log;
    io::RunConfig cfg = short_config(dir.path());
    cfg.mc_runs = 3;
    cli::cmd_simulate(cfg, log);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir.path() / "measurements")) files += entry.is_regular_file();
    EXPECT_EQ(files, 3);
    EXPECT_EQ(lines_of(cli::Layout{dir.path()}.measurements(2)).size(), 1u + 5u * 20u);
}

TEST(Commands, RunAllLogsStateDimensionAndWritesReports) {
    for (const auto kind : {meas::TrackerKind::gpeot, meas::TrackerKind::gpeot_p}) {
        TempDir dir;
        std::ostringstream log;
        io::RunConfig cfg = short_config(dir.path(), kind);
        cfg.mc_runs = 2;
        const eval::EvaluationReport rep = cli::cmd_run_all(cfg, log);
        const std::string name(meas::to_string(kind));
        const std::string dim = kind == meas::TrackerKind::gpeot ? "state dimension 654" : "state dimension 162";
        EXPECT_NE(log.str().find(dim), std::string::npos) << log.str();

        const cli::Layout out{dir.path()};
        EXPECT_TRUE(fs::exists(out.mesh(name, 1)));
        const auto iou_lines = lines_of(out.iou(name));
        ASSERT_FALSE(iou_lines.empty());
        EXPECT_EQ(iou_lines.front(), "frame,iou_mean,iou_std");
        EXPECT_EQ(iou_lines.size(), 1u + 5u);
        const auto summary = lines_of(out.summary_csv(name));
        EXPECT_EQ(summary.size(), 1u + 2u);
        EXPECT_EQ(io::read_json(out.summary_json(name)).at("mc_runs"), 2);
        EXPECT_EQ(rep.runs.size(), 2u);
        EXPECT_EQ(io::read_estimates_csv(out.estimates(name, 0)).front().extent.size(),
                  kind == meas::TrackerKind::gpeot ? 642 : 150);
    }
}

TEST(Commands, EmptyMeasurementFileOnlyPredicts) {
    TempDir dir;
    std::ostringstream log;
    const io::RunConfig cfg = short_config(dir.path());
    cli::cmd_simulate(cfg, log);
    const cli::Layout out{dir.path()};
    std::ofstream(out.measurements(0), std::ios::trunc) << "t,x,y,z,point_id,frame_id\n";
    cli::cmd_track(cfg, log);
    const auto est = io::read_estimates_csv(out.estimates("gpeot", 0));
    ASSERT_EQ(est.size(), 5u);
    for (const auto& e : est) {
        EXPECT_FALSE(e.report.updated);
        EXPECT_EQ(e.report.used_points, 0);
    }
    // The prior came from the truth, so pure prediction follows the straight path.
    const sim::GroundTruth truth = io::read_truth_csv(out.truth());
    EXPECT_LT((est.back().center - truth.samples.back().center).norm(), 1e-9);
}

TEST(Commands, MissingInputsAreReported) {
    TempDir dir;
    std::ostringstream log;
    const io::RunConfig cfg = short_config(dir.path());
    EXPECT_THROW(cli::cmd_track(cfg, log), io::ParseError);
    EXPECT_THROW(cli::cmd_evaluate(cfg, log), io::ParseError);
}

TEST(Evaluation, PerfectEstimatesScoreFullOverlap) {
    sim::Scenario sc;
    sc.shape = sim::ShapeSpec::ellipsoid(Vec3(2.5, 1.0, 1.0));
    sc.trajectory = sim::TrajectorySpec::maneuver_defaults();
    sc.trajectory.duration = 3.0;
    const sim::GroundTruth truth = sim::generate_truth(sc.trajectory);
    const auto cfg = tracking::TrackerConfig::gpeot_defaults();
    const auto models = tracking::build_models(cfg);
    const auto& grid = models.models.front().grid();

    // Exact radial function of the ellipsoid at the basis directions.
    Eigen::VectorXd f(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec3 u = grid.directions[i];
        f[static_cast<Eigen::Index>(i)] = 1.0 / u.cwiseQuotient(sc.shape.semi_axes).norm();
    }
    experiment::RunEstimates est;
    for (const auto& s : truth.samples) {
        experiment::FrameEstimate e;
        e.t = s.t;
        e.center = s.center;
        e.velocity = s.velocity;
        e.orientation = s.orientation;
        e.rate = s.rate;
        e.extent = f;
        e.extent_std = Eigen::VectorXd::Zero(f.size());
        est.push_back(e);
    }
    experiment::EvalSettings settings;
    settings.iou_stride = 10;
    settings.steady_state_start = 0.0;
    const eval::RunEvaluation r = experiment::evaluate_run(sc.shape, truth, models, est, settings);
    EXPECT_DOUBLE_EQ(r.velocity_rmse, 0.0);
    EXPECT_NEAR(r.rate_rmse, 0.0, 1e-15);
    EXPECT_GE(r.steady_iou, 0.97);
    for (double a : r.orientation_error) EXPECT_NEAR(a, 0.0, 1e-7);
    int evaluated = 0;
    for (double v : r.iou) evaluated += std::isnan(v) ? 0 : 1;
    EXPECT_EQ(evaluated, 3);
}

TEST(Experiment, ResultsDoNotDependOnThreadCount) {
    experiment::ExperimentConfig cfg;
    cfg.scenario.trajectory.duration = 0.3;
    cfg.mc_runs = 3;
    cfg.eval.steady_state_start = 0.0;
    cfg.threads = 1;
    const auto one = experiment::run_experiment(cfg);
    cfg.threads = 3;
    const auto three = experiment::run_experiment(cfg);
    ASSERT_EQ(one.report.runs.size(), 3u);
    for (std::size_t r = 0; r < 3; ++r) {
        EXPECT_EQ(one.report.runs[r].steady_iou, three.report.runs[r].steady_iou);
        EXPECT_EQ(one.report.runs[r].velocity_rmse, three.report.runs[r].velocity_rmse);
    }
}
