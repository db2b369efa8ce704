#include "gpeot/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace gpeot::io {

using geometry::Vec3;

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) {
        throw ParseError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
    return v;
}

long long parse_int(const std::string& s, const fs::path& path, std::size_t line) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line) + ": not an integer: '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

/// Reads all data rows (header skipped, CR stripped, blank lines ignored).
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(const fs::path& path,
                                                                        std::vector<std::string>* header) {
    std::ifstream in = open_in(path);
    std::string line;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::size_t n = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (header != nullptr) *header = split(line);
            continue;
        }
        rows.emplace_back(n, split(line));
    }
    return rows;
}

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Vec3 vec_from(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json mat_json(const geometry::Mat3& m) {
    Json out = Json::array();
    for (int r = 0; r < 3; ++r) out.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return out;
}

geometry::Mat3 mat_from(const Json& j) {
    if (j.is_number()) return j.get<double>() * geometry::Mat3::Identity();
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3x3 matrix or a scalar");
    geometry::Mat3 m;
    for (int r = 0; r < 3; ++r) m.row(r) = vec_from(j[r]).transpose();
    return m;
}

Json quat_json(const geometry::UnitQuaternion& q) {
    return Json::array({q[0], q[1], q[2], q[3]});
}

geometry::UnitQuaternion quat_from(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw std::invalid_argument("expected a quaternion [q1, q2, q3, q4]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

template <typename T>
void read_opt(const Json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

std::string_view update_mode_name(filter::UpdateMode m) {
    return m == filter::UpdateMode::batch ? "batch" : "sequential";
}

filter::UpdateMode update_mode_from(std::string_view s) {
    if (s == "batch") return filter::UpdateMode::batch;
    if (s == "sequential") return filter::UpdateMode::sequential;
    throw std::invalid_argument("unknown update mode: " + std::string(s));
}

std::string_view jacobian_mode_name(meas::JacobianMode m) {
    return m == meas::JacobianMode::kinematic_numeric ? "kinematic_numeric" : "full_numeric";
}

meas::JacobianMode jacobian_mode_from(std::string_view s) {
    if (s == "kinematic_numeric") return meas::JacobianMode::kinematic_numeric;
    if (s == "full_numeric") return meas::JacobianMode::full_numeric;
    throw std::invalid_argument("unknown jacobian mode: " + std::string(s));
}

std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& s : items) out += "\n  - " + s;
    return out;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::runtime_error(join(problems)), problems_(problems) {}

std::vector<std::string> RunConfig::problems() const {
    std::vector<std::string> out;
    const auto check = [&](const char* name, const auto& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            out.push_back(std::string(name) + ": " + e.what());
        }
    };
    check("scenario", [&] { scenario.validate(); });
    check("tracker", [&] { tracker.validate(); });
    check("eval", [&] { eval.validate(); });
    if (mc_runs < 1) out.emplace_back("mc_runs: must be >= 1");
    if (threads < 0) out.emplace_back("threads: must be >= 0");
    return out;
}

void RunConfig::validate() const {
    const auto p = problems();
    if (!p.empty()) throw ConfigError(p);
}

Json to_json(const sim::Scenario& s) {
    Json shape{{"kind", sim::to_string(s.shape.kind)}};
    switch (s.shape.kind) {
        case sim::ShapeKind::cube: shape["edge"] = s.shape.edge; break;
        case sim::ShapeKind::ellipsoid: shape["semi_axes"] = vec_json(s.shape.semi_axes); break;
        case sim::ShapeKind::cone:
            shape["base_radius"] = s.shape.base_radius;
            shape["height"] = s.shape.height;
            break;
    }
    const auto& t = s.trajectory;
    Json traj{{"kind", sim::to_string(t.kind)},
              {"speed", t.speed},
              {"duration", t.duration},
              {"start", vec_json(t.start)},
              {"heading", vec_json(t.heading)},
              {"initial_orientation", quat_json(t.initial_orientation)}};
    if (t.kind == sim::TrajectoryKind::maneuver) {
        traj["turn_radius"] = t.turn_radius;
        traj["yaw_rate"] = t.yaw_rate;
        traj["roll_amplitude"] = t.roll_amplitude;
        traj["roll_period"] = t.roll_period;
        traj["attitude_substeps"] = t.attitude_substeps;
    }
    return Json{{"shape", shape},
                {"trajectory", traj},
                {"sensor", {{"n_points", s.sensor.n_points}, {"noise_cov", mat_json(s.sensor.noise_cov)}, {"rate", t.rate}}},
                {"seed", s.seed}};
}

sim::Scenario scenario_from_json(const Json& j) {
    sim::Scenario s;
    if (j.contains("shape")) {
        const Json& sh = j.at("shape");
        if (sh.contains("kind")) s.shape.kind = sim::shape_kind_from_string(sh.at("kind").get<std::string>());
        read_opt(sh, "edge", s.shape.edge);
        if (sh.contains("semi_axes")) s.shape.semi_axes = vec_from(sh.at("semi_axes"));
        read_opt(sh, "base_radius", s.shape.base_radius);
        read_opt(sh, "height", s.shape.height);
    }
    if (j.contains("trajectory")) {
        const Json& tj = j.at("trajectory");
        if (tj.contains("kind") &&
            sim::trajectory_kind_from_string(tj.at("kind").get<std::string>()) == sim::TrajectoryKind::maneuver) {
            s.trajectory = sim::TrajectorySpec::maneuver_defaults();
        }
        auto& t = s.trajectory;
        read_opt(tj, "speed", t.speed);
        read_opt(tj, "duration", t.duration);
        if (tj.contains("start")) t.start = vec_from(tj.at("start"));
        if (tj.contains("heading")) t.heading = vec_from(tj.at("heading"));
        if (tj.contains("initial_orientation")) t.initial_orientation = quat_from(tj.at("initial_orientation"));
        read_opt(tj, "turn_radius", t.turn_radius);
        read_opt(tj, "yaw_rate", t.yaw_rate);
        read_opt(tj, "roll_amplitude", t.roll_amplitude);
        read_opt(tj, "roll_period", t.roll_period);
        read_opt(tj, "attitude_substeps", t.attitude_substeps);
    }
    if (j.contains("sensor")) {
        const Json& sj = j.at("sensor");
        read_opt(sj, "n_points", s.sensor.n_points);
        if (sj.contains("noise_cov")) s.sensor.noise_cov = mat_from(sj.at("noise_cov"));
        read_opt(sj, "rate", s.trajectory.rate);
    }
    read_opt(j, "seed", s.seed);
    return s;
}

Json to_json(const RunConfig& c) {
    const auto& tr = c.tracker;
    Json kernels = Json::array();
    for (const auto k : tr.projection.kernel_kinds) kernels.push_back(gp::to_string(k));
    Json planes = Json::array();
    for (const auto& P : tr.projection.planes) {
        planes.push_back(Json::array({vec_json(P.row(0).transpose()), vec_json(P.row(1).transpose())}));
    }
    return Json{
        {"scenario", to_json(c.scenario)},
        {"tracker", meas::to_string(tr.kind)},
        {"hyperparameters",
         {{"mu_r", tr.hyper.mu_r},
          {"sigma_f", tr.hyper.sigma_f},
          {"sigma_r", tr.hyper.sigma_r},
          {"length_scale", tr.hyper.length_scale},
          {"meas_noise_var", tr.hyper.meas_noise_var}}},
        {"process_noise",
         {{"sigma_c", tr.noise.sigma_c},
          {"sigma_alpha", tr.noise.sigma_alpha},
          {"alpha_axis_mask", vec_json(tr.noise.alpha_axis_mask)},
          {"lambda", tr.noise.lambda},
          {"forgetting_alpha", tr.noise.forgetting_alpha},
          {"extent_dynamics", motion::to_string(tr.noise.extent_dynamics)}}},
        {"projection",
         {{"planes", planes},
          {"kernels", kernels},
          {"scale_mean", tr.projection.scale_mean},
          {"scale_var", tr.projection.scale_var}}},
        {"filter",
         {{"jacobian_rel_step", tr.filter.jacobian_rel_step},
          {"jacobian_abs_step", tr.filter.jacobian_abs_step},
          {"max_condition_warn", tr.filter.max_condition_warn},
          {"update_mode", update_mode_name(tr.filter.update_mode)},
          {"jacobian_mode", jacobian_mode_name(tr.jacobian_mode)}}},
        {"basis", {{"sphere_level", tr.sphere_level}, {"circle_points", tr.circle_points}}},
        {"prior",
         {{"sigma_center", tr.prior.sigma_center},
          {"velocity", vec_json(tr.prior.velocity)},
          {"sigma_velocity", tr.prior.sigma_velocity},
          {"sigma_deviation", tr.prior.sigma_deviation},
          {"rate", vec_json(tr.prior.rate)},
          {"sigma_rate", tr.prior.sigma_rate}}},
        {"eval",
         {{"cell_fraction", c.eval.cell_fraction},
          {"iou_stride", c.eval.iou_stride},
          {"steady_state_start", c.eval.steady_state_start},
          {"rate_error_start", c.eval.rate_error_start},
          {"contour_samples", c.eval.contour_samples}}},
        {"mc_runs", c.mc_runs},
        {"out", c.out_dir},
        {"init_from_truth", c.init_from_truth},
        {"threads", c.threads}};
}

RunConfig run_config_from_json(const Json& j, const fs::path& base_dir) {
    std::vector<std::string> problems;
    const auto section = [&](const char* name, const auto& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            problems.push_back(std::string(name) + ": " + e.what());
        }
    };

    RunConfig c;
    section("tracker", [&] {
        const auto kind = j.contains("tracker") ? meas::tracker_kind_from_string(j.at("tracker").get<std::string>())
                                                : meas::TrackerKind::gpeot;
        c.tracker = kind == meas::TrackerKind::gpeot ? tracking::TrackerConfig::gpeot_defaults()
                                                     : tracking::TrackerConfig::gpeot_p_defaults();
    });
    section("scenario", [&] {
        if (j.contains("scenario_path")) {
            fs::path p = j.at("scenario_path").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            c.scenario = scenario_from_json(read_json(p));
        } else if (j.contains("scenario")) {
            c.scenario = scenario_from_json(j.at("scenario"));
        }
    });
    auto& tr = c.tracker;
    section("hyperparameters", [&] {
        if (!j.contains("hyperparameters")) return;
        const Json& h = j.at("hyperparameters");
        read_opt(h, "mu_r", tr.hyper.mu_r);
        read_opt(h, "sigma_f", tr.hyper.sigma_f);
        read_opt(h, "sigma_r", tr.hyper.sigma_r);
        read_opt(h, "length_scale", tr.hyper.length_scale);
        read_opt(h, "meas_noise_var", tr.hyper.meas_noise_var);
    });
    section("process_noise", [&] {
        if (!j.contains("process_noise")) return;
        const Json& n = j.at("process_noise");
        read_opt(n, "sigma_c", tr.noise.sigma_c);
        read_opt(n, "sigma_alpha", tr.noise.sigma_alpha);
        if (n.contains("alpha_axis_mask")) tr.noise.alpha_axis_mask = vec_from(n.at("alpha_axis_mask"));
        read_opt(n, "lambda", tr.noise.lambda);
        read_opt(n, "forgetting_alpha", tr.noise.forgetting_alpha);
        if (n.contains("extent_dynamics")) {
            tr.noise.extent_dynamics = motion::extent_dynamics_from_string(n.at("extent_dynamics").get<std::string>());
        }
    });
    section("projection", [&] {
        if (!j.contains("projection")) return;
        const Json& p = j.at("projection");
        if (p.contains("planes")) {
            const Json& pl = p.at("planes");
            if (!pl.is_array() || pl.size() != 3) throw std::invalid_argument("planes must list 3 planes");
            for (std::size_t i = 0; i < 3; ++i) {
                if (!pl[i].is_array() || pl[i].size() != 2) throw std::invalid_argument("each plane needs 2 rows");
                tr.projection.planes[i].row(0) = vec_from(pl[i][0]).transpose();
                tr.projection.planes[i].row(1) = vec_from(pl[i][1]).transpose();
            }
        }
        if (p.contains("kernels")) {
            const Json& k = p.at("kernels");
            if (!k.is_array() || k.size() != 3) throw std::invalid_argument("kernels must list 3 kernel kinds");
            for (std::size_t i = 0; i < 3; ++i) tr.projection.kernel_kinds[i] = gp::kernel_kind_from_string(k[i].get<std::string>());
        }
        read_opt(p, "scale_mean", tr.projection.scale_mean);
        read_opt(p, "scale_var", tr.projection.scale_var);
    });
    section("filter", [&] {
        if (!j.contains("filter")) return;
        const Json& f = j.at("filter");
        read_opt(f, "jacobian_rel_step", tr.filter.jacobian_rel_step);
        read_opt(f, "jacobian_abs_step", tr.filter.jacobian_abs_step);
        read_opt(f, "max_condition_warn", tr.filter.max_condition_warn);
        if (f.contains("update_mode")) tr.filter.update_mode = update_mode_from(f.at("update_mode").get<std::string>());
        if (f.contains("jacobian_mode")) tr.jacobian_mode = jacobian_mode_from(f.at("jacobian_mode").get<std::string>());
    });
    section("basis", [&] {
        if (!j.contains("basis")) return;
        read_opt(j.at("basis"), "sphere_level", tr.sphere_level);
        read_opt(j.at("basis"), "circle_points", tr.circle_points);
    });
    section("prior", [&] {
        if (!j.contains("prior")) return;
        const Json& p = j.at("prior");
        read_opt(p, "sigma_center", tr.prior.sigma_center);
        if (p.contains("velocity")) tr.prior.velocity = vec_from(p.at("velocity"));
        read_opt(p, "sigma_velocity", tr.prior.sigma_velocity);
        read_opt(p, "sigma_deviation", tr.prior.sigma_deviation);
        if (p.contains("rate")) tr.prior.rate = vec_from(p.at("rate"));
        read_opt(p, "sigma_rate", tr.prior.sigma_rate);
    });
    section("eval", [&] {
        if (!j.contains("eval")) return;
        const Json& e = j.at("eval");
        read_opt(e, "cell_fraction", c.eval.cell_fraction);
        read_opt(e, "iou_stride", c.eval.iou_stride);
        read_opt(e, "steady_state_start", c.eval.steady_state_start);
        read_opt(e, "rate_error_start", c.eval.rate_error_start);
        read_opt(e, "contour_samples", c.eval.contour_samples);
    });
    section("mc_runs", [&] { read_opt(j, "mc_runs", c.mc_runs); });
    section("out", [&] { read_opt(j, "out", c.out_dir); });
    section("seed", [&] { read_opt(j, "seed", c.scenario.seed); });
    section("init_from_truth", [&] { read_opt(j, "init_from_truth", c.init_from_truth); });
    section("threads", [&] { read_opt(j, "threads", c.threads); });

    for (auto& p : c.problems()) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

Json read_json(const fs::path& path) {
    std::ifstream in = open_in(path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

RunConfig load_run_config(const fs::path& path) {
    return run_config_from_json(read_json(path), path.parent_path());
}

void write_measurements_csv(const fs::path& path, const std::vector<meas::MeasurementFrame>& frames) {
    std::ofstream out = open_out(path);
    out << "t,x,y,z,point_id,frame_id\n";
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const auto& f = frames[k];
        if (f.points.empty()) {
            out << fmt(f.t) << ",,,,-1," << k << '\n';
            continue;
        }
        for (std::size_t i = 0; i < f.points.size(); ++i) {
            const Vec3& p = f.points[i];
            out << fmt(f.t) << ',' << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << ',' << i << ','
                << k << '\n';
        }
    }
}

std::vector<meas::MeasurementFrame> read_measurements_csv(const fs::path& path,
                                                          const geometry::Mat3& noise_cov) {
    std::vector<std::string> header;
    const auto rows = read_rows(path, &header);
    std::vector<meas::MeasurementFrame> frames;
    long long current = std::numeric_limits<long long>::min();
    for (const auto& [line, cols] : rows) {
        if (cols.size() != 6) {
            throw ParseError(path.string() + ":" + std::to_string(line) + ": expected 6 columns");
        }
        const long long frame_id = parse_int(cols[5], path, line);
        const double t = parse_double(cols[0], path, line);
        if (frame_id != current) {
            if (!frames.empty() && t < frames.back().t) {
                throw ParseError(path.string() + ":" + std::to_string(line) + ": frame times must not decrease");
            }
            meas::MeasurementFrame f;
            f.t = t;
            f.noise_cov = noise_cov;
            frames.push_back(f);
            current = frame_id;
        }
        if (parse_int(cols[4], path, line) < 0) continue;
        frames.back().points.emplace_back(parse_double(cols[1], path, line), parse_double(cols[2], path, line),
                                          parse_double(cols[3], path, line));
    }
    return frames;
}

void write_truth_csv(const fs::path& path, const sim::GroundTruth& truth) {
    std::ofstream out = open_out(path);
    out << "frame,t,cx,cy,cz,vx,vy,vz,q1,q2,q3,q4,wx,wy,wz\n";
    for (std::size_t k = 0; k < truth.samples.size(); ++k) {
        const auto& s = truth.samples[k];
        out << k << ',' << fmt(s.t);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(s.center[i]);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(s.velocity[i]);
        for (int i = 0; i < 4; ++i) out << ',' << fmt(s.orientation[i]);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(s.rate[i]);
        out << '\n';
    }
}

sim::GroundTruth read_truth_csv(const fs::path& path) {
    sim::GroundTruth truth;
    for (const auto& [line, cols] : read_rows(path, nullptr)) {
        if (cols.size() != 15) throw ParseError(path.string() + ":" + std::to_string(line) + ": expected 15 columns");
        std::vector<double> v;
        for (std::size_t i = 1; i < cols.size(); ++i) v.push_back(parse_double(cols[i], path, line));
        sim::TruthSample s;
        s.t = v[0];
        s.center = Vec3(v[1], v[2], v[3]);
        s.velocity = Vec3(v[4], v[5], v[6]);
        s.orientation = geometry::UnitQuaternion(v[7], v[8], v[9], v[10]);
        s.rate = Vec3(v[11], v[12], v[13]);
        truth.samples.push_back(s);
    }
    return truth;
}

void write_estimates_csv(const fs::path& path, const experiment::RunEstimates& estimates) {
    std::ofstream out = open_out(path);
    const Eigen::Index n = estimates.empty() ? 0 : estimates.front().extent.size();
    out << "frame,t,state_dim,cx,cy,cz,vx,vy,vz,q1,q2,q3,q4,wx,wy,wz,updated,used_points,skipped_points";
    for (Eigen::Index i = 0; i < n; ++i) out << ",f_" << i;
    for (Eigen::Index i = 0; i < n; ++i) out << ",fstd_" << i;
    out << '\n';
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        const auto& e = estimates[k];
        out << k << ',' << fmt(e.t) << ',' << (motion::kKinematicDim + e.extent.size());
        for (int i = 0; i < 3; ++i) out << ',' << fmt(e.center[i]);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(e.velocity[i]);
        for (int i = 0; i < 4; ++i) out << ',' << fmt(e.orientation[i]);
        for (int i = 0; i < 3; ++i) out << ',' << fmt(e.rate[i]);
        out << ',' << (e.report.updated ? 1 : 0) << ',' << e.report.used_points << ',' << e.report.skipped_points;
        for (Eigen::Index i = 0; i < e.extent.size(); ++i) out << ',' << fmt(e.extent[i]);
        for (Eigen::Index i = 0; i < e.extent_std.size(); ++i) out << ',' << fmt(e.extent_std[i]);
        out << '\n';
    }
}

experiment::RunEstimates read_estimates_csv(const fs::path& path) {
    std::vector<std::string> header;
    const auto rows = read_rows(path, &header);
    constexpr std::size_t kFixed = 19;
    if (header.size() < kFixed || (header.size() - kFixed) % 2 != 0) {
        throw ParseError(path.string() + ": unexpected estimate header");
    }
    const auto n = static_cast<Eigen::Index>((header.size() - kFixed) / 2);
    experiment::RunEstimates out;
    for (const auto& [line, cols] : rows) {
        if (cols.size() != header.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line) + ": column count mismatch");
        }
        std::vector<double> v;
        v.reserve(cols.size());
        for (const auto& c : cols) v.push_back(parse_double(c, path, line));
        experiment::FrameEstimate e;
        e.t = v[1];
        e.center = Vec3(v[3], v[4], v[5]);
        e.velocity = Vec3(v[6], v[7], v[8]);
        e.orientation = geometry::UnitQuaternion(v[9], v[10], v[11], v[12]);
        e.rate = Vec3(v[13], v[14], v[15]);
        e.report.updated = v[16] != 0.0;
        e.report.used_points = static_cast<int>(v[17]);
        e.report.skipped_points = static_cast<int>(v[18]);
        e.extent.resize(n);
        e.extent_std.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            e.extent[i] = v[kFixed + static_cast<std::size_t>(i)];
            e.extent_std[i] = v[kFixed + static_cast<std::size_t>(n + i)];
        }
        out.push_back(std::move(e));
    }
    return out;
}

void write_obj(const fs::path& path, const eval::TriangleMesh& mesh) {
    std::ofstream out = open_out(path);
    for (const Vec3& v : mesh.vertices) out << "v " << fmt(v[0]) << ' ' << fmt(v[1]) << ' ' << fmt(v[2]) << '\n';
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_contours_obj(const fs::path& path, const eval::ProjectionContours& contours) {
    std::ofstream out = open_out(path);
    std::size_t base = 1;
    for (std::size_t j = 0; j < 3; ++j) {
        const auto& r = contours.radii[j];
        const auto& P = contours.planes[j];
        out << "o contour_" << j << '\n';
        for (std::size_t s = 0; s < r.size(); ++s) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(r.size());
            // Plane rows are orthonormal, so P^T lifts the 2D point back into the object frame.
            const Vec3 p = P.transpose() * Eigen::Vector2d(r[s] * std::cos(th), r[s] * std::sin(th));
            out << "v " << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
        }
        if (!r.empty()) {
            out << 'l';
            for (std::size_t s = 0; s < r.size(); ++s) out << ' ' << base + s;
            out << ' ' << base << '\n';
        }
        base += r.size();
    }
}

void write_iou_csv(const fs::path& path, const eval::EvaluationReport& report) {
    std::ofstream out = open_out(path);
    out << "frame,iou_mean,iou_std\n";
    for (std::size_t k = 0; k < report.iou_mean.size(); ++k) {
        if (std::isnan(report.iou_mean[k])) continue;
        out << k << ',' << fmt(report.iou_mean[k]) << ',' << fmt(report.iou_std[k]) << '\n';
    }
}

void write_summary_csv(const fs::path& path, const eval::EvaluationReport& report) {
    std::ofstream out = open_out(path);
    out << "run,steady_iou,velocity_rmse,rate_rmse\n";
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
        const auto& run = report.runs[r];
        out << r << ',' << fmt(run.steady_iou) << ',' << fmt(run.velocity_rmse) << ',' << fmt(run.rate_rmse) << '\n';
    }
}

Json summary_json(const eval::EvaluationReport& report) {
    const auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
    return Json{{"mc_runs", report.runs.size()},
                {"steady_iou_mean", num(report.steady_iou_mean)},
                {"steady_iou_std", num(report.steady_iou_std)},
                {"velocity_rmse_mean", num(report.velocity_rmse_mean)},
                {"rate_rmse_mean", num(report.rate_rmse_mean)}};
}

void write_run_metrics_csv(const fs::path& path, const eval::RunEvaluation& run) {
    std::ofstream out = open_out(path);
    out << "frame,t,iou,orientation_error\n";
    for (std::size_t k = 0; k < run.t.size(); ++k) {
        out << k << ',' << fmt(run.t[k]) << ',' << fmt(run.iou[k]) << ','
            << fmt(k < run.orientation_error.size() ? run.orientation_error[k]
                                                    : std::numeric_limits<double>::quiet_NaN())
            << '\n';
    }
}

}  // namespace gpeot::io
