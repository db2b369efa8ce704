#include "gpeot/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gpeot::sim {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Vec3 sample_cube(double edge, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> face(0, 5);
    std::uniform_real_distribution<double> u(-0.5 * edge, 0.5 * edge);
    const int f = face(rng);
    const int axis = f / 2;
    Vec3 p;
    p[(axis + 1) % 3] = u(rng);
    p[(axis + 2) % 3] = u(rng);
    p[axis] = (f % 2 == 0 ? -0.5 : 0.5) * edge;
    return p;
}

Vec3 unit_gaussian_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    for (;;) {
        const Vec3 g(n01(rng), n01(rng), n01(rng));
        const double norm = g.norm();
        if (norm > 1e-12) return g / norm;
    }
}

/// The map u -> diag(a) u from the unit sphere stretches area by
/// sqrt((bc u1)^2 + (ac u2)^2 + (ab u3)^2); accept proportionally.
Vec3 sample_ellipsoid(const Vec3& axes, std::mt19937_64& rng) {
    const double a = axes[0], b = axes[1], c = axes[2];
    const double g_max = std::max({b * c, a * c, a * b});
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (;;) {
        const Vec3 u = unit_gaussian_direction(rng);
        const double g = std::sqrt(std::pow(b * c * u[0], 2) + std::pow(a * c * u[1], 2) +
                                   std::pow(a * b * u[2], 2));
        if (u01(rng) * g_max <= g) return Vec3(a * u[0], b * u[1], c * u[2]);
    }
}

Vec3 sample_cone(double r, double h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double lateral = kPi * r * std::sqrt(r * r + h * h);
    const double base = kPi * r * r;
    const bool on_base = u01(rng) * (lateral + base) < base;
    const double az = 2.0 * kPi * u01(rng);
    const double s = std::sqrt(u01(rng));
    if (on_base) {
        return Vec3(r * s * std::cos(az), r * s * std::sin(az), -0.25 * h);
    }
    // Slant distance from the apex has density proportional to itself.
    return Vec3(r * s * std::cos(az), r * s * std::sin(az), 0.75 * h - h * s);
}

Mat3 noise_factor(const Mat3& noise_cov) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (noise_cov + noise_cov.transpose()));
    const Vec3 sd = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * sd.asDiagonal();
}

Vec3 body_rate(const TrajectorySpec& traj, double t) {
    if (traj.kind == TrajectoryKind::linear) return Vec3::Zero();
    return Vec3(traj.roll_amplitude * std::sin(2.0 * kPi * t / traj.roll_period), 0.0, traj.yaw_rate);
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::cube: return "cube";
        case ShapeKind::ellipsoid: return "ellipsoid";
        case ShapeKind::cone: return "cone";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(std::string_view name) {
    if (name == "cube") return ShapeKind::cube;
    if (name == "ellipsoid") return ShapeKind::ellipsoid;
    if (name == "cone") return ShapeKind::cone;
    throw std::invalid_argument("unknown shape kind: " + std::string(name));
}

ShapeSpec ShapeSpec::cube(double edge) {
    ShapeSpec s;
    s.kind = ShapeKind::cube;
    s.edge = edge;
    return s;
}

ShapeSpec ShapeSpec::ellipsoid(const Vec3& semi_axes) {
    ShapeSpec s;
    s.kind = ShapeKind::ellipsoid;
    s.semi_axes = semi_axes;
    return s;
}

ShapeSpec ShapeSpec::cone(double base_radius, double height) {
    ShapeSpec s;
    s.kind = ShapeKind::cone;
    s.base_radius = base_radius;
    s.height = height;
    return s;
}

void ShapeSpec::validate() const {
    switch (kind) {
        case ShapeKind::cube:
            if (!(edge > 0.0)) throw std::invalid_argument("shape.edge must be > 0");
            break;
        case ShapeKind::ellipsoid:
            if (!(semi_axes.minCoeff() > 0.0)) throw std::invalid_argument("shape.semi_axes must be > 0");
            break;
        case ShapeKind::cone:
            if (!(base_radius > 0.0)) throw std::invalid_argument("shape.base_radius must be > 0");
            if (!(height > 0.0)) throw std::invalid_argument("shape.height must be > 0");
            break;
    }
}

double ShapeSpec::implicit(const Vec3& p) const {
    switch (kind) {
        case ShapeKind::cube:
            return p.cwiseAbs().maxCoeff() - 0.5 * edge;
        case ShapeKind::ellipsoid:
            return p.cwiseQuotient(semi_axes).squaredNorm() - 1.0;
        case ShapeKind::cone: {
            const double rho = std::hypot(p[0], p[1]);
            const double below_base = -(p[2] + 0.25 * height);
            const double outside_side = rho - base_radius * (0.75 * height - p[2]) / height;
            return std::max(below_base, outside_side);
        }
    }
    return 0.0;
}

Vec3 ShapeSpec::bounds_min() const {
    switch (kind) {
        case ShapeKind::cube: return Vec3::Constant(-0.5 * edge);
        case ShapeKind::ellipsoid: return -semi_axes;
        case ShapeKind::cone: return Vec3(-base_radius, -base_radius, -0.25 * height);
    }
    return Vec3::Zero();
}

Vec3 ShapeSpec::bounds_max() const {
    switch (kind) {
        case ShapeKind::cube: return Vec3::Constant(0.5 * edge);
        case ShapeKind::ellipsoid: return semi_axes;
        case ShapeKind::cone: return Vec3(base_radius, base_radius, 0.75 * height);
    }
    return Vec3::Zero();
}

double ShapeSpec::volume() const {
    switch (kind) {
        case ShapeKind::cube: return edge * edge * edge;
        case ShapeKind::ellipsoid: return 4.0 / 3.0 * kPi * semi_axes.prod();
        case ShapeKind::cone: return kPi * base_radius * base_radius * height / 3.0;
    }
    return 0.0;
}

std::string_view to_string(TrajectoryKind kind) {
    return kind == TrajectoryKind::linear ? "linear" : "maneuver";
}

TrajectoryKind trajectory_kind_from_string(std::string_view name) {
    if (name == "linear") return TrajectoryKind::linear;
    if (name == "maneuver" || name == "complex_maneuver") return TrajectoryKind::maneuver;
    throw std::invalid_argument("unknown trajectory kind: " + std::string(name));
}

TrajectorySpec TrajectorySpec::maneuver_defaults() {
    TrajectorySpec t;
    t.kind = TrajectoryKind::maneuver;
    t.speed = 0.5;
    t.duration = 20.0;
    return t;
}

void TrajectorySpec::validate() const {
    if (!(rate > 0.0)) throw std::invalid_argument("trajectory.rate must be > 0");
    if (!(duration > 0.0)) throw std::invalid_argument("trajectory.duration must be > 0");
    if (!(speed >= 0.0)) throw std::invalid_argument("trajectory.speed must be >= 0");
    if (!(heading.norm() > 0.0)) throw std::invalid_argument("trajectory.heading must be non-zero");
    if (kind == TrajectoryKind::maneuver) {
        if (!(turn_radius > 0.0)) throw std::invalid_argument("trajectory.turn_radius must be > 0");
        if (!(roll_period > 0.0)) throw std::invalid_argument("trajectory.roll_period must be > 0");
        if (attitude_substeps < 1) throw std::invalid_argument("trajectory.attitude_substeps must be >= 1");
        if (Vec3(heading[0], heading[1], 0.0).norm() == 0.0) {
            throw std::invalid_argument("trajectory.heading must have a horizontal component");
        }
    }
}

int TrajectorySpec::frame_count() const {
    return std::max(1, static_cast<int>(std::lround(duration * rate)));
}

void SensorSpec::validate() const {
    if (n_points < 0) throw std::invalid_argument("sensor.n_points must be >= 0");
    if (!noise_cov.allFinite() || !noise_cov.isApprox(noise_cov.transpose())) {
        throw std::invalid_argument("sensor.noise_cov must be finite and symmetric");
    }
    if (Eigen::SelfAdjointEigenSolver<Mat3>(noise_cov).eigenvalues().minCoeff() < 0.0) {
        throw std::invalid_argument("sensor.noise_cov must be positive semidefinite");
    }
}

void Scenario::validate() const {
    shape.validate();
    trajectory.validate();
    sensor.validate();
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t run, std::uint64_t frame) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(run + 0x632BE59BD9B4E019ULL));
    s = splitmix64(s ^ splitmix64(frame + 0x85157AF5ULL));
    return s;
}

std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t run, std::uint64_t frame) {
    return std::mt19937_64(stream_seed(master, run, frame));
}

std::vector<Vec3> sample_surface(const ShapeSpec& shape, int n, std::mt19937_64& rng) {
    if (n < 0) throw std::invalid_argument("sample_surface: n must be >= 0");
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        switch (shape.kind) {
            case ShapeKind::cube: out.push_back(sample_cube(shape.edge, rng)); break;
            case ShapeKind::ellipsoid: out.push_back(sample_ellipsoid(shape.semi_axes, rng)); break;
            case ShapeKind::cone: out.push_back(sample_cone(shape.base_radius, shape.height, rng)); break;
        }
    }
    return out;
}

std::vector<Vec3> sample_surface(const ShapeSpec& shape, int n, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    return sample_surface(shape, n, rng);
}

GroundTruth generate_truth(const TrajectorySpec& traj) {
    traj.validate();
    const int n = traj.frame_count();
    const double T = 1.0 / traj.rate;
    GroundTruth truth;
    truth.samples.reserve(static_cast<std::size_t>(n));

    if (traj.kind == TrajectoryKind::linear) {
        const Vec3 v = traj.speed * traj.heading.normalized();
        for (int k = 0; k < n; ++k) {
            TruthSample s;
            s.t = k * T;
            s.center = traj.start + s.t * v;
            s.velocity = v;
            s.orientation = traj.initial_orientation;
            truth.samples.push_back(s);
        }
        return truth;
    }

    const Vec3 h = Vec3(traj.heading[0], traj.heading[1], 0.0).normalized();
    const Vec3 left = Vec3::UnitZ().cross(h);
    const double kappa = traj.speed / traj.turn_radius;
    UnitQuaternion q = traj.initial_orientation;
    const double dt = T / traj.attitude_substeps;
    for (int k = 0; k < n; ++k) {
        TruthSample s;
        s.t = k * T;
        const double ang = kappa * s.t;
        s.center = traj.start + traj.turn_radius * (std::sin(ang) * h + (1.0 - std::cos(ang)) * left);
        s.velocity = traj.speed * (std::cos(ang) * h + std::sin(ang) * left);
        s.orientation = q;
        s.rate = body_rate(traj, s.t);
        truth.samples.push_back(s);

        for (int i = 0; i < traj.attitude_substeps; ++i) {
            const double t_mid = s.t + (i + 0.5) * dt;
            q = geometry::quat_product(geometry::rotation_vector_quat(body_rate(traj, t_mid) * dt), q);
        }
    }
    return truth;
}

meas::MeasurementFrame render_frame(const TruthSample& truth, const ShapeSpec& shape, int n_points,
                                    const Mat3& noise_cov, std::mt19937_64& rng) {
    meas::MeasurementFrame frame;
    frame.t = truth.t;
    frame.noise_cov = noise_cov;
    const geometry::Pose pose = truth.pose();
    const Mat3 L = noise_factor(noise_cov);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (const Vec3& p : sample_surface(shape, n_points, rng)) {
        const Vec3 z(n01(rng), n01(rng), n01(rng));
        frame.points.push_back(pose.to_global(p) + L * z);
    }
    return frame;
}

meas::MeasurementFrame render_frame(const TruthSample& truth, const ShapeSpec& shape, int n_points,
                                    const Mat3& noise_cov, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    return render_frame(truth, shape, n_points, noise_cov, rng);
}

std::vector<meas::MeasurementFrame> simulate_run(const Scenario& scenario, const GroundTruth& truth,
                                                 std::uint64_t run) {
    std::vector<meas::MeasurementFrame> frames;
    frames.reserve(truth.samples.size());
    for (std::size_t k = 0; k < truth.samples.size(); ++k) {
        std::mt19937_64 rng = make_stream(scenario.seed, run, k);
        frames.push_back(render_frame(truth.samples[k], scenario.shape, scenario.sensor.n_points,
                                      scenario.sensor.noise_cov, rng));
    }
    return frames;
}

}  // namespace gpeot::sim
