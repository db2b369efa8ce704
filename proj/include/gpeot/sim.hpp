#pragma once

#include "gpeot/geometry.hpp"
#include "gpeot/meas_models.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gpeot::sim {

using geometry::Mat3;
using geometry::UnitQuaternion;
using geometry::Vec3;

enum class ShapeKind { cube, ellipsoid, cone };

std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

/// Parametric solid in its own frame. The cone's local origin is its volume centroid:
/// base disc at z = -height/4, apex at z = 3 height/4.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::cube;
    double edge = 3.0;
    Vec3 semi_axes{2.5, 1.0, 1.0};
    double base_radius = 1.5;
    double height = 4.0;

    static ShapeSpec cube(double edge);
    static ShapeSpec ellipsoid(const Vec3& semi_axes);
    static ShapeSpec cone(double base_radius, double height);

    void validate() const;

    /// Implicit function of the solid: negative inside, zero on the surface.
    [[nodiscard]] double implicit(const Vec3& local) const;
    [[nodiscard]] bool inside(const Vec3& local) const { return implicit(local) <= 0.0; }
    /// Axis-aligned bounds in the object frame.
    [[nodiscard]] Vec3 bounds_min() const;
    [[nodiscard]] Vec3 bounds_max() const;
    [[nodiscard]] double volume() const;
};

enum class TrajectoryKind { linear, maneuver };

std::string_view to_string(TrajectoryKind kind);
TrajectoryKind trajectory_kind_from_string(std::string_view name);

/// Linear: constant velocity speed * heading, fixed attitude.
/// Maneuver: horizontal circular arc of radius turn_radius at constant speed, body rates
/// (roll_amplitude sin(2 pi t / roll_period), 0, yaw_rate).
struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::linear;
    double speed = 10.0;     ///< [m/s]
    double duration = 10.0;  ///< [s]
    double rate = 10.0;      ///< frames per second
    Vec3 start = Vec3::Zero();
    Vec3 heading = Vec3::UnitX();
    UnitQuaternion initial_orientation;

    double turn_radius = 5.0;      ///< [m]
    double yaw_rate = 0.2;         ///< [rad/s]
    double roll_amplitude = 0.2;   ///< [rad/s]
    double roll_period = 10.0;     ///< [s]
    int attitude_substeps = 20;    ///< integration steps per frame interval

    /// Defaults of the curved-path experiment (0.5 m/s, 20 s).
    static TrajectorySpec maneuver_defaults();

    void validate() const;
    [[nodiscard]] int frame_count() const;
};

struct TruthSample {
    double t = 0.0;
    Vec3 center = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    UnitQuaternion orientation;
    Vec3 rate = Vec3::Zero();  ///< body-frame angular rate [rad/s]

    [[nodiscard]] geometry::Pose pose() const { return {center, orientation}; }
};

struct GroundTruth {
    std::vector<TruthSample> samples;
};

struct SensorSpec {
    int n_points = 20;
    Mat3 noise_cov = 0.01 * Mat3::Identity();

    void validate() const;
};

struct Scenario {
    ShapeSpec shape;
    TrajectorySpec trajectory;
    SensorSpec sensor;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Seed of the stream for (run, frame); identical inputs give identical streams
/// regardless of the order in which streams are created.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t run, std::uint64_t frame);
std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t run, std::uint64_t frame);

/// n points uniform by area on the surface, in the object frame.
std::vector<Vec3> sample_surface(const ShapeSpec& shape, int n, std::mt19937_64& rng);
std::vector<Vec3> sample_surface(const ShapeSpec& shape, int n, std::uint64_t rng_seed);

GroundTruth generate_truth(const TrajectorySpec& traj);

/// Surface samples posed by the truth sample plus zero-mean Gaussian noise.
meas::MeasurementFrame render_frame(const TruthSample& truth, const ShapeSpec& shape, int n_points,
                                    const Mat3& noise_cov, std::mt19937_64& rng);
meas::MeasurementFrame render_frame(const TruthSample& truth, const ShapeSpec& shape, int n_points,
                                    const Mat3& noise_cov, std::uint64_t rng_seed);

/// All frames of Monte-Carlo run `run`, each from its own stream.
std::vector<meas::MeasurementFrame> simulate_run(const Scenario& scenario, const GroundTruth& truth,
                                                 std::uint64_t run);

}  // namespace gpeot::sim
