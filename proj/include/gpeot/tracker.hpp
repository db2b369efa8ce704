#pragma once

#include "gpeot/ekf.hpp"
#include "gpeot/gp_kernels.hpp"
#include "gpeot/meas_models.hpp"
#include "gpeot/motion_models.hpp"

#include <array>
#include <optional>
#include <string>

namespace gpeot::tracking {

using geometry::Vec3;
using meas::TrackerKind;

/// Initial kinematic prior. Without an explicit center the centroid of the first frame is used.
struct InitialPrior {
    std::optional<Vec3> center;
    double sigma_center = 0.5;
    Vec3 velocity = Vec3::Zero();
    double sigma_velocity = 0.5;
    double sigma_deviation = 0.05;
    geometry::UnitQuaternion orientation = geometry::UnitQuaternion::identity();
    Vec3 rate = Vec3::Zero();
    double sigma_rate = 0.1;
};

struct TrackerConfig {
    TrackerKind kind = TrackerKind::gpeot;
    gp::GpHyperparams hyper;
    motion::ProcessNoiseConfig noise;
    meas::ProjectionSetup projection = meas::ProjectionSetup::axis_planes();
    filter::FilterConfig filter;
    meas::JacobianMode jacobian_mode = meas::JacobianMode::kinematic_numeric;
    InitialPrior prior;
    int sphere_level = 3;    ///< gpeot basis: icosphere subdivision level
    int circle_points = 50;  ///< gpeot_p basis: points per projection contour

    /// Defaults of the radial tracker (642 basis points, l = pi/8, sigma_alpha = 0.1).
    static TrackerConfig gpeot_defaults();
    /// Defaults of the projection tracker (3 x 50 basis points, l = pi/5, sigma_alpha = 0.4).
    static TrackerConfig gpeot_p_defaults();

    void validate() const;
};

meas::ExtentModels build_models(const TrackerConfig& cfg);

struct StepReport {
    bool predicted = false;
    bool updated = false;
    int used_points = 0;
    int skipped_points = 0;
    bool ill_conditioned = false;
    std::string error;  ///< non-empty when the update was skipped
};

/// Prior state for the first frame: centroid-centered kinematics plus the GP prior.
filter::TrackerState initial_state(const TrackerConfig& cfg, const meas::ExtentModels& models,
                                   const meas::MeasurementFrame& first_frame);

/// Transition for a step of length T, linearized at the current angular-rate estimate.
filter::StructuredTransition make_transition(const TrackerConfig& cfg,
                                             const meas::ExtentModels& models,
                                             const filter::TrackerState& state, double T);

/// One filter cycle: predict to frame.t, pseudo-measurement update, reference reset.
/// Update failures leave the predicted state in place and are reported.
filter::TrackerState step(const filter::TrackerState& state, const meas::MeasurementFrame& frame,
                          const TrackerConfig& cfg, const meas::ExtentModels& models,
                          StepReport* report = nullptr);

/// Owns the state of one tracked object.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg);

    /// Processes a frame; the first call initializes the state from that frame.
    StepReport process(const meas::MeasurementFrame& frame);

    [[nodiscard]] bool initialized() const { return state_.has_value(); }
    [[nodiscard]] const filter::TrackerState& state() const { return state_.value(); }
    [[nodiscard]] const meas::ExtentModels& models() const { return models_; }
    [[nodiscard]] const TrackerConfig& config() const { return cfg_; }

private:
    TrackerConfig cfg_;
    meas::ExtentModels models_;
    std::optional<filter::TrackerState> state_;
};

}  // namespace gpeot::tracking
