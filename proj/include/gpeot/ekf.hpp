#pragma once

#include "gpeot/geometry.hpp"
#include "gpeot/motion_models.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpeot::filter {

using geometry::UnitQuaternion;
using geometry::Vec3;

/// Joint estimate. x is ordered (c, v, a, w, f...); the orientation is
/// delta_quat(a) (.) q_ref and a is zero between frames.
struct TrackerState {
    Eigen::VectorXd x;
    Eigen::MatrixXd P;
    UnitQuaternion q_ref;
    double t = 0.0;

    [[nodiscard]] Eigen::Index dim() const { return x.size(); }
    [[nodiscard]] Vec3 center() const { return x.segment<3>(motion::kCenter); }
    [[nodiscard]] Vec3 velocity() const { return x.segment<3>(motion::kVelocity); }
    [[nodiscard]] Vec3 deviation() const { return x.segment<3>(motion::kDeviation); }
    [[nodiscard]] Vec3 rate() const { return x.segment<3>(motion::kRate); }
    [[nodiscard]] Eigen::VectorXd extent() const { return x.tail(x.size() - motion::kKinematicDim); }
    [[nodiscard]] UnitQuaternion orientation() const;
    [[nodiscard]] geometry::Pose pose() const { return {center(), orientation()}; }
};

enum class UpdateMode { batch, sequential };

struct FilterConfig {
    double jacobian_rel_step = 1e-6;
    double jacobian_abs_step = 1e-8;
    /// Innovation covariances with a larger condition estimate are reported.
    double max_condition_warn = 1e12;
    UpdateMode update_mode = UpdateMode::batch;

    void validate() const;
};

/// Stacked implicit measurement 0 = h(x) + e, e ~ N(0, R), linearized at the prior mean.
struct PseudoMeasurement {
    Eigen::VectorXd h;   ///< residual at the prior mean
    Eigen::MatrixXd H;   ///< dh/dx at the prior mean
    Eigen::MatrixXd R;   ///< block-diagonal noise covariance
    std::vector<Eigen::Index> block_sizes;  ///< rows per independent noise block
    int skipped_points = 0;
};

class JacobianError : public std::runtime_error {
public:
    explicit JacobianError(const std::string& what) : std::runtime_error(what) {}
};

class UpdateError : public std::runtime_error {
public:
    explicit UpdateError(const std::string& what) : std::runtime_error(what) {}
};

/// Central differences of h at x, step max(rel |x_i|, abs) per component.
/// Throws JacobianError if any evaluation is non-finite.
Eigen::MatrixXd numerical_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& h,
                                   const Eigen::VectorXd& x, const FilterConfig& cfg);

/// x <- F x, P <- F P F^T + Q (symmetrized). Time stamp is left untouched.
TrackerState time_update(const TrackerState& state, const motion::TransitionModel& transition);

/// Transition whose extent block is a scaled identity, exploited to avoid dense
/// products over the extent. extent_q is added to the extent covariance block.
struct StructuredTransition {
    motion::LinearBlock kinematic;   ///< 12x12 (c, v, a, w)
    double extent_gain = 1.0;
    Eigen::MatrixXd extent_q;
};

TrackerState time_update(const TrackerState& state, const StructuredTransition& transition);

struct UpdateDiagnostics {
    /// Smallest reciprocal condition estimate over the factorized innovation covariances.
    double min_rcond = 1.0;
};

/// Pseudo-measurement EKF update toward the zero vector:
/// S = H P H^T + R, K = P H^T S^-1, x += K (0 - h), P -= K H P.
/// Throws UpdateError when S cannot be factorized.
TrackerState measurement_update(const TrackerState& state, const PseudoMeasurement& pm,
                                UpdateMode mode = UpdateMode::batch,
                                UpdateDiagnostics* diagnostics = nullptr);

/// q_ref <- delta_quat(a) (.) q_ref, a <- 0; covariance unchanged.
TrackerState mekf_reset(const TrackerState& state);

/// Smallest eigenvalue of the symmetric part of P.
double min_eigenvalue(const Eigen::MatrixXd& P);

}  // namespace gpeot::filter
