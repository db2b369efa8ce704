#pragma once

#include "gpeot/geometry.hpp"

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gpeot::motion {

using geometry::Vec3;

/// Offsets of the kinematic sub-vectors in the joint state (c, v, a, w, f...).
inline constexpr Eigen::Index kCenter = 0;
inline constexpr Eigen::Index kVelocity = 3;
inline constexpr Eigen::Index kDeviation = 6;
inline constexpr Eigen::Index kRate = 9;
inline constexpr Eigen::Index kKinematicDim = 12;

struct KinematicState {
    Vec3 c = Vec3::Zero();  ///< center [m]
    Vec3 v = Vec3::Zero();  ///< velocity [m/s]
    Vec3 a = Vec3::Zero();  ///< Rodrigues orientation deviation
    Vec3 w = Vec3::Zero();  ///< angular rate [rad/s]

    [[nodiscard]] Eigen::Matrix<double, 12, 1> to_vector() const;
    static KinematicState from_vector(const Eigen::Ref<const Eigen::VectorXd>& x);
};

enum class ExtentDynamics { max_entropy, forgetting };

std::string_view to_string(ExtentDynamics kind);
ExtentDynamics extent_dynamics_from_string(std::string_view name);

struct ProcessNoiseConfig {
    double sigma_c = 0.1;          ///< translational noise [m/s^1.5]
    double sigma_alpha = 0.1;      ///< rotational acceleration std [rad/s^2]
    Vec3 alpha_axis_mask = Vec3::Ones();
    double lambda = 0.99;          ///< maximum-entropy factor in (0, 1]
    double forgetting_alpha = 1e-4;
    ExtentDynamics extent_dynamics = ExtentDynamics::max_entropy;

    void validate() const;
};

/// One diagonal block (F, Q) of the transition model.
struct LinearBlock {
    Eigen::MatrixXd F;
    Eigen::MatrixXd Q;
};

struct TransitionModel {
    Eigen::MatrixXd F;
    Eigen::MatrixXd Q;
};

class AssemblyError : public std::runtime_error {
public:
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

/// Nearly-constant-velocity model for (c, v):
/// F = [[1, T], [0, 1]] (x) I3,  Q = [[T^3/3, T^2/2], [T^2/2, T]] (x) sigma_c^2 I3.
LinearBlock translational_fq(double T, double sigma_c);

/// Discretized rotational model for (a, w), linearized at w_hat with a = 0:
/// A = [[-[w_hat x]/2, I], [0, 0]],  F = exp(A T),  G = (int_0^T exp(A t) dt) [0; I],
/// Q = G diag(sigma_alpha^2 mask) G^T.
LinearBlock rotational_fq(const Vec3& w_hat, double T, double sigma_alpha,
                          const Vec3& axis_mask = Vec3::Ones());

/// (1/lambda - 1) P_ff: the predicted extent covariance becomes P_ff / lambda.
Eigen::MatrixXd extent_q_max_entropy(const Eigen::MatrixXd& P_ff, double lambda);

/// F = exp(-alpha T) I,  Q = (1 - exp(-2 alpha T)) K(U, U).
LinearBlock extent_fq_forgetting(double alpha, double T, const Eigen::MatrixXd& prior_cov);

/// Block-diagonal F and Q in the order given. Throws AssemblyError on non-square
/// or mismatched blocks.
TransitionModel assemble_transition(std::span<const LinearBlock> blocks);

}  // namespace gpeot::motion
