#pragma once

#include "gpeot/ekf.hpp"
#include "gpeot/geometry.hpp"
#include "gpeot/gp_kernels.hpp"

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gpeot::meas {

using geometry::Mat3;
using geometry::UnitQuaternion;
using geometry::Vec3;
using PlaneMatrix = Eigen::Matrix<double, 2, 3>;

/// Points closer than this to the (projected) center carry no direction.
inline constexpr double kMinDirectionNorm = 1e-6;

struct MeasurementFrame {
    double t = 0.0;
    std::vector<Vec3> points;
    Mat3 noise_cov = 0.01 * Mat3::Identity();
};

enum class TrackerKind { gpeot, gpeot_p };

std::string_view to_string(TrackerKind kind);
TrackerKind tracker_kind_from_string(std::string_view name);

struct ProjectionSetup {
    std::array<PlaneMatrix, 3> planes;
    std::array<gp::KernelKind, 3> kernel_kinds{gp::KernelKind::periodic2pi, gp::KernelKind::periodic2pi,
                                               gp::KernelKind::periodic2pi};
    double scale_mean = 5.0 / 6.0;
    double scale_var = 1.0 / 18.0;

    /// xy, xz and yz planes of the object frame.
    static ProjectionSetup axis_planes();
    void validate() const;
};

/// Extent models of one tracker: one sphere model (gpeot) or one circle model per plane (gpeot_p).
struct ExtentModels {
    TrackerKind kind = TrackerKind::gpeot;
    std::vector<gp::GpExtentModel> models;
    ProjectionSetup projection = ProjectionSetup::axis_planes();

    [[nodiscard]] Eigen::Index extent_dim() const;
    /// Offset of model j's coefficients inside the extent vector.
    [[nodiscard]] Eigen::Index extent_offset(std::size_t j) const;
    [[nodiscard]] Eigen::VectorXd prior_mean() const;
    [[nodiscard]] Eigen::MatrixXd prior_cov() const;
};

/// One point's contribution: residual, its Jacobian w.r.t. the model's extent block,
/// and the noise covariance of the residual.
struct PointResidual {
    Eigen::VectorXd h;
    Eigen::MatrixXd jac_extent;
    Eigen::MatrixXd R;
};

/// rot_matrix(q) (m - c).
Vec3 to_local(const Vec3& m, const Vec3& c, const UnitQuaternion& q);

/// Radial model: h = -m + c + p (H(gamma) f + c(gamma)), p = (m - c)/|m - c|,
/// R = p r_f p^T + noise_cov. Throws geometry::DegenerateDirectionError when |m - c| is tiny.
PointResidual gpeot_point_residual(const geometry::Pose& pose, const Eigen::VectorXd& f,
                                   const Vec3& m, const gp::GpExtentModel& model,
                                   const Mat3& noise_cov);
PointResidual gpeot_point_residual(const filter::TrackerState& state, const Vec3& m,
                                   const gp::GpExtentModel& model, const Mat3& noise_cov);

/// Projection model on plane j: m_j = P_j rot_matrix(q)(m - c), p = m_j/|m_j|,
/// h = -m_j + mu_s p (H(theta) f_j + c(theta)),
/// R = sigma_s^2 (p r)(p r)^T + p r_f p^T + P_j rot_matrix(q) noise_cov rot_matrix(q)^T P_j^T.
PointResidual gpeotp_point_residual(const geometry::Pose& pose, const Eigen::VectorXd& f_j,
                                    const Vec3& m, std::size_t plane_index,
                                    const ProjectionSetup& setup, const gp::GpExtentModel& model_j,
                                    const Mat3& noise_cov);
PointResidual gpeotp_point_residual(const filter::TrackerState& state, const Vec3& m,
                                    std::size_t plane_index, const ExtentModels& models,
                                    const Mat3& noise_cov);

class EmptyFrameError : public std::runtime_error {
public:
    explicit EmptyFrameError(const std::string& what) : std::runtime_error(what) {}
};

enum class JacobianMode {
    /// Kinematic columns by central differences; extent columns exact (h is linear in f).
    kinematic_numeric,
    /// Every column by central differences.
    full_numeric,
};

/// Stacks the per-point residuals of one frame at the state's mean. gpeot rows are
/// point-major (3 per point); gpeot_p rows are plane-major (2 per point per plane).
/// Degenerate points are skipped and counted. Throws EmptyFrameError if nothing remains.
filter::PseudoMeasurement build_frame_pseudo_meas(const filter::TrackerState& state,
                                                  const MeasurementFrame& frame,
                                                  const ExtentModels& models,
                                                  const filter::FilterConfig& cfg,
                                                  JacobianMode mode = JacobianMode::kinematic_numeric);

}  // namespace gpeot::meas
