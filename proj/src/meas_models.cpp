#include "gpeot/meas_models.hpp"

#include <cmath>

namespace gpeot::meas {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

geometry::Pose pose_from_kinematics(const Eigen::Ref<const VectorXd>& x, const UnitQuaternion& q_ref) {
    const Vec3 a = x.segment<3>(motion::kDeviation);
    return {x.segment<3>(motion::kCenter), geometry::quat_product(geometry::delta_quat(a), q_ref)};
}

/// Residual of every accepted (plane, point) pair as a function of the state vector.
class FrameResidual {
public:
    struct Entry {
        std::size_t model = 0;
        std::size_t point = 0;
    };

    FrameResidual(const filter::TrackerState& state, const MeasurementFrame& frame,
                  const ExtentModels& models)
        : frame_(frame), models_(models), q_ref_(state.q_ref) {
        const geometry::Pose pose = state.pose();
        const Mat3 A = geometry::rot_matrix(pose.orientation);
        const std::size_t planes = models.kind == TrackerKind::gpeot ? 1 : 3;
        for (std::size_t j = 0; j < planes; ++j) {
            for (std::size_t i = 0; i < frame.points.size(); ++i) {
                const Vec3 d = frame.points[i] - pose.center;
                const double norm = models.kind == TrackerKind::gpeot
                                        ? d.norm()
                                        : (models.projection.planes[j] * (A * d)).norm();
                if (norm > kMinDirectionNorm) {
                    entries_.push_back({j, i});
                } else {
                    ++skipped_;
                }
            }
        }
        set_weights(state.x);
    }

    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    [[nodiscard]] int skipped() const { return skipped_; }
    [[nodiscard]] Index rows_per_entry() const { return models_.kind == TrackerKind::gpeot ? 3 : 2; }
    [[nodiscard]] Index rows() const { return static_cast<Index>(entries_.size()) * rows_per_entry(); }

    /// Weights of the linearization point.
    void set_weights(const VectorXd& x) {
        base_x_ = x;
        base_weights_.clear();
        for (std::size_t j = 0; j < models_.models.size(); ++j) {
            base_weights_.push_back(models_.models[j].weights(extent_block(x, j)));
        }
        weights_ = base_weights_;
    }

    /// Weights of x as an update of the linearization point's weights. The inverse Gram
    /// matrix of a dense basis has huge entries, so recomputing K^-1 f for every perturbed
    /// f would bury the finite differences in rounding noise.
    void set_perturbed_weights(const VectorXd& x) {
        for (std::size_t j = 0; j < models_.models.size(); ++j) {
            const VectorXd df = extent_block(x, j) - extent_block(base_x_, j);
            weights_[j] = base_weights_[j] + models_.models[j].gram_inverse() * df;
        }
    }

    /// Residual with the cached extent weights; only the kinematic part of x is read.
    [[nodiscard]] VectorXd eval(const VectorXd& x) const {
        const geometry::Pose pose = pose_from_kinematics(x, q_ref_);
        const Mat3 A = geometry::rot_matrix(pose.orientation);
        const Index k = rows_per_entry();
        VectorXd h(rows());
        for (std::size_t e = 0; e < entries_.size(); ++e) {
            const auto& entry = entries_[e];
            const auto& model = models_.models[entry.model];
            const Vec3 d = frame_.points[entry.point] - pose.center;
            if (models_.kind == TrackerKind::gpeot) {
                const double n = d.norm();
                const Vec3 p = d / n;
                const double r = model.radius(A * p, weights_[entry.model]);
                h.segment<3>(static_cast<Index>(e) * k) = p * (r - n);
            } else {
                const Eigen::Vector2d mj = models_.projection.planes[entry.model] * (A * d);
                const Eigen::Vector2d p = mj / mj.norm();
                const double r = model.radius(std::atan2(p.y(), p.x()), weights_[entry.model]);
                h.segment<2>(static_cast<Index>(e) * k) = -mj + models_.projection.scale_mean * r * p;
            }
        }
        return h;
    }

    [[nodiscard]] VectorXd eval_full(const VectorXd& x) {
        set_perturbed_weights(x);
        return eval(x);
    }

private:
    const MeasurementFrame& frame_;
    const ExtentModels& models_;
    UnitQuaternion q_ref_;
    std::vector<Entry> entries_;
    [[nodiscard]] VectorXd extent_block(const VectorXd& x, std::size_t j) const {
        return x.segment(motion::kKinematicDim + models_.extent_offset(j),
                         static_cast<Index>(models_.models[j].size()));
    }

    VectorXd base_x_;
    std::vector<VectorXd> base_weights_;
    std::vector<VectorXd> weights_;
    int skipped_ = 0;
};

}  // namespace

std::string_view to_string(TrackerKind kind) {
    return kind == TrackerKind::gpeot ? "gpeot" : "gpeot_p";
}

TrackerKind tracker_kind_from_string(std::string_view name) {
    if (name == "gpeot") return TrackerKind::gpeot;
    if (name == "gpeot_p") return TrackerKind::gpeot_p;
    throw std::invalid_argument("unknown tracker kind: " + std::string(name));
}

ProjectionSetup ProjectionSetup::axis_planes() {
    ProjectionSetup s;
    s.planes[0] << 1, 0, 0, 0, 1, 0;
    s.planes[1] << 1, 0, 0, 0, 0, 1;
    s.planes[2] << 0, 1, 0, 0, 0, 1;
    return s;
}

void ProjectionSetup::validate() const {
    for (const auto& P : planes) {
        if (!(P * P.transpose()).isApprox(Eigen::Matrix2d::Identity(), 1e-9)) {
            throw std::invalid_argument("ProjectionSetup: plane matrix rows must be orthonormal");
        }
    }
    if (!(scale_var >= 0.0)) throw std::invalid_argument("ProjectionSetup: scale_var must be >= 0");
    if (!std::isfinite(scale_mean)) {
        throw std::invalid_argument("ProjectionSetup: scale_mean must be finite");
    }
    for (const auto kind : kernel_kinds) {
        if (kind == gp::KernelKind::geodesic3d) {
            throw std::invalid_argument("ProjectionSetup: plane kernels must be periodic");
        }
    }
}

Index ExtentModels::extent_dim() const {
    Index n = 0;
    for (const auto& m : models) n += static_cast<Index>(m.size());
    return n;
}

Index ExtentModels::extent_offset(std::size_t j) const {
    Index off = 0;
    for (std::size_t i = 0; i < j; ++i) off += static_cast<Index>(models[i].size());
    return off;
}

VectorXd ExtentModels::prior_mean() const {
    VectorXd mu(extent_dim());
    for (std::size_t j = 0; j < models.size(); ++j) {
        mu.segment(extent_offset(j), static_cast<Index>(models[j].size())) = models[j].prior_mean();
    }
    return mu;
}

MatrixXd ExtentModels::prior_cov() const {
    const Index n = extent_dim();
    MatrixXd P = MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < models.size(); ++j) {
        const auto m = static_cast<Index>(models[j].size());
        P.block(extent_offset(j), extent_offset(j), m, m) = models[j].prior_cov();
    }
    return P;
}

Vec3 to_local(const Vec3& m, const Vec3& c, const UnitQuaternion& q) {
    return geometry::rot_matrix(q) * (m - c);
}

PointResidual gpeot_point_residual(const geometry::Pose& pose, const VectorXd& f, const Vec3& m,
                                   const gp::GpExtentModel& model, const Mat3& noise_cov) {
    const Vec3 d = m - pose.center;
    const double n = d.norm();
    if (!(n > kMinDirectionNorm)) {
        throw geometry::DegenerateDirectionError("gpeot_point_residual: measurement at the center");
    }
    const Vec3 p = d / n;
    const Vec3 local = to_local(m, pose.center, pose.orientation) / n;
    const Vec3 u = geometry::spherical_to_cartesian(geometry::cart_to_spherical(local));
    const gp::GpProjection proj = model.project(u);
    // k(u, U) K^-1 (f - mu) is smooth in u; the equal h_row f + c is not at rounding level.
    const double r = model.radius(u, model.weights(f));

    PointResidual out;
    out.h = -m + pose.center + p * r;
    out.jac_extent = p * proj.h_row;
    out.R = p * proj.r_f * p.transpose() + noise_cov;
    return out;
}

PointResidual gpeot_point_residual(const filter::TrackerState& state, const Vec3& m,
                                   const gp::GpExtentModel& model, const Mat3& noise_cov) {
    return gpeot_point_residual(state.pose(), state.extent(), m, model, noise_cov);
}

PointResidual gpeotp_point_residual(const geometry::Pose& pose, const VectorXd& f_j, const Vec3& m,
                                    std::size_t plane_index, const ProjectionSetup& setup,
                                    const gp::GpExtentModel& model_j, const Mat3& noise_cov) {
    if (plane_index >= setup.planes.size()) {
        throw std::out_of_range("gpeotp_point_residual: plane index out of range");
    }
    const PlaneMatrix& Pj = setup.planes[plane_index];
    const Mat3 A = geometry::rot_matrix(pose.orientation);
    const Eigen::Vector2d mj = Pj * (A * (m - pose.center));
    const double n = mj.norm();
    if (!(n > kMinDirectionNorm)) {
        throw geometry::DegenerateDirectionError(
            "gpeotp_point_residual: measurement projects onto the plane origin");
    }
    const Eigen::Vector2d p = mj / n;
    const double theta = std::atan2(p.y(), p.x());
    const gp::GpProjection proj = model_j.project(theta);
    const double r = model_j.radius(theta, model_j.weights(f_j));

    PointResidual out;
    out.h = -mj + setup.scale_mean * r * p;
    out.jac_extent = setup.scale_mean * p * proj.h_row;
    const Eigen::Vector2d pr = p * r;
    const PlaneMatrix PA = Pj * A;
    out.R = setup.scale_var * pr * pr.transpose() + p * proj.r_f * p.transpose() +
            PA * noise_cov * PA.transpose();
    return out;
}

PointResidual gpeotp_point_residual(const filter::TrackerState& state, const Vec3& m,
                                    std::size_t plane_index, const ExtentModels& models,
                                    const Mat3& noise_cov) {
    const auto& model = models.models.at(plane_index);
    const VectorXd f_j = state.x.segment(motion::kKinematicDim + models.extent_offset(plane_index),
                                         static_cast<Index>(model.size()));
    return gpeotp_point_residual(state.pose(), f_j, m, plane_index, models.projection, model,
                                 noise_cov);
}

filter::PseudoMeasurement build_frame_pseudo_meas(const filter::TrackerState& state,
                                                  const MeasurementFrame& frame,
                                                  const ExtentModels& models,
                                                  const filter::FilterConfig& cfg, JacobianMode mode) {
    const std::size_t expected = models.kind == TrackerKind::gpeot ? 1 : 3;
    if (models.models.size() != expected) {
        throw std::invalid_argument("build_frame_pseudo_meas: wrong number of extent models");
    }
    if (state.dim() != motion::kKinematicDim + models.extent_dim()) {
        throw std::invalid_argument("build_frame_pseudo_meas: state size does not match the models");
    }

    FrameResidual residual(state, frame, models);
    filter::PseudoMeasurement pm;
    pm.skipped_points = residual.skipped();
    const Index rows = residual.rows();
    if (rows == 0) {
        throw EmptyFrameError("build_frame_pseudo_meas: no usable measurement in frame");
    }
    const Index k = residual.rows_per_entry();
    const Index dim = state.dim();

    pm.h = residual.eval(state.x);
    pm.R = MatrixXd::Zero(rows, rows);
    pm.block_sizes.assign(residual.entries().size(), k);

    if (mode == JacobianMode::full_numeric) {
        pm.H = filter::numerical_jacobian([&](const VectorXd& x) { return residual.eval_full(x); },
                                          state.x, cfg);
        residual.set_perturbed_weights(state.x);
    } else {
        pm.H = MatrixXd::Zero(rows, dim);
        const VectorXd kin = state.x.head(motion::kKinematicDim);
        VectorXd x = state.x;
        const MatrixXd Jk = filter::numerical_jacobian(
            [&](const VectorXd& xk) {
                x.head(motion::kKinematicDim) = xk;
                return residual.eval(x);
            },
            kin, cfg);
        pm.H.leftCols(motion::kKinematicDim) = Jk;
    }

    const geometry::Pose pose = state.pose();
    for (std::size_t e = 0; e < residual.entries().size(); ++e) {
        const auto& entry = residual.entries()[e];
        const Vec3& m = frame.points[entry.point];
        const Index row = static_cast<Index>(e) * k;
        const auto& model = models.models[entry.model];
        const Index off = motion::kKinematicDim + models.extent_offset(entry.model);
        const auto n = static_cast<Index>(model.size());
        const PointResidual pr =
            models.kind == TrackerKind::gpeot
                ? gpeot_point_residual(pose, state.x.segment(off, n), m, model, frame.noise_cov)
                : gpeotp_point_residual(pose, state.x.segment(off, n), m, entry.model,
                                        models.projection, model, frame.noise_cov);
        pm.R.block(row, row, k, k) = 0.5 * (pr.R + pr.R.transpose());
        if (mode == JacobianMode::kinematic_numeric) {
            pm.H.block(row, off, k, n) = pr.jac_extent;
        }
    }
    return pm;
}

}  // namespace gpeot::meas
