#pragma once

#include "gpeot/geometry.hpp"
#include "gpeot/gp_kernels.hpp"
#include "gpeot/meas_models.hpp"
#include "gpeot/sim.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpeot::eval {

using geometry::Pose;
using geometry::UnitQuaternion;
using geometry::Vec3;

/// Default clamp for non-positive posterior radii [m].
inline constexpr double kMinRadius = 1e-3;

class UndefinedIouError : public std::runtime_error {
public:
    explicit UndefinedIouError(const std::string& what) : std::runtime_error(what) {}
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    /// Signed volume by the divergence theorem; positive for outward winding.
    [[nodiscard]] double volume() const;
    [[nodiscard]] int euler_characteristic() const;
    [[nodiscard]] Vec3 bounds_min() const;
    [[nodiscard]] Vec3 bounds_max() const;
};

/// Icosphere vertex i scaled by max(f_i, r_min) along its direction and posed.
TriangleMesh radial_to_mesh(const Eigen::VectorXd& f, const gp::BasisGrid& grid, const Pose& pose,
                            double r_min = kMinRadius);

/// Axis-aligned grid; cell (i, j, k) is centered at origin + (i + 1/2, j + 1/2, k + 1/2) cell.
struct GridSpec {
    Vec3 origin = Vec3::Zero();
    double cell = 1.0;
    std::array<int, 3> dims{0, 0, 0};

    /// Smallest grid with cell size `cell` covering [lo, hi].
    static GridSpec covering(const Vec3& lo, const Vec3& hi, double cell);

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t index(int i, int j, int k) const;
    [[nodiscard]] Vec3 center(int i, int j, int k) const;
    [[nodiscard]] bool same_as(const GridSpec& other) const;
};

struct VoxelGrid {
    GridSpec spec;
    std::vector<std::uint8_t> occupancy;

    explicit VoxelGrid(const GridSpec& s) : spec(s), occupancy(s.size(), 0) {}

    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] double volume() const;
    [[nodiscard]] bool at(int i, int j, int k) const { return occupancy[spec.index(i, j, k)] != 0; }
};

/// Analytic inside-test of the posed shape at each cell center.
VoxelGrid voxelize(const sim::ShapeSpec& shape, const Pose& pose, const GridSpec& spec);
/// Ray parity along x per (y, z) column; the mesh must be closed.
VoxelGrid voxelize(const TriangleMesh& mesh, const GridSpec& spec);

/// |A n B| / |A u B| by cell counts; both grids must share the same spec.
/// Throws UndefinedIouError for an empty union.
double iou(const VoxelGrid& a, const VoxelGrid& b);

/// Diagonal of the shape's bounding box divided by 100.
double default_cell_size(const sim::ShapeSpec& shape);

/// IOU of the posed true shape and a global-frame mesh on a common grid covering both.
double iou(const sim::ShapeSpec& true_shape, const Pose& true_pose, const TriangleMesh& est_mesh,
           double cell_size);

/// Three closed contours, one per projection plane, sampled at equidistant polar angles.
struct ProjectionContours {
    std::array<meas::PlaneMatrix, 3> planes;
    std::array<std::vector<double>, 3> radii;

    /// Periodic linear interpolation of contour j at polar angle theta.
    [[nodiscard]] double radius(std::size_t j, double theta) const;
    /// Object-frame point inside every contour after projection.
    [[nodiscard]] bool inside(const Vec3& local) const;
    /// Per-axis half-widths of a box containing every consistent point.
    [[nodiscard]] Vec3 half_extent() const;
};

/// Contours of the posterior-mean radial functions, clamped at r_min.
ProjectionContours contours_from_extent(const meas::ExtentModels& models, const Eigen::VectorXd& f,
                                        int samples = 720, double r_min = kMinRadius);

/// Carves the object-frame box of the contours' extents: a cell survives iff its center
/// projects inside all three contours.
VoxelGrid reconstruct_from_projections(const ProjectionContours& contours, double cell_size);
/// Same carving evaluated at the cell centers of a global grid, with the contours posed.
VoxelGrid voxelize(const ProjectionContours& contours, const Pose& pose, const GridSpec& spec);

double iou(const sim::ShapeSpec& true_shape, const Pose& true_pose,
           const ProjectionContours& contours, const Pose& est_pose, double cell_size);

/// sqrt(mean |est_k - truth_k|^2). Throws std::invalid_argument on a length mismatch.
double velocity_rmse(const std::vector<Vec3>& est, const std::vector<Vec3>& truth);

struct OrientationErrors {
    std::vector<double> angle;  ///< rotation angle of est (.) conj(truth) per frame [rad]
    double rate_rmse = 0.0;     ///< [rad/s]
};

std::vector<double> orientation_angle_errors(const std::vector<UnitQuaternion>& est,
                                             const std::vector<UnitQuaternion>& truth);
OrientationErrors orientation_errors(const std::vector<UnitQuaternion>& est_q,
                                     const std::vector<UnitQuaternion>& truth_q,
                                     const std::vector<Vec3>& est_rate,
                                     const std::vector<Vec3>& truth_rate);

/// Metrics of one Monte-Carlo run. IOU entries are NaN for frames that were not evaluated.
struct RunEvaluation {
    std::vector<double> t;
    std::vector<double> iou;
    std::vector<double> orientation_error;
    double velocity_rmse = 0.0;
    double rate_rmse = 0.0;
    double steady_iou = 0.0;  ///< mean IOU over the steady-state window
};

struct EvaluationReport {
    std::vector<RunEvaluation> runs;
    std::vector<double> t;
    std::vector<double> iou_mean;
    std::vector<double> iou_std;
    double steady_iou_mean = 0.0;
    double steady_iou_std = 0.0;
    double velocity_rmse_mean = 0.0;
    double rate_rmse_mean = 0.0;

    /// Fills the per-frame and summary statistics from `runs`.
    void summarize();
};

}  // namespace gpeot::eval
