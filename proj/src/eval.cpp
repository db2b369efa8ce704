#include "gpeot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

namespace gpeot::eval {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void extend(Vec3& lo, Vec3& hi, const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
}

/// Global box of a posed object-frame box.
std::pair<Vec3, Vec3> posed_box(const Vec3& lo_local, const Vec3& hi_local, const Pose& pose) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int corner = 0; corner < 8; ++corner) {
        const Vec3 p((corner & 1) ? hi_local[0] : lo_local[0], (corner & 2) ? hi_local[1] : lo_local[1],
                     (corner & 4) ? hi_local[2] : lo_local[2]);
        extend(lo, hi, pose.to_global(p));
    }
    return {lo, hi};
}

template <typename Pred>
VoxelGrid voxelize_predicate(const GridSpec& spec, Pred&& inside) {
    VoxelGrid grid(spec);
    for (int k = 0; k < spec.dims[2]; ++k) {
        for (int j = 0; j < spec.dims[1]; ++j) {
            for (int i = 0; i < spec.dims[0]; ++i) {
                if (inside(spec.center(i, j, k))) grid.occupancy[spec.index(i, j, k)] = 1;
            }
        }
    }
    return grid;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (const double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

double TriangleMesh::volume() const {
    double v = 0.0;
    for (const auto& f : faces) {
        v += vertices[f[0]].dot(vertices[f[1]].cross(vertices[f[2]]));
    }
    return v / 6.0;
}

int TriangleMesh::euler_characteristic() const {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& f : faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e], b = f[(e + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) +
           static_cast<int>(faces.size());
}

Vec3 TriangleMesh::bounds_min() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    for (const Vec3& v : vertices) lo = lo.cwiseMin(v);
    return lo;
}

Vec3 TriangleMesh::bounds_max() const {
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
    for (const Vec3& v : vertices) hi = hi.cwiseMax(v);
    return hi;
}

TriangleMesh radial_to_mesh(const Eigen::VectorXd& f, const gp::BasisGrid& grid, const Pose& pose,
                            double r_min) {
    if (grid.kind != gp::BasisGrid::Kind::sphere) {
        throw std::invalid_argument("radial_to_mesh: grid must be a sphere grid");
    }
    if (static_cast<std::size_t>(f.size()) != grid.size()) {
        throw std::invalid_argument("radial_to_mesh: coefficient count does not match the grid");
    }
    TriangleMesh mesh;
    mesh.vertices.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = std::max(f[static_cast<Eigen::Index>(i)], r_min);
        mesh.vertices.push_back(pose.to_global(r * grid.directions[i]));
    }
    mesh.faces = grid.faces;
    return mesh;
}

GridSpec GridSpec::covering(const Vec3& lo, const Vec3& hi, double cell) {
    if (!(cell > 0.0)) throw std::invalid_argument("GridSpec: cell size must be > 0");
    if (!lo.allFinite() || !hi.allFinite()) throw std::invalid_argument("GridSpec: non-finite bounds");
    GridSpec s;
    s.origin = lo;
    s.cell = cell;
    for (int a = 0; a < 3; ++a) {
        s.dims[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / cell)));
    }
    return s;
}

std::size_t GridSpec::size() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
}

std::size_t GridSpec::index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(dims[1]) + static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(dims[0]) +
           static_cast<std::size_t>(i);
}

Vec3 GridSpec::center(int i, int j, int k) const {
    return origin + cell * Vec3(i + 0.5, j + 0.5, k + 0.5);
}

bool GridSpec::same_as(const GridSpec& other) const {
    return dims == other.dims && cell == other.cell && origin == other.origin;
}

std::size_t VoxelGrid::count() const {
    return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
}

double VoxelGrid::volume() const {
    return static_cast<double>(count()) * spec.cell * spec.cell * spec.cell;
}

VoxelGrid voxelize(const sim::ShapeSpec& shape, const Pose& pose, const GridSpec& spec) {
    const geometry::Mat3 A = geometry::rot_matrix(pose.orientation);
    const Vec3 lo = shape.bounds_min(), hi = shape.bounds_max();
    return voxelize_predicate(spec, [&](const Vec3& c) {
        const Vec3 local = A * (c - pose.center);
        if ((local.array() < lo.array()).any() || (local.array() > hi.array()).any()) return false;
        return shape.inside(local);
    });
}

VoxelGrid voxelize(const TriangleMesh& mesh, const GridSpec& spec) {
    VoxelGrid grid(spec);
    const int ny = spec.dims[1], nz = spec.dims[2];
    std::vector<std::vector<double>> hits(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz));
    // A sub-cell offset keeps rays off mesh edges and vertices that sit exactly on cell centers.
    const double dy = 1.3e-7 * spec.cell, dz = 0.7e-7 * spec.cell;

    for (const auto& f : mesh.faces) {
        const Vec3& A = mesh.vertices[f[0]];
        const Vec3& B = mesh.vertices[f[1]];
        const Vec3& C = mesh.vertices[f[2]];
        const double den = (B[1] - A[1]) * (C[2] - A[2]) - (C[1] - A[1]) * (B[2] - A[2]);
        if (den == 0.0) continue;
        const double ymin = std::min({A[1], B[1], C[1]}), ymax = std::max({A[1], B[1], C[1]});
        const double zmin = std::min({A[2], B[2], C[2]}), zmax = std::max({A[2], B[2], C[2]});
        const int j0 = std::max(0, static_cast<int>(std::floor((ymin - spec.origin[1]) / spec.cell - 0.5)));
        const int j1 = std::min(ny - 1, static_cast<int>(std::ceil((ymax - spec.origin[1]) / spec.cell - 0.5)));
        const int k0 = std::max(0, static_cast<int>(std::floor((zmin - spec.origin[2]) / spec.cell - 0.5)));
        const int k1 = std::min(nz - 1, static_cast<int>(std::ceil((zmax - spec.origin[2]) / spec.cell - 0.5)));
        for (int k = k0; k <= k1; ++k) {
            const double z = spec.origin[2] + (k + 0.5) * spec.cell + dz;
            for (int j = j0; j <= j1; ++j) {
                const double y = spec.origin[1] + (j + 0.5) * spec.cell + dy;
                const double w1 = ((y - A[1]) * (C[2] - A[2]) - (C[1] - A[1]) * (z - A[2])) / den;
                const double w2 = ((B[1] - A[1]) * (z - A[2]) - (y - A[1]) * (B[2] - A[2])) / den;
                const double w0 = 1.0 - w1 - w2;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                hits[static_cast<std::size_t>(k) * ny + j].push_back(w0 * A[0] + w1 * B[0] + w2 * C[0]);
            }
        }
    }

    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            auto& xs = hits[static_cast<std::size_t>(k) * ny + j];
            if (xs.size() < 2) continue;
            std::sort(xs.begin(), xs.end());
            for (std::size_t p = 0; p + 1 < xs.size(); p += 2) {
                const int i0 = std::max(0, static_cast<int>(std::ceil((xs[p] - spec.origin[0]) / spec.cell - 0.5)));
                const int i1 = std::min(spec.dims[0] - 1,
                                        static_cast<int>(std::floor((xs[p + 1] - spec.origin[0]) / spec.cell - 0.5)));
                for (int i = i0; i <= i1; ++i) grid.occupancy[spec.index(i, j, k)] = 1;
            }
        }
    }
    return grid;
}

double iou(const VoxelGrid& a, const VoxelGrid& b) {
    if (!a.spec.same_as(b.spec)) throw std::invalid_argument("iou: grids differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.occupancy.size(); ++i) {
        const bool x = a.occupancy[i] != 0, y = b.occupancy[i] != 0;
        inter += (x && y) ? 1 : 0;
        uni += (x || y) ? 1 : 0;
    }
    if (uni == 0) throw UndefinedIouError("iou: both volumes are empty");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double default_cell_size(const sim::ShapeSpec& shape) {
    return (shape.bounds_max() - shape.bounds_min()).norm() / 100.0;
}

double iou(const sim::ShapeSpec& true_shape, const Pose& true_pose, const TriangleMesh& est_mesh,
           double cell_size) {
    auto [lo, hi] = posed_box(true_shape.bounds_min(), true_shape.bounds_max(), true_pose);
    if (!est_mesh.vertices.empty()) {
        extend(lo, hi, est_mesh.bounds_min());
        extend(lo, hi, est_mesh.bounds_max());
    }
    const GridSpec spec = GridSpec::covering(lo, hi, cell_size);
    return iou(voxelize(true_shape, true_pose, spec), voxelize(est_mesh, spec));
}

double ProjectionContours::radius(std::size_t j, double theta) const {
    const auto& r = radii[j];
    if (r.empty()) return 0.0;
    const double n = static_cast<double>(r.size());
    double pos = theta / kTwoPi * n;
    pos -= n * std::floor(pos / n);
    const auto i0 = std::min(static_cast<std::size_t>(pos), r.size() - 1);
    const double frac = pos - static_cast<double>(i0);
    return (1.0 - frac) * r[i0] + frac * r[(i0 + 1) % r.size()];
}

bool ProjectionContours::inside(const Vec3& local) const {
    for (std::size_t j = 0; j < 3; ++j) {
        if (radii[j].empty()) return false;
        const Eigen::Vector2d m = planes[j] * local;
        const double rho = m.norm();
        if (rho == 0.0) continue;
        if (rho > radius(j, std::atan2(m[1], m[0]))) return false;
    }
    return true;
}

Vec3 ProjectionContours::half_extent() const {
    double r_all = 0.0;
    std::array<std::array<double, 2>, 3> ext{};
    for (std::size_t j = 0; j < 3; ++j) {
        const auto& r = radii[j];
        for (std::size_t s = 0; s < r.size(); ++s) {
            const double th = kTwoPi * static_cast<double>(s) / static_cast<double>(r.size());
            ext[j][0] = std::max(ext[j][0], std::abs(r[s] * std::cos(th)));
            ext[j][1] = std::max(ext[j][1], std::abs(r[s] * std::sin(th)));
            r_all = std::max(r_all, r[s]);
        }
    }
    Vec3 half = Vec3::Constant(r_all);
    for (int axis = 0; axis < 3; ++axis) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (int row = 0; row < 2; ++row) {
                if (std::abs(planes[j](row, axis)) > 1.0 - 1e-12) {
                    half[axis] = std::min(half[axis], ext[j][static_cast<std::size_t>(row)]);
                }
            }
        }
    }
    return half;
}

ProjectionContours contours_from_extent(const meas::ExtentModels& models, const Eigen::VectorXd& f,
                                        int samples, double r_min) {
    if (models.kind != meas::TrackerKind::gpeot_p || models.models.size() != 3) {
        throw std::invalid_argument("contours_from_extent: projection models required");
    }
    if (f.size() != models.extent_dim()) {
        throw std::invalid_argument("contours_from_extent: coefficient count mismatch");
    }
    if (samples < 3) throw std::invalid_argument("contours_from_extent: samples must be >= 3");
    ProjectionContours out;
    out.planes = models.projection.planes;
    for (std::size_t j = 0; j < 3; ++j) {
        const auto& model = models.models[j];
        const Eigen::VectorXd w =
            model.weights(f.segment(models.extent_offset(j), static_cast<Eigen::Index>(model.size())));
        out.radii[j].resize(static_cast<std::size_t>(samples));
        for (int s = 0; s < samples; ++s) {
            const double th = kTwoPi * s / samples;
            out.radii[j][static_cast<std::size_t>(s)] = std::max(model.radius(th, w), r_min);
        }
    }
    return out;
}

VoxelGrid reconstruct_from_projections(const ProjectionContours& contours, double cell_size) {
    const Vec3 half = contours.half_extent() + Vec3::Constant(cell_size);
    const GridSpec spec = GridSpec::covering(-half, half, cell_size);
    return voxelize_predicate(spec, [&](const Vec3& c) { return contours.inside(c); });
}

VoxelGrid voxelize(const ProjectionContours& contours, const Pose& pose, const GridSpec& spec) {
    const geometry::Mat3 A = geometry::rot_matrix(pose.orientation);
    const Vec3 half = contours.half_extent() + Vec3::Constant(spec.cell);
    return voxelize_predicate(spec, [&](const Vec3& c) {
        const Vec3 local = A * (c - pose.center);
        if ((local.cwiseAbs().array() > half.array()).any()) return false;
        return contours.inside(local);
    });
}

double iou(const sim::ShapeSpec& true_shape, const Pose& true_pose,
           const ProjectionContours& contours, const Pose& est_pose, double cell_size) {
    auto [lo, hi] = posed_box(true_shape.bounds_min(), true_shape.bounds_max(), true_pose);
    const Vec3 half = contours.half_extent() + Vec3::Constant(cell_size);
    const auto [elo, ehi] = posed_box(-half, half, est_pose);
    extend(lo, hi, elo);
    extend(lo, hi, ehi);
    const GridSpec spec = GridSpec::covering(lo, hi, cell_size);
    return iou(voxelize(true_shape, true_pose, spec), voxelize(contours, est_pose, spec));
}

double velocity_rmse(const std::vector<Vec3>& est, const std::vector<Vec3>& truth) {
    if (est.size() != truth.size()) throw std::invalid_argument("velocity_rmse: length mismatch");
    if (est.empty()) throw std::invalid_argument("velocity_rmse: empty sequences");
    double s = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k) s += (est[k] - truth[k]).squaredNorm();
    return std::sqrt(s / static_cast<double>(est.size()));
}

std::vector<double> orientation_angle_errors(const std::vector<UnitQuaternion>& est,
                                             const std::vector<UnitQuaternion>& truth) {
    if (est.size() != truth.size()) throw std::invalid_argument("orientation_errors: length mismatch");
    std::vector<double> out;
    out.reserve(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) {
        const UnitQuaternion d = geometry::quat_product(est[k], truth[k].conjugate()).canonical();
        out.push_back(2.0 * std::atan2(d.vec().norm(), d.scalar()));
    }
    return out;
}

OrientationErrors orientation_errors(const std::vector<UnitQuaternion>& est_q,
                                     const std::vector<UnitQuaternion>& truth_q,
                                     const std::vector<Vec3>& est_rate,
                                     const std::vector<Vec3>& truth_rate) {
    OrientationErrors out;
    out.angle = orientation_angle_errors(est_q, truth_q);
    if (est_rate.size() != truth_rate.size()) {
        throw std::invalid_argument("orientation_errors: rate length mismatch");
    }
    out.rate_rmse = est_rate.empty() ? 0.0 : velocity_rmse(est_rate, truth_rate);
    return out;
}

void EvaluationReport::summarize() {
    std::size_t frames = 0;
    for (const auto& r : runs) frames = std::max(frames, r.iou.size());
    t.assign(frames, std::numeric_limits<double>::quiet_NaN());
    iou_mean.assign(frames, std::numeric_limits<double>::quiet_NaN());
    iou_std.assign(frames, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < frames; ++k) {
        std::vector<double> vals;
        for (const auto& r : runs) {
            if (k < r.t.size()) t[k] = r.t[k];
            if (k < r.iou.size() && !std::isnan(r.iou[k])) vals.push_back(r.iou[k]);
        }
        if (!vals.empty()) {
            iou_mean[k] = mean_of(vals);
            iou_std[k] = std_of(vals);
        }
    }
    std::vector<double> steady, vel, rate;
    for (const auto& r : runs) {
        steady.push_back(r.steady_iou);
        vel.push_back(r.velocity_rmse);
        rate.push_back(r.rate_rmse);
    }
    steady_iou_mean = mean_of(steady);
    steady_iou_std = std_of(steady);
    velocity_rmse_mean = mean_of(vel);
    rate_rmse_mean = mean_of(rate);
}

}  // namespace gpeot::eval
