#include "gpeot/eval.hpp"
#include "gpeot/tracker.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace gpeot::eval;
using gpeot::sim::ShapeSpec;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

const gpeot::gp::BasisGrid& sphere3() {
    static const gpeot::gp::BasisGrid g = gpeot::gp::make_sphere_grid(3);
    return g;
}

VectorXd constant_f(double r) { return VectorXd::Constant(static_cast<Eigen::Index>(sphere3().size()), r); }

ProjectionContours constant_contours(double r, int samples = 720) {
    ProjectionContours c;
    c.planes = gpeot::meas::ProjectionSetup::axis_planes().planes;
    for (auto& radii : c.radii) radii.assign(static_cast<std::size_t>(samples), r);
    return c;
}

/// Radius of a centered square of half-edge a along polar angle theta.
double square_radius(double a, double theta) {
    return a / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
}

Pose some_pose() { return {Vec3(4.0, -2.0, 1.0), UnitQuaternion(0.2, -0.1, 0.4, 0.9)}; }

}  // namespace

TEST(RadialMesh, UnitFunctionGivesUnitSphere) {
    const TriangleMesh m = radial_to_mesh(constant_f(1.0), sphere3(), Pose{});
    EXPECT_EQ(m.euler_characteristic(), 2);
    for (const Vec3& v : m.vertices) EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    // The inscribed polyhedron slightly undershoots the ball.
    EXPECT_LT(m.volume(), 4.0 / 3.0 * kPi);
    EXPECT_GT(m.volume(), 0.99 * 4.0 / 3.0 * kPi);
}

TEST(RadialMesh, VolumeScalesCubically) {
    const double v1 = radial_to_mesh(constant_f(1.0), sphere3(), Pose{}).volume();
    const double v2 = radial_to_mesh(constant_f(2.0), sphere3(), some_pose()).volume();
    EXPECT_NEAR(v2 / v1, 8.0, 8.0 * 1e-3);
}

TEST(RadialMesh, ClampsNonPositiveRadii) {
    VectorXd f = constant_f(1.0);
    f[0] = -0.5;
    f[1] = 0.0;
    const TriangleMesh m = radial_to_mesh(f, sphere3(), Pose{});
    EXPECT_NEAR(m.vertices[0].norm(), kMinRadius, 1e-15);
    EXPECT_NEAR(m.vertices[1].norm(), kMinRadius, 1e-15);
    EXPECT_THROW(radial_to_mesh(VectorXd::Ones(3), sphere3(), Pose{}), std::invalid_argument);
    EXPECT_THROW(radial_to_mesh(VectorXd::Ones(5), gpeot::gp::make_circle_grid(5), Pose{}), std::invalid_argument);
}

TEST(Voxelize, MeshVolumeMatchesBall) {
    const TriangleMesh m = radial_to_mesh(constant_f(2.0), sphere3(), Pose{});
    const GridSpec spec = GridSpec::covering(Vec3::Constant(-2.1), Vec3::Constant(2.1), 0.05);
    EXPECT_NEAR(voxelize(m, spec).volume() / m.volume(), 1.0, 0.01);
}

TEST(Voxelize, ShapeVolumes) {
    for (const ShapeSpec& s : {ShapeSpec::cube(3.0), ShapeSpec::ellipsoid(Vec3(2.5, 1.0, 1.0)),
                               ShapeSpec::cone(1.5, 4.0)}) {
        const double cell = default_cell_size(s);
        const GridSpec spec = GridSpec::covering(s.bounds_min(), s.bounds_max(), cell);
        EXPECT_NEAR(voxelize(s, Pose{}, spec).volume() / s.volume(), 1.0, 0.02) << gpeot::sim::to_string(s.kind);
    }
}

TEST(Iou, IdenticalShapes) {
    const ShapeSpec ball = ShapeSpec::ellipsoid(Vec3::Constant(1.0));
    const Pose p = some_pose();
    EXPECT_GE(iou(ball, p, radial_to_mesh(constant_f(1.0), sphere3(), p), 0.02), 0.97);
    const GridSpec spec = GridSpec::covering(Vec3::Constant(-2.0), Vec3::Constant(2.0), 0.05);
    const VoxelGrid cube = voxelize(ShapeSpec::cube(3.0), Pose{}, spec);
    EXPECT_DOUBLE_EQ(iou(cube, cube), 1.0);
}

TEST(Iou, DisjointShapesGiveZero) {
    const ShapeSpec cube = ShapeSpec::cube(1.0);
    const GridSpec spec = GridSpec::covering(Vec3::Constant(-1.0), Vec3(5.0, 1.0, 1.0), 0.05);
    const VoxelGrid a = voxelize(cube, Pose{}, spec);
    const VoxelGrid b = voxelize(cube, Pose{Vec3(3.0, 0.0, 0.0), {}}, spec);
    EXPECT_DOUBLE_EQ(iou(a, b), 0.0);
}

TEST(Iou, ShiftedUnitCube) {
    const ShapeSpec cube = ShapeSpec::cube(1.0);
    const GridSpec spec = GridSpec::covering(Vec3::Constant(-1.0), Vec3::Constant(1.5), 0.02);
    const VoxelGrid a = voxelize(cube, Pose{}, spec);
    const VoxelGrid b = voxelize(cube, Pose{Vec3(0.5, 0.0, 0.0), {}}, spec);
    EXPECT_NEAR(iou(a, b), 1.0 / 3.0, 0.01);
    EXPECT_DOUBLE_EQ(iou(a, b), iou(b, a));
}

TEST(Iou, SymmetricAndPoseInvariant) {
    const ShapeSpec ell = ShapeSpec::ellipsoid(Vec3(2.5, 1.0, 1.0));
    const TriangleMesh local = radial_to_mesh(constant_f(1.5), sphere3(), Pose{});
    const TriangleMesh moved = radial_to_mesh(constant_f(1.5), sphere3(), some_pose());
    const double a = iou(ell, Pose{}, local, 0.03);
    const double b = iou(ell, some_pose(), moved, 0.03);
    EXPECT_NEAR(a, b, 0.01);

    const GridSpec spec = GridSpec::covering(Vec3::Constant(-3.0), Vec3::Constant(3.0), 0.05);
    const VoxelGrid x = voxelize(ell, Pose{}, spec);
    const VoxelGrid y = voxelize(local, spec);
    EXPECT_DOUBLE_EQ(iou(x, y), iou(y, x));
}

TEST(Iou, ConvergesUnderRefinement) {
    const ShapeSpec cone = ShapeSpec::cone(1.5, 4.0);
    const TriangleMesh m = radial_to_mesh(constant_f(1.6), sphere3(), some_pose());
    const double cell = default_cell_size(cone);
    EXPECT_NEAR(iou(cone, some_pose(), m, cell), iou(cone, some_pose(), m, cell / 2.0), 0.01);
}

TEST(Iou, EmptyUnionIsUndefined) {
    const GridSpec spec = GridSpec::covering(Vec3::Zero(), Vec3::Ones(), 0.5);
    const VoxelGrid a(spec);
    EXPECT_THROW(iou(a, a), UndefinedIouError);
    const VoxelGrid b(GridSpec::covering(Vec3::Zero(), Vec3::Ones(), 0.25));
    EXPECT_THROW(iou(a, b), std::invalid_argument);
}

TEST(Iou, DefaultCellIsHundredthOfDiagonal) {
    EXPECT_NEAR(default_cell_size(ShapeSpec::cube(3.0)), 3.0 * std::sqrt(3.0) / 100.0, 1e-15);
}

TEST(Grid, CoveringAndIndexing) {
    const GridSpec s = GridSpec::covering(Vec3(-1.0, 0.0, 0.0), Vec3(1.0, 0.5, 0.25), 0.25);
    EXPECT_EQ(s.dims, (std::array<int, 3>{8, 2, 1}));
    EXPECT_EQ(s.size(), 16u);
    EXPECT_EQ(s.index(1, 1, 0), 9u);
    EXPECT_TRUE(s.center(0, 0, 0).isApprox(Vec3(-0.875, 0.125, 0.125)));
    EXPECT_THROW(GridSpec::covering(Vec3::Zero(), Vec3::Ones(), 0.0), std::invalid_argument);
}

TEST(Projections, ThreeUnitCirclesCarveSteinmetzSolid) {
    const VoxelGrid g = reconstruct_from_projections(constant_contours(1.0), 0.02);
    EXPECT_NEAR(g.volume() / (8.0 * (2.0 - std::sqrt(2.0))), 1.0, 0.02);
}

TEST(Projections, EmptyContoursGiveEmptyGrid) {
    const ProjectionContours c;
    EXPECT_FALSE(c.inside(Vec3::Zero()));
    EXPECT_EQ(reconstruct_from_projections(c, 0.1).count(), 0u);
}

TEST(Projections, CubeSilhouettesRecoverCube) {
    ProjectionContours c = constant_contours(1.0);
    for (auto& radii : c.radii) {
        for (std::size_t s = 0; s < radii.size(); ++s) {
            radii[s] = square_radius(1.5, 2.0 * kPi * static_cast<double>(s) / static_cast<double>(radii.size()));
        }
    }
    const ShapeSpec cube = ShapeSpec::cube(3.0);
    EXPECT_TRUE(c.half_extent().isApprox(Vec3::Constant(1.5), 1e-12));
    const VoxelGrid carved = reconstruct_from_projections(c, 0.05);
    EXPECT_NEAR(carved.volume() / cube.volume(), 1.0, 0.01);
    EXPECT_GE(iou(cube, some_pose(), c, some_pose(), 0.05), 0.97);
}

TEST(Projections, InterpolatedRadius) {
    ProjectionContours c = constant_contours(1.0, 4);
    c.radii[0] = {1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(c.radius(0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(c.radius(0, kPi / 4.0), 1.5);
    EXPECT_DOUBLE_EQ(c.radius(0, 7.0 * kPi / 4.0), 2.5);
    EXPECT_DOUBLE_EQ(c.radius(0, -kPi / 4.0), 2.5);
    EXPECT_DOUBLE_EQ(c.radius(0, 2.0 * kPi + kPi / 2.0), 2.0);
}

TEST(Projections, ContoursFromConstantExtent) {
    const auto cfg = gpeot::tracking::TrackerConfig::gpeot_p_defaults();
    const auto models = gpeot::tracking::build_models(cfg);
    const ProjectionContours c = contours_from_extent(models, VectorXd::Constant(models.extent_dim(), 1.2));
    for (std::size_t j = 0; j < 3; ++j) {
        ASSERT_EQ(c.radii[j].size(), 720u);
        for (double r : c.radii[j]) EXPECT_NEAR(r, 1.2, 1e-3);
    }
    const ProjectionContours clamped = contours_from_extent(models, VectorXd::Constant(models.extent_dim(), -1.0));
    for (double r : clamped.radii[1]) EXPECT_DOUBLE_EQ(r, kMinRadius);
    const auto radial = gpeot::tracking::build_models(gpeot::tracking::TrackerConfig::gpeot_defaults());
    EXPECT_THROW(contours_from_extent(radial, radial.prior_mean()), std::invalid_argument);
    EXPECT_THROW(contours_from_extent(models, VectorXd::Ones(3)), std::invalid_argument);
}

TEST(Kinematics, VelocityRmse) {
    const std::vector<Vec3> truth{Vec3(1, 0, 0), Vec3(0, 1, 0)};
    EXPECT_DOUBLE_EQ(velocity_rmse(truth, truth), 0.0);
    const std::vector<Vec3> est{Vec3(1, 0.3, 0), Vec3(0, 1, -0.4)};
    EXPECT_NEAR(velocity_rmse(est, truth), std::sqrt((0.09 + 0.16) / 2.0), 1e-15);
    EXPECT_THROW(velocity_rmse(est, {truth[0]}), std::invalid_argument);
    EXPECT_THROW(velocity_rmse({}, {}), std::invalid_argument);
}

TEST(Kinematics, OrientationErrors) {
    const UnitQuaternion q(0.1, 0.2, -0.3, 0.9);
    const UnitQuaternion neg(-q.coeffs());
    const auto same = orientation_angle_errors({neg}, {q});
    EXPECT_NEAR(same[0], 0.0, 1e-7);

    const UnitQuaternion yaw = gpeot::geometry::rotation_vector_quat(Vec3(0.0, 0.0, 10.0 * kPi / 180.0));
    const auto e = orientation_angle_errors({gpeot::geometry::quat_product(yaw, q)}, {q});
    EXPECT_NEAR(e[0], 10.0 * kPi / 180.0, 1e-12);

    const OrientationErrors o = orientation_errors({q, q}, {q, q}, {Vec3(0, 0, 0.1), Vec3::Zero()},
                                                   {Vec3::Zero(), Vec3::Zero()});
    EXPECT_NEAR(o.rate_rmse, 0.1 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW(orientation_errors({q}, {q}, {Vec3::Zero()}, {}), std::invalid_argument);
}

TEST(Report, SummaryStatisticsSkipUnevaluatedFrames) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EvaluationReport rep;
    RunEvaluation a;
    a.t = {0.0, 0.1, 0.2};
    a.iou = {0.5, nan, 0.9};
    a.steady_iou = 0.8;
    a.velocity_rmse = 0.1;
    RunEvaluation b = a;
    b.iou = {0.7, nan, 0.7};
    b.steady_iou = 0.9;
    b.velocity_rmse = 0.3;
    rep.runs = {a, b};
    rep.summarize();
    ASSERT_EQ(rep.iou_mean.size(), 3u);
    EXPECT_DOUBLE_EQ(rep.iou_mean[0], 0.6);
    EXPECT_TRUE(std::isnan(rep.iou_mean[1]));
    EXPECT_DOUBLE_EQ(rep.iou_mean[2], 0.8);
    EXPECT_NEAR(rep.iou_std[0], std::sqrt(0.02), 1e-15);
    EXPECT_DOUBLE_EQ(rep.t[2], 0.2);
    EXPECT_NEAR(rep.steady_iou_mean, 0.85, 1e-15);
    EXPECT_NEAR(rep.velocity_rmse_mean, 0.2, 1e-15);
}
