#include "gpeot/geometry.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>

using namespace gpeot::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

UnitQuaternion random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return UnitQuaternion(n(rng), n(rng), n(rng), n(rng));
}

/// Frame rotation by `angle` about `axis`: maps global components to the rotated frame.
Mat3 frame_rotation(const Vec3& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix().transpose();
}

}  // namespace

TEST(Quaternion, ConstructorNormalizes) {
    const UnitQuaternion q(1.0, 2.0, 3.0, 4.0);
    EXPECT_NEAR(q.coeffs().norm(), 1.0, 1e-15);
    EXPECT_THROW(UnitQuaternion(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(UnitQuaternion(std::nan(""), 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST(Quaternion, IdentityIsNeutral) {
    std::mt19937_64 rng(1);
    const UnitQuaternion p = random_quat(rng);
    const UnitQuaternion r = quat_product(p, UnitQuaternion::identity());
    EXPECT_TRUE(r.coeffs().isApprox(p.coeffs(), 1e-14));
}

TEST(Quaternion, ConjugateIsInverse) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        const UnitQuaternion p = random_quat(rng);
        const UnitQuaternion r = quat_product(p, p.conjugate());
        EXPECT_NEAR(r.vec().norm(), 0.0, 1e-14);
        EXPECT_NEAR(r.scalar(), 1.0, 1e-14);
    }
}

TEST(Quaternion, TwoQuarterTurnsMakeHalfTurn) {
    const UnitQuaternion q90 = rotation_vector_quat(Vec3(0.0, 0.0, kPi / 2.0));
    const UnitQuaternion q180 = quat_product(q90, q90);
    EXPECT_TRUE(rot_matrix(q180).isApprox(frame_rotation(Vec3::UnitZ(), kPi), 1e-12));
}

TEST(RotMatrix, IdentityQuaternion) {
    EXPECT_TRUE(rot_matrix(UnitQuaternion::identity()).isApprox(Mat3::Identity()));
}

TEST(RotMatrix, OrthonormalWithUnitDeterminant) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Mat3 R = rot_matrix(random_quat(rng));
        EXPECT_TRUE((R.transpose() * R).isApprox(Mat3::Identity(), 1e-12));
        EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
    }
}

TEST(RotMatrix, RodriguesQuarterTurnAboutX) {
    const Mat3 R = rot_matrix(delta_quat(Vec3(2.0, 0.0, 0.0)));
    EXPECT_TRUE(R.isApprox(frame_rotation(Vec3::UnitX(), kPi / 2.0), 1e-12));
}

TEST(RotMatrix, CompositionHomomorphism) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const UnitQuaternion p = random_quat(rng), q = random_quat(rng);
        const Mat3 lhs = rot_matrix(p) * rot_matrix(q);
        EXPECT_LT((lhs - rot_matrix(quat_product(p, q))).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(CrossMatrix, Basics) {
    EXPECT_TRUE(cross_matrix(Vec3::Zero()).isZero());
    const Vec3 v(0.3, -1.2, 2.5);
    EXPECT_TRUE((cross_matrix(v) * v).isZero(1e-15));
    EXPECT_TRUE((cross_matrix(Vec3::UnitX()) * Vec3::UnitY()).isApprox(Vec3::UnitZ()));
    EXPECT_TRUE((cross_matrix(v) + cross_matrix(v).transpose()).isZero());
    const Vec3 w(1.0, 0.5, -0.25);
    EXPECT_TRUE((cross_matrix(v) * w).isApprox(v.cross(w)));
}

TEST(DeltaQuat, ZeroIsIdentity) {
    const UnitQuaternion q = delta_quat(Vec3::Zero());
    EXPECT_TRUE(q.coeffs().isApprox(Eigen::Vector4d(0, 0, 0, 1)));
}

TEST(DeltaQuat, QuarterTurnCoefficients) {
    const UnitQuaternion q = delta_quat(Vec3(2.0, 0.0, 0.0));
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_TRUE(q.coeffs().isApprox(Eigen::Vector4d(s, 0, 0, s), 1e-15));
}

TEST(DeltaQuat, UnitNormForLargeArguments) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 100; ++i) {
        Vec3 a(u(rng), u(rng), u(rng));
        if (a.norm() > 100.0) a *= 100.0 / a.norm();
        EXPECT_NEAR(delta_quat(a).coeffs().norm(), 1.0, 1e-14);
    }
}

TEST(RotationVectorQuat, MatchesRodriguesForm) {
    const Vec3 v(0.2, -0.4, 0.7);
    const Vec3 a = 2.0 * std::tan(v.norm() / 2.0) * v.normalized();
    EXPECT_TRUE(rotation_vector_quat(v).coeffs().isApprox(delta_quat(a).coeffs(), 1e-14));
    EXPECT_NEAR(rotation_angle(rotation_vector_quat(v)), v.norm(), 1e-12);
}

TEST(Spherical, ReferenceDirections) {
    const auto a = cart_to_spherical(Vec3(1, 0, 0));
    EXPECT_DOUBLE_EQ(a.theta, 0.0);
    EXPECT_DOUBLE_EQ(a.phi, 0.0);
    const auto pole = cart_to_spherical(Vec3(0, 0, 1));
    EXPECT_DOUBLE_EQ(pole.theta, 0.0);
    EXPECT_NEAR(pole.phi, kPi / 2.0, 1e-15);
    const auto d = cart_to_spherical(Vec3(1, 1, 0));
    EXPECT_NEAR(d.theta, kPi / 4.0, 1e-15);
    EXPECT_NEAR(d.phi, 0.0, 1e-15);
}

TEST(Spherical, FullQuadrantAzimuth) {
    EXPECT_NEAR(cart_to_spherical(Vec3(-1, -1, 0)).theta, -3.0 * kPi / 4.0, 1e-15);
    EXPECT_NEAR(cart_to_spherical(Vec3(-1, 1, 0)).theta, 3.0 * kPi / 4.0, 1e-15);
}

TEST(Spherical, ZeroVectorThrows) {
    EXPECT_THROW(cart_to_spherical(Vec3::Zero()), DegenerateDirectionError);
}

TEST(Spherical, RoundTrip) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> th(-kPi + 1e-6, kPi - 1e-6), ph(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
    for (int i = 0; i < 200; ++i) {
        const SphericalAngles g{th(rng), ph(rng)};
        const SphericalAngles back = cart_to_spherical(spherical_to_cartesian(g));
        EXPECT_NEAR(back.theta, g.theta, 1e-10);
        EXPECT_NEAR(back.phi, g.phi, 1e-10);
    }
}

TEST(Geodesic, PolesAndOpposites) {
    EXPECT_NEAR(geodesic_angle({0.0, kPi / 2}, {kPi, kPi / 2}), 0.0, 1e-7);
    EXPECT_NEAR(geodesic_angle({0.0, kPi / 2}, {0.0, -kPi / 2}), kPi, 1e-12);
    const SphericalAngles g{0.3, -0.2};
    EXPECT_NEAR(geodesic_angle(g, g), 0.0, 1e-7);
}

TEST(Geodesic, SymmetricAndBounded) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(-kPi, kPi), ph(-kPi / 2, kPi / 2);
    for (int i = 0; i < 200; ++i) {
        const SphericalAngles a{th(rng), ph(rng)}, b{th(rng), ph(rng)};
        const double d = geodesic_angle(a, b);
        EXPECT_DOUBLE_EQ(d, geodesic_angle(b, a));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, kPi);
    }
}

TEST(Pose, LocalGlobalRoundTrip) {
    std::mt19937_64 rng(8);
    const Pose pose{Vec3(1.0, -2.0, 0.5), random_quat(rng)};
    const Vec3 m(0.3, 0.7, -4.0);
    EXPECT_TRUE(pose.to_global(pose.to_local(m)).isApprox(m, 1e-12));
    EXPECT_TRUE(pose.to_local(pose.center).isZero(1e-15));
    EXPECT_TRUE(Pose{}.to_local(m).isApprox(m));
}
