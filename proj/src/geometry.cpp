#include "gpeot/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gpeot::geometry {

UnitQuaternion::UnitQuaternion(double x, double y, double z, double w) : coeffs_(x, y, z, w) {
    const double n = coeffs_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("UnitQuaternion: zero or non-finite coefficients");
    }
    coeffs_ /= n;
}

UnitQuaternion UnitQuaternion::conjugate() const {
    return {-coeffs_[0], -coeffs_[1], -coeffs_[2], coeffs_[3]};
}

UnitQuaternion UnitQuaternion::canonical() const {
    if (coeffs_[3] < 0.0) {
        return UnitQuaternion(Eigen::Vector4d(-coeffs_));
    }
    return *this;
}

UnitQuaternion quat_product(const UnitQuaternion& p, const UnitQuaternion& q) {
    const Vec3 pv = p.vec();
    const Vec3 qv = q.vec();
    const Vec3 v = p.scalar() * qv + q.scalar() * pv - pv.cross(qv);
    const double w = p.scalar() * q.scalar() - pv.dot(qv);
    return {v.x(), v.y(), v.z(), w};
}

Mat3 cross_matrix(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Mat3 rot_matrix(const UnitQuaternion& q) {
    const Vec3 qv = q.vec();
    const double w = q.scalar();
    return (w * w - qv.squaredNorm()) * Mat3::Identity() + 2.0 * qv * qv.transpose() -
           2.0 * w * cross_matrix(qv);
}

UnitQuaternion delta_quat(const Vec3& a) {
    const double s = 1.0 / std::sqrt(4.0 + a.squaredNorm());
    return {s * a.x(), s * a.y(), s * a.z(), 2.0 * s};
}

UnitQuaternion rotation_vector_quat(const Vec3& v) {
    const double angle = v.norm();
    if (angle < 1e-12) {
        // first-order: sin(angle/2)/angle -> 1/2
        return {0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z(), 1.0};
    }
    const Vec3 axis = v / angle;
    const double s = std::sin(0.5 * angle);
    return {s * axis.x(), s * axis.y(), s * axis.z(), std::cos(0.5 * angle)};
}

double rotation_angle(const UnitQuaternion& q) {
    const double w = std::min(1.0, std::abs(q.scalar()));
    return 2.0 * std::atan2(q.vec().norm(), w);
}

SphericalAngles cart_to_spherical(const Vec3& p) {
    const double rho = std::hypot(p.x(), p.y());
    if (rho == 0.0 && p.z() == 0.0) {
        throw DegenerateDirectionError("cart_to_spherical: zero vector has no direction");
    }
    SphericalAngles g;
    g.theta = rho == 0.0 ? 0.0 : std::atan2(p.y(), p.x());
    g.phi = std::atan2(p.z(), rho);
    return g;
}

Vec3 spherical_to_cartesian(const SphericalAngles& g, double r) {
    const double cp = std::cos(g.phi);
    return {r * cp * std::cos(g.theta), r * cp * std::sin(g.theta), r * std::sin(g.phi)};
}

double geodesic_angle(const SphericalAngles& g1, const SphericalAngles& g2) {
    const double c1 = std::cos(g1.phi);
    const double c2 = std::cos(g2.phi);
    const double arg = c1 * c2 * std::cos(g1.theta) * std::cos(g2.theta) +
                       c1 * c2 * std::sin(g1.theta) * std::sin(g2.theta) +
                       std::sin(g1.phi) * std::sin(g2.phi);
    return std::acos(std::clamp(arg, -1.0, 1.0));
}

Vec3 Pose::to_local(const Vec3& m) const { return rot_matrix(orientation) * (m - center); }

Vec3 Pose::to_global(const Vec3& p) const {
    return rot_matrix(orientation).transpose() * p + center;
}

}  // namespace gpeot::geometry
