#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gpeot::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raised when a direction is requested for a (near-)zero vector.
class DegenerateDirectionError : public std::runtime_error {
public:
    explicit DegenerateDirectionError(const std::string& what) : std::runtime_error(what) {}
};

/// Unit quaternion stored as [q1 q2 q3 q4] = [vector part; scalar part].
///
/// Every constructor path renormalizes, so the norm is 1 up to rounding.
class UnitQuaternion {
public:
    UnitQuaternion() : coeffs_(0.0, 0.0, 0.0, 1.0) {}

    /// Normalizes (x, y, z, w). Throws std::invalid_argument on a zero or non-finite input.
    UnitQuaternion(double x, double y, double z, double w);
    explicit UnitQuaternion(const Eigen::Vector4d& coeffs)
        : UnitQuaternion(coeffs[0], coeffs[1], coeffs[2], coeffs[3]) {}

    static UnitQuaternion identity() { return {}; }

    [[nodiscard]] Vec3 vec() const { return coeffs_.head<3>(); }
    [[nodiscard]] double scalar() const { return coeffs_[3]; }
    [[nodiscard]] const Eigen::Vector4d& coeffs() const { return coeffs_; }
    [[nodiscard]] double operator[](int i) const { return coeffs_[i]; }

    [[nodiscard]] UnitQuaternion conjugate() const;
    /// Same rotation, representative with non-negative scalar part.
    [[nodiscard]] UnitQuaternion canonical() const;

private:
    Eigen::Vector4d coeffs_;
};

/// Azimuth theta in [-pi, pi], elevation phi in [-pi/2, pi/2].
struct SphericalAngles {
    double theta = 0.0;
    double phi = 0.0;
};

/// p (.) q with the vector-first convention:
/// [p4 q_v + q4 p_v - p_v x q_v ; p4 q4 - p_v . q_v], renormalized.
UnitQuaternion quat_product(const UnitQuaternion& p, const UnitQuaternion& q);

/// (q4^2 - |q_v|^2) I + 2 q_v q_v^T - 2 q4 [q_v x].
///
/// Satisfies rot_matrix(p) * rot_matrix(q) == rot_matrix(quat_product(p, q)).
/// The matrix maps global-frame components to object-frame components.
Mat3 rot_matrix(const UnitQuaternion& q);

/// [v x] such that cross_matrix(v) * w == v.cross(w).
Mat3 cross_matrix(const Vec3& v);

/// Rodrigues deviation quaternion (1 / sqrt(4 + |a|^2)) [a; 2].
UnitQuaternion delta_quat(const Vec3& a);

/// Quaternion of a frame rotation by |v| radians about v / |v|.
/// rotation_vector_quat(v) == delta_quat(2 tan(|v|/2) v/|v|) for |v| < pi.
UnitQuaternion rotation_vector_quat(const Vec3& v);

/// Rotation angle in [0, pi] of q, insensitive to the sign of q.
double rotation_angle(const UnitQuaternion& q);

/// Azimuth via atan2(y, x) (0 at the poles), elevation via atan2(z, rho).
/// Throws DegenerateDirectionError for the zero vector.
SphericalAngles cart_to_spherical(const Vec3& p);

Vec3 spherical_to_cartesian(const SphericalAngles& g, double r = 1.0);

/// Great-circle angle between two directions, in [0, pi].
double geodesic_angle(const SphericalAngles& g1, const SphericalAngles& g2);

/// Rigid pose of an object: center in the global frame plus orientation.
struct Pose {
    Vec3 center = Vec3::Zero();
    UnitQuaternion orientation;

    /// Global point to object frame: rot_matrix(q) (m - c).
    [[nodiscard]] Vec3 to_local(const Vec3& m) const;
    /// Object-frame point to global: rot_matrix(q)^T p + c.
    [[nodiscard]] Vec3 to_global(const Vec3& p) const;
};

}  // namespace gpeot::geometry
