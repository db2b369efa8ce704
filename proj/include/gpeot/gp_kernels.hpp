#pragma once

#include "gpeot/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gpeot::gp {

using geometry::SphericalAngles;
using geometry::Vec3;

class SingularKernelError : public std::runtime_error {
public:
    explicit SingularKernelError(const std::string& what) : std::runtime_error(what) {}
};

struct GpHyperparams {
    double mu_r = 0.0;                        ///< prior mean radius [m]
    double sigma_f = 1.0;                     ///< prior amplitude [m]
    double sigma_r = 0.2;                     ///< std of the unknown mean radius [m]
    double length_scale = std::numbers::pi / 8.0;  ///< [rad]
    double meas_noise_var = 0.0;              ///< scalar R of the GP likelihood [m^2]

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class KernelKind { geodesic3d, periodic2pi, periodic_pi };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/// sigma_f^2 exp(-d^2 / (2 l^2)) + sigma_r^2 with d the great-circle angle.
double kernel_geodesic3d(const SphericalAngles& g1, const SphericalAngles& g2,
                         const GpHyperparams& hyper);
/// Same kernel expressed through the great-circle distance directly.
double kernel_from_geodesic_distance(double d, const GpHyperparams& hyper);
/// sigma_f^2 exp(-2 sin^2((t1 - t2)/2) / l^2) + sigma_r^2, 2 pi periodic.
double kernel_periodic2pi(double t1, double t2, const GpHyperparams& hyper);
/// sigma_f^2 exp(-sin^2(t1 - t2) / (2 l^2)) + sigma_r^2, pi periodic.
double kernel_periodic_pi(double t1, double t2, const GpHyperparams& hyper);

/// Finite set of GP inputs at which the extent is summarized.
struct BasisGrid {
    enum class Kind { sphere, circle };

    Kind kind = Kind::circle;
    std::vector<SphericalAngles> angles;     ///< sphere inputs
    std::vector<Vec3> directions;            ///< unit vectors of `angles`
    std::vector<std::array<int, 3>> faces;   ///< icosphere triangulation (outward winding)
    std::vector<double> circle;              ///< circle inputs in [0, 2 pi), increasing

    [[nodiscard]] std::size_t size() const {
        return kind == Kind::sphere ? angles.size() : circle.size();
    }
};

/// Icosahedron subdivided `level` times and projected onto the unit sphere.
/// Vertex count is 10 * 4^level + 2 (642 at level 3).
BasisGrid make_sphere_grid(int level);

/// n equidistant polar angles 2 pi i / n. Requires n >= 3.
BasisGrid make_circle_grid(int n);

/// Result of summarizing one GP input against the basis points.
struct GpProjection {
    Eigen::RowVectorXd h_row;  ///< K(u, U) K(U, U)^-1
    double r_f = 0.0;          ///< k(u, u) + R - K(u, U) K(U, U)^-1 K(U, u)
    double c = 0.0;            ///< mu(u) - h_row mu(U)
};

/// Recursive-GP extent model: basis grid, kernel, cached inverse Gram matrix and prior.
/// Immutable after construction.
class GpExtentModel {
public:
    /// Throws SingularKernelError if the jittered Gram matrix is not positive definite.
    GpExtentModel(BasisGrid grid, GpHyperparams hyper, KernelKind kind);

    [[nodiscard]] const BasisGrid& grid() const { return grid_; }
    [[nodiscard]] const GpHyperparams& hyper() const { return hyper_; }
    [[nodiscard]] KernelKind kernel_kind() const { return kind_; }
    [[nodiscard]] std::size_t size() const { return grid_.size(); }
    [[nodiscard]] const Eigen::MatrixXd& gram_inverse() const { return gram_inverse_; }
    [[nodiscard]] const Eigen::VectorXd& prior_mean() const { return prior_mean_; }
    [[nodiscard]] const Eigen::MatrixXd& prior_cov() const { return prior_cov_; }

    /// Kernel between two inputs of this model's kind (angles only meaningful for circle kinds).
    [[nodiscard]] double kernel(double t1, double t2) const;

    [[nodiscard]] Eigen::RowVectorXd kernel_row(const SphericalAngles& g) const;
    [[nodiscard]] Eigen::RowVectorXd kernel_row(const Vec3& unit_direction) const;
    [[nodiscard]] Eigen::RowVectorXd kernel_row(double theta) const;

    [[nodiscard]] GpProjection project(const SphericalAngles& g) const;
    [[nodiscard]] GpProjection project(const Vec3& unit_direction) const;
    [[nodiscard]] GpProjection project(double theta) const;

    /// K(U, U)^-1 (f - mu(U)); with these weights the posterior-mean radius at u is
    /// kernel_row(u) * weights + mu_r, which equals h_row f + c.
    [[nodiscard]] Eigen::VectorXd weights(const Eigen::VectorXd& f) const;
    [[nodiscard]] double radius(const Vec3& unit_direction, const Eigen::VectorXd& weights) const;
    [[nodiscard]] double radius(double theta, const Eigen::VectorXd& weights) const;

private:
    [[nodiscard]] GpProjection project_row(Eigen::RowVectorXd k_row) const;
    [[nodiscard]] double self_kernel() const;

    BasisGrid grid_;
    GpHyperparams hyper_;
    KernelKind kind_;
    Eigen::MatrixXd gram_inverse_;
    Eigen::VectorXd prior_mean_;
    Eigen::MatrixXd prior_cov_;
    Eigen::RowVectorXd ones_gram_inverse_;  ///< 1^T K^-1, for the mean correction
};

/// Diagonal jitter relative to the kernel's diagonal value.
inline constexpr double kGramJitter = 1e-9;

GpExtentModel build_extent_model(BasisGrid grid, const GpHyperparams& hyper, KernelKind kind);
GpProjection gp_projection(const SphericalAngles& g, const GpExtentModel& model);
GpProjection gp_projection(double theta, const GpExtentModel& model);

}  // namespace gpeot::gp
