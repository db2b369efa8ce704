#include "gpeot/motion_models.hpp"

#include <cmath>

namespace gpeot::motion {

using geometry::cross_matrix;
using geometry::Mat3;

Eigen::Matrix<double, 12, 1> KinematicState::to_vector() const {
    Eigen::Matrix<double, 12, 1> x;
    x << c, v, a, w;
    return x;
}

KinematicState KinematicState::from_vector(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() < kKinematicDim) {
        throw std::invalid_argument("KinematicState::from_vector: vector too short");
    }
    KinematicState k;
    k.c = x.segment<3>(kCenter);
    k.v = x.segment<3>(kVelocity);
    k.a = x.segment<3>(kDeviation);
    k.w = x.segment<3>(kRate);
    return k;
}

std::string_view to_string(ExtentDynamics kind) {
    return kind == ExtentDynamics::max_entropy ? "max_entropy" : "forgetting";
}

ExtentDynamics extent_dynamics_from_string(std::string_view name) {
    if (name == "max_entropy") return ExtentDynamics::max_entropy;
    if (name == "forgetting") return ExtentDynamics::forgetting;
    throw std::invalid_argument("unknown extent dynamics: " + std::string(name));
}

void ProcessNoiseConfig::validate() const {
    if (!(sigma_c >= 0.0)) throw std::invalid_argument("ProcessNoiseConfig: sigma_c must be >= 0");
    if (!(sigma_alpha >= 0.0)) {
        throw std::invalid_argument("ProcessNoiseConfig: sigma_alpha must be >= 0");
    }
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("ProcessNoiseConfig: lambda must be in (0, 1]");
    }
    if (!(forgetting_alpha >= 0.0)) {
        throw std::invalid_argument("ProcessNoiseConfig: forgetting_alpha must be >= 0");
    }
    for (int i = 0; i < 3; ++i) {
        if (alpha_axis_mask[i] != 0.0 && alpha_axis_mask[i] != 1.0) {
            throw std::invalid_argument("ProcessNoiseConfig: alpha_axis_mask entries must be 0 or 1");
        }
    }
}

LinearBlock translational_fq(double T, double sigma_c) {
    if (!(T > 0.0)) throw std::invalid_argument("translational_fq: T must be > 0");
    const Mat3 I = Mat3::Identity();
    LinearBlock b;
    b.F = Eigen::MatrixXd::Identity(6, 6);
    b.F.block<3, 3>(0, 3) = T * I;
    const double q = sigma_c * sigma_c;
    b.Q = Eigen::MatrixXd::Zero(6, 6);
    b.Q.block<3, 3>(0, 0) = (T * T * T / 3.0) * q * I;
    b.Q.block<3, 3>(0, 3) = (T * T / 2.0) * q * I;
    b.Q.block<3, 3>(3, 0) = (T * T / 2.0) * q * I;
    b.Q.block<3, 3>(3, 3) = T * q * I;
    return b;
}

namespace {

double sinc(double x) { return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

/// (1 - sin(h)/h) / h^2, by its series where the direct form cancels.
double one_minus_sinc_over_sq(double h) {
    if (h >= 0.1) return (1.0 - std::sin(h) / h) / (h * h);
    const double x = h * h;
    return 1.0 / 6.0 - x / 120.0 + x * x / 5040.0 - x * x * x / 362880.0 + x * x * x * x / 39916800.0;
}

/// (1 - 2 (1 - cos h) / h^2) / h^2, by its series where the direct form cancels.
double one_minus_versine_ratio_over_sq(double h) {
    if (h >= 0.1) return (1.0 - 2.0 * (1.0 - std::cos(h)) / (h * h)) / (h * h);
    const double x = h * h;
    return 1.0 / 12.0 - x / 360.0 + x * x / 20160.0 - x * x * x / 1814400.0 + x * x * x * x / 239500800.0;
}

}  // namespace

LinearBlock rotational_fq(const Vec3& w_hat, double T, double sigma_alpha, const Vec3& axis_mask) {
    if (!(T > 0.0)) throw std::invalid_argument("rotational_fq: T must be > 0");
    const Mat3 I = Mat3::Identity();
    const Mat3 W = cross_matrix(-w_hat);
    const Mat3 W2 = W * W;
    const double w = w_hat.norm();

    // E = exp(T W / 2), J = int_0^T exp(s W / 2) ds, L = int_0^T (T - s) exp(s W / 2) ds,
    // each written as x0 I + x1 W + x2 W^2 with h = w T / 2.
    const double h = 0.5 * T * w;
    const double half = sinc(0.5 * h);
    const double e1 = 0.5 * T * sinc(h);
    const double e2 = T * T / 8.0 * half * half;
    const double j1 = T * T / 4.0 * half * half;
    const double j2 = T * T * T / 4.0 * one_minus_sinc_over_sq(h);
    const double l1 = T * T * T / 2.0 * one_minus_sinc_over_sq(h);
    const double l2 = T * T * T * T / 8.0 * one_minus_versine_ratio_over_sq(h);
    const Mat3 E = I + e1 * W + e2 * W2;
    const Mat3 J = T * I + j1 * W + j2 * W2;
    const Mat3 L = (T * T / 2.0) * I + l1 * W + l2 * W2;

    LinearBlock b;
    b.F = Eigen::MatrixXd::Identity(6, 6);
    b.F.block<3, 3>(0, 0) = E;
    b.F.block<3, 3>(0, 3) = J;

    Eigen::Matrix<double, 6, 3> G;
    G.topRows<3>() = L;
    G.bottomRows<3>() = T * I;
    const Mat3 sigma = (sigma_alpha * sigma_alpha) * axis_mask.asDiagonal().toDenseMatrix();
    b.Q = G * sigma * G.transpose();
    b.Q = 0.5 * (b.Q + b.Q.transpose()).eval();
    return b;
}

Eigen::MatrixXd extent_q_max_entropy(const Eigen::MatrixXd& P_ff, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("extent_q_max_entropy: lambda must be in (0, 1]");
    }
    return (1.0 / lambda - 1.0) * P_ff;
}

LinearBlock extent_fq_forgetting(double alpha, double T, const Eigen::MatrixXd& prior_cov) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("extent_fq_forgetting: alpha must be >= 0");
    if (!(T > 0.0)) throw std::invalid_argument("extent_fq_forgetting: T must be > 0");
    const auto n = prior_cov.rows();
    LinearBlock b;
    b.F = std::exp(-alpha * T) * Eigen::MatrixXd::Identity(n, n);
    b.Q = -std::expm1(-2.0 * alpha * T) * prior_cov;
    return b;
}

TransitionModel assemble_transition(std::span<const LinearBlock> blocks) {
    Eigen::Index n = 0;
    for (const auto& b : blocks) {
        if (b.F.rows() != b.F.cols() || b.Q.rows() != b.Q.cols() || b.F.rows() != b.Q.rows()) {
            throw AssemblyError("assemble_transition: block F/Q must be square and equal-sized");
        }
        n += b.F.rows();
    }
    TransitionModel t;
    t.F = Eigen::MatrixXd::Zero(n, n);
    t.Q = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
        const auto m = b.F.rows();
        t.F.block(off, off, m, m) = b.F;
        t.Q.block(off, off, m, m) = b.Q;
        off += m;
    }
    return t;
}

}  // namespace gpeot::motion
