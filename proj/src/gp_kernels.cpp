#include "gpeot/gp_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace gpeot::gp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<Vec3, 12> icosahedron_vertices() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::array<Vec3, 12> v = {Vec3(-1, t, 0), Vec3(1, t, 0),  Vec3(-1, -t, 0), Vec3(1, -t, 0),
                              Vec3(0, -1, t), Vec3(0, 1, t),  Vec3(0, -1, -t), Vec3(0, 1, -t),
                              Vec3(t, 0, -1), Vec3(t, 0, 1),  Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
    for (auto& p : v) {
        p.normalize();
    }
    return v;
}

constexpr std::array<std::array<int, 3>, 20> kIcosahedronFaces = {{
    {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
}};

}  // namespace

void GpHyperparams::validate() const {
    if (!(sigma_f > 0.0)) throw std::invalid_argument("GpHyperparams: sigma_f must be > 0");
    if (!(sigma_r >= 0.0)) throw std::invalid_argument("GpHyperparams: sigma_r must be >= 0");
    if (!(length_scale > 0.0)) throw std::invalid_argument("GpHyperparams: length_scale must be > 0");
    if (!(meas_noise_var >= 0.0)) {
        throw std::invalid_argument("GpHyperparams: meas_noise_var must be >= 0");
    }
    if (!std::isfinite(mu_r)) throw std::invalid_argument("GpHyperparams: mu_r must be finite");
}

std::string_view to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::geodesic3d: return "geodesic3d";
        case KernelKind::periodic2pi: return "periodic2pi";
        case KernelKind::periodic_pi: return "periodic_pi";
    }
    return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
    if (name == "geodesic3d") return KernelKind::geodesic3d;
    if (name == "periodic2pi") return KernelKind::periodic2pi;
    if (name == "periodic_pi") return KernelKind::periodic_pi;
    throw std::invalid_argument("unknown kernel kind: " + std::string(name));
}

double kernel_from_geodesic_distance(double d, const GpHyperparams& hyper) {
    const double l2 = hyper.length_scale * hyper.length_scale;
    return hyper.sigma_f * hyper.sigma_f * std::exp(-d * d / (2.0 * l2)) +
           hyper.sigma_r * hyper.sigma_r;
}

double kernel_geodesic3d(const SphericalAngles& g1, const SphericalAngles& g2,
                         const GpHyperparams& hyper) {
    return kernel_from_geodesic_distance(geometry::geodesic_angle(g1, g2), hyper);
}

double kernel_periodic2pi(double t1, double t2, const GpHyperparams& hyper) {
    const double s = std::sin(0.5 * (t1 - t2));
    const double l2 = hyper.length_scale * hyper.length_scale;
    return hyper.sigma_f * hyper.sigma_f * std::exp(-2.0 * s * s / l2) +
           hyper.sigma_r * hyper.sigma_r;
}

double kernel_periodic_pi(double t1, double t2, const GpHyperparams& hyper) {
    const double s = std::sin(t1 - t2);
    const double l2 = hyper.length_scale * hyper.length_scale;
    return hyper.sigma_f * hyper.sigma_f * std::exp(-s * s / (2.0 * l2)) +
           hyper.sigma_r * hyper.sigma_r;
}

BasisGrid make_sphere_grid(int level) {
    if (level < 0) throw std::invalid_argument("make_sphere_grid: level must be >= 0");
    const auto base = icosahedron_vertices();
    std::vector<Vec3> verts(base.begin(), base.end());
    std::vector<std::array<int, 3>> faces(kIcosahedronFaces.begin(), kIcosahedronFaces.end());

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    BasisGrid grid;
    grid.kind = BasisGrid::Kind::sphere;
    grid.faces = std::move(faces);
    grid.angles.reserve(verts.size());
    for (const auto& v : verts) {
        grid.angles.push_back(geometry::cart_to_spherical(v));
        // re-derive from the angles so directions and angles agree exactly
        grid.directions.push_back(geometry::spherical_to_cartesian(grid.angles.back()));
    }
    return grid;
}

BasisGrid make_circle_grid(int n) {
    if (n < 3) throw std::invalid_argument("make_circle_grid: n must be >= 3");
    BasisGrid grid;
    grid.kind = BasisGrid::Kind::circle;
    grid.circle.reserve(n);
    for (int i = 0; i < n; ++i) {
        grid.circle.push_back(kTwoPi * i / n);
    }
    return grid;
}

GpExtentModel::GpExtentModel(BasisGrid grid, GpHyperparams hyper, KernelKind kind)
    : grid_(std::move(grid)), hyper_(hyper), kind_(kind) {
    hyper_.validate();
    const bool sphere_kernel = kind_ == KernelKind::geodesic3d;
    if (sphere_kernel != (grid_.kind == BasisGrid::Kind::sphere)) {
        throw std::invalid_argument("GpExtentModel: kernel kind does not match grid kind");
    }
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (n == 0) throw std::invalid_argument("GpExtentModel: empty basis grid");

    prior_cov_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd row =
            sphere_kernel ? kernel_row(grid_.directions[i]) : kernel_row(grid_.circle[i]);
        prior_cov_.row(i) = row;
    }
    prior_cov_ = 0.5 * (prior_cov_ + prior_cov_.transpose()).eval();
    prior_mean_ = Eigen::VectorXd::Constant(n, hyper_.mu_r);

    Eigen::MatrixXd jittered = prior_cov_;
    jittered.diagonal().array() += kGramJitter * self_kernel();
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    if (llt.info() != Eigen::Success) {
        throw SingularKernelError("GpExtentModel: Gram matrix is not positive definite");
    }
    gram_inverse_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    gram_inverse_ = 0.5 * (gram_inverse_ + gram_inverse_.transpose()).eval();
    if (!gram_inverse_.allFinite()) {
        throw SingularKernelError("GpExtentModel: non-finite inverse Gram matrix");
    }
    ones_gram_inverse_ = Eigen::RowVectorXd::Ones(n) * gram_inverse_;
}

double GpExtentModel::self_kernel() const {
    return hyper_.sigma_f * hyper_.sigma_f + hyper_.sigma_r * hyper_.sigma_r;
}

double GpExtentModel::kernel(double t1, double t2) const {
    switch (kind_) {
        case KernelKind::periodic2pi: return kernel_periodic2pi(t1, t2, hyper_);
        case KernelKind::periodic_pi: return kernel_periodic_pi(t1, t2, hyper_);
        case KernelKind::geodesic3d: break;
    }
    throw std::logic_error("GpExtentModel::kernel: scalar inputs need a circle kernel");
}

Eigen::RowVectorXd GpExtentModel::kernel_row(const SphericalAngles& g) const {
    return kernel_row(geometry::spherical_to_cartesian(g));
}

Eigen::RowVectorXd GpExtentModel::kernel_row(const Vec3& unit_direction) const {
    if (kind_ != KernelKind::geodesic3d) {
        throw std::logic_error("GpExtentModel::kernel_row: direction input needs geodesic3d");
    }
    const auto n = static_cast<Eigen::Index>(grid_.size());
    Eigen::RowVectorXd row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cosd = std::clamp(unit_direction.dot(grid_.directions[i]), -1.0, 1.0);
        row[i] = kernel_from_geodesic_distance(std::acos(cosd), hyper_);
    }
    return row;
}

Eigen::RowVectorXd GpExtentModel::kernel_row(double theta) const {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    Eigen::RowVectorXd row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        row[i] = kernel(theta, grid_.circle[i]);
    }
    return row;
}

GpProjection GpExtentModel::project_row(Eigen::RowVectorXd k_row) const {
    GpProjection out;
    out.h_row = k_row * gram_inverse_;
    out.r_f = std::max(0.0, self_kernel() - out.h_row.dot(k_row)) + hyper_.meas_noise_var;
    out.c = hyper_.mu_r * (1.0 - out.h_row.sum());
    return out;
}

GpProjection GpExtentModel::project(const SphericalAngles& g) const {
    return project_row(kernel_row(g));
}

GpProjection GpExtentModel::project(const Vec3& unit_direction) const {
    return project_row(kernel_row(unit_direction));
}

GpProjection GpExtentModel::project(double theta) const { return project_row(kernel_row(theta)); }

Eigen::VectorXd GpExtentModel::weights(const Eigen::VectorXd& f) const {
    return gram_inverse_ * (f - prior_mean_);
}

double GpExtentModel::radius(const Vec3& unit_direction, const Eigen::VectorXd& weights) const {
    return kernel_row(unit_direction).dot(weights) + hyper_.mu_r;
}

double GpExtentModel::radius(double theta, const Eigen::VectorXd& weights) const {
    return kernel_row(theta).dot(weights) + hyper_.mu_r;
}

GpExtentModel build_extent_model(BasisGrid grid, const GpHyperparams& hyper, KernelKind kind) {
    return GpExtentModel(std::move(grid), hyper, kind);
}

GpProjection gp_projection(const SphericalAngles& g, const GpExtentModel& model) {
    return model.project(g);
}

GpProjection gp_projection(double theta, const GpExtentModel& model) {
    return model.project(theta);
}

}  // namespace gpeot::gp
