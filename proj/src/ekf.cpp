#include "gpeot/ekf.hpp"

#include <algorithm>
#include <cmath>

namespace gpeot::filter {

namespace {

void symmetrize(Eigen::MatrixXd& P) { P = 0.5 * (P + P.transpose()).eval(); }

TrackerState update_block(const TrackerState& state, const Eigen::VectorXd& h,
                          const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                          UpdateDiagnostics* diagnostics) {
    const Eigen::MatrixXd PHt = state.P * H.transpose();
    Eigen::MatrixXd S = H * PHt + R;
    symmetrize(S);
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
        throw UpdateError("measurement_update: innovation covariance is not positive definite (" +
                          std::to_string(S.rows()) + " rows)");
    }
    if (diagnostics != nullptr) {
        diagnostics->min_rcond = std::min(diagnostics->min_rcond, llt.rcond());
    }
    // K^T = S^-1 H P
    const Eigen::MatrixXd Kt = llt.solve(PHt.transpose());
    if (!Kt.allFinite()) throw UpdateError("measurement_update: non-finite gain");

    TrackerState out = state;
    out.x -= Kt.transpose() * h;
    out.P.noalias() -= Kt.transpose() * PHt.transpose();
    symmetrize(out.P);
    return out;
}

}  // namespace

UnitQuaternion TrackerState::orientation() const {
    return geometry::quat_product(geometry::delta_quat(deviation()), q_ref);
}

void FilterConfig::validate() const {
    if (!(jacobian_rel_step > 0.0) || !(jacobian_abs_step > 0.0)) {
        throw std::invalid_argument("FilterConfig: jacobian steps must be > 0");
    }
}

Eigen::MatrixXd numerical_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& h,
                                   const Eigen::VectorXd& x, const FilterConfig& cfg) {
    const Eigen::VectorXd h0 = h(x);
    if (!h0.allFinite()) throw JacobianError("numerical_jacobian: non-finite h at x");
    Eigen::MatrixXd J(h0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = std::max(cfg.jacobian_rel_step * std::abs(x[i]), cfg.jacobian_abs_step);
        xp[i] = x[i] + step;
        const Eigen::VectorXd hp = h(xp);
        xp[i] = x[i] - step;
        const Eigen::VectorXd hm = h(xp);
        xp[i] = x[i];
        if (!hp.allFinite() || !hm.allFinite()) {
            throw JacobianError("numerical_jacobian: non-finite h at perturbed component " +
                                std::to_string(i));
        }
        J.col(i) = (hp - hm) / (2.0 * step);
    }
    return J;
}

TrackerState time_update(const TrackerState& state, const motion::TransitionModel& transition) {
    if (transition.F.rows() != state.dim() || transition.Q.rows() != state.dim()) {
        throw std::invalid_argument("time_update: transition size does not match the state");
    }
    TrackerState out = state;
    out.x = transition.F * state.x;
    out.P = transition.F * state.P * transition.F.transpose() + transition.Q;
    symmetrize(out.P);
    return out;
}

TrackerState time_update(const TrackerState& state, const StructuredTransition& transition) {
    constexpr Eigen::Index k = motion::kKinematicDim;
    const Eigen::Index n = state.dim() - k;
    if (transition.kinematic.F.rows() != k || transition.kinematic.Q.rows() != k) {
        throw std::invalid_argument("time_update: kinematic block must be 12x12");
    }
    if (n > 0 && (transition.extent_q.rows() != n || transition.extent_q.cols() != n)) {
        throw std::invalid_argument("time_update: extent_q size does not match the state");
    }
    const Eigen::MatrixXd& Fk = transition.kinematic.F;
    const double g = transition.extent_gain;

    TrackerState out = state;
    out.x.head(k) = Fk * state.x.head(k);
    out.x.tail(n) = g * state.x.tail(n);

    out.P.topLeftCorner(k, k) =
        Fk * state.P.topLeftCorner(k, k) * Fk.transpose() + transition.kinematic.Q;
    if (n > 0) {
        out.P.topRightCorner(k, n) = g * (Fk * state.P.topRightCorner(k, n));
        out.P.bottomLeftCorner(n, k) = out.P.topRightCorner(k, n).transpose();
        out.P.bottomRightCorner(n, n) = (g * g) * state.P.bottomRightCorner(n, n) + transition.extent_q;
    }
    symmetrize(out.P);
    return out;
}

TrackerState measurement_update(const TrackerState& state, const PseudoMeasurement& pm,
                                UpdateMode mode, UpdateDiagnostics* diagnostics) {
    const Eigen::Index m = pm.h.size();
    if (pm.H.rows() != m || pm.H.cols() != state.dim() || pm.R.rows() != m || pm.R.cols() != m) {
        throw std::invalid_argument("measurement_update: pseudo-measurement dimensions mismatch");
    }
    if (m == 0) return state;
    if (mode == UpdateMode::batch || pm.block_sizes.size() <= 1) {
        return update_block(state, pm.h, pm.H, pm.R, diagnostics);
    }

    // Sequential: process independent noise blocks one after another; residuals of
    // later blocks are propagated linearly to the running mean.
    TrackerState cur = state;
    Eigen::Index row = 0;
    for (const Eigen::Index rows : pm.block_sizes) {
        const Eigen::MatrixXd Hb = pm.H.middleRows(row, rows);
        const Eigen::VectorXd hb = pm.h.segment(row, rows) + Hb * (cur.x - state.x);
        cur = update_block(cur, hb, Hb, pm.R.block(row, row, rows, rows), diagnostics);
        row += rows;
    }
    if (row != m) throw std::invalid_argument("measurement_update: block sizes do not cover h");
    return cur;
}

TrackerState mekf_reset(const TrackerState& state) {
    TrackerState out = state;
    out.q_ref = geometry::quat_product(geometry::delta_quat(state.deviation()), state.q_ref);
    out.x.segment<3>(motion::kDeviation).setZero();
    return out;
}

double min_eigenvalue(const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd S = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace gpeot::filter
