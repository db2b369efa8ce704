#include "gpeot/tracker.hpp"

#include <cmath>
#include <numbers>

namespace gpeot::tracking {

using Eigen::Index;
using Eigen::MatrixXd;

TrackerConfig TrackerConfig::gpeot_defaults() {
    TrackerConfig cfg;
    cfg.kind = TrackerKind::gpeot;
    cfg.hyper.length_scale = std::numbers::pi / 8.0;
    cfg.noise.sigma_alpha = 0.1;
    return cfg;
}

TrackerConfig TrackerConfig::gpeot_p_defaults() {
    TrackerConfig cfg;
    cfg.kind = TrackerKind::gpeot_p;
    cfg.hyper.length_scale = std::numbers::pi / 5.0;
    cfg.noise.sigma_alpha = 0.4;
    return cfg;
}

void TrackerConfig::validate() const {
    hyper.validate();
    noise.validate();
    projection.validate();
    filter.validate();
    if (sphere_level < 0) throw std::invalid_argument("TrackerConfig: sphere_level must be >= 0");
    if (circle_points < 3) throw std::invalid_argument("TrackerConfig: circle_points must be >= 3");
    const double sigmas[] = {prior.sigma_center, prior.sigma_velocity, prior.sigma_deviation,
                             prior.sigma_rate};
    for (const double s : sigmas) {
        if (!(s > 0.0)) throw std::invalid_argument("TrackerConfig: prior sigmas must be > 0");
    }
}

meas::ExtentModels build_models(const TrackerConfig& cfg) {
    meas::ExtentModels out;
    out.kind = cfg.kind;
    out.projection = cfg.projection;
    if (cfg.kind == TrackerKind::gpeot) {
        out.models.push_back(gp::build_extent_model(gp::make_sphere_grid(cfg.sphere_level), cfg.hyper,
                                                    gp::KernelKind::geodesic3d));
    } else {
        for (const auto kind : cfg.projection.kernel_kinds) {
            out.models.push_back(
                gp::build_extent_model(gp::make_circle_grid(cfg.circle_points), cfg.hyper, kind));
        }
    }
    return out;
}

filter::TrackerState initial_state(const TrackerConfig& cfg, const meas::ExtentModels& models,
                                   const meas::MeasurementFrame& first_frame) {
    constexpr Index k = motion::kKinematicDim;
    const Index n = models.extent_dim();
    filter::TrackerState s;
    s.t = first_frame.t;
    s.x = Eigen::VectorXd::Zero(k + n);

    Vec3 centroid = Vec3::Zero();
    for (const auto& p : first_frame.points) centroid += p;
    if (!first_frame.points.empty()) centroid /= static_cast<double>(first_frame.points.size());

    s.x.segment<3>(motion::kCenter) = cfg.prior.center.value_or(centroid);
    s.q_ref = cfg.prior.orientation;
    s.x.segment<3>(motion::kVelocity) = cfg.prior.velocity;
    s.x.segment<3>(motion::kRate) = cfg.prior.rate;
    s.x.tail(n) = models.prior_mean();

    s.P = MatrixXd::Zero(k + n, k + n);
    const auto sq = [](double v) { return v * v; };
    s.P.block<3, 3>(motion::kCenter, motion::kCenter).diagonal().setConstant(sq(cfg.prior.sigma_center));
    s.P.block<3, 3>(motion::kVelocity, motion::kVelocity).diagonal().setConstant(sq(cfg.prior.sigma_velocity));
    s.P.block<3, 3>(motion::kDeviation, motion::kDeviation).diagonal().setConstant(sq(cfg.prior.sigma_deviation));
    s.P.block<3, 3>(motion::kRate, motion::kRate).diagonal().setConstant(sq(cfg.prior.sigma_rate));
    s.P.bottomRightCorner(n, n) = models.prior_cov();
    return s;
}

filter::StructuredTransition make_transition(const TrackerConfig& cfg,
                                             const meas::ExtentModels& models,
                                             const filter::TrackerState& state, double T) {
    const motion::LinearBlock trans = motion::translational_fq(T, cfg.noise.sigma_c);
    const motion::LinearBlock rot =
        motion::rotational_fq(state.rate(), T, cfg.noise.sigma_alpha, cfg.noise.alpha_axis_mask);

    filter::StructuredTransition tr;
    tr.kinematic.F = MatrixXd::Zero(motion::kKinematicDim, motion::kKinematicDim);
    tr.kinematic.Q = MatrixXd::Zero(motion::kKinematicDim, motion::kKinematicDim);
    tr.kinematic.F.topLeftCorner(6, 6) = trans.F;
    tr.kinematic.Q.topLeftCorner(6, 6) = trans.Q;
    tr.kinematic.F.bottomRightCorner(6, 6) = rot.F;
    tr.kinematic.Q.bottomRightCorner(6, 6) = rot.Q;

    const Index n = models.extent_dim();
    if (cfg.noise.extent_dynamics == motion::ExtentDynamics::max_entropy) {
        tr.extent_gain = 1.0;
        tr.extent_q = motion::extent_q_max_entropy(state.P.bottomRightCorner(n, n), cfg.noise.lambda);
    } else {
        const motion::LinearBlock f =
            motion::extent_fq_forgetting(cfg.noise.forgetting_alpha, T, models.prior_cov());
        tr.extent_gain = f.F.rows() > 0 ? f.F(0, 0) : 1.0;
        tr.extent_q = f.Q;
    }
    return tr;
}

filter::TrackerState step(const filter::TrackerState& state, const meas::MeasurementFrame& frame,
                          const TrackerConfig& cfg, const meas::ExtentModels& models,
                          StepReport* report) {
    StepReport local;
    StepReport& rep = report != nullptr ? *report : local;
    rep = StepReport{};

    if (frame.t < state.t) {
        throw std::invalid_argument("step: frame time precedes the state time");
    }
    filter::TrackerState cur = state;
    const double T = frame.t - state.t;
    if (T > 0.0) {
        cur = filter::time_update(cur, make_transition(cfg, models, cur, T));
        cur.t = frame.t;
        rep.predicted = true;
    }
    if (frame.points.empty()) {
        return cur;
    }

    try {
        const filter::PseudoMeasurement pm =
            meas::build_frame_pseudo_meas(cur, frame, models, cfg.filter, cfg.jacobian_mode);
        rep.skipped_points = pm.skipped_points;
        rep.used_points = static_cast<int>(frame.points.size()) - pm.skipped_points;
        filter::UpdateDiagnostics diag;
        filter::TrackerState updated =
            filter::measurement_update(cur, pm, cfg.filter.update_mode, &diag);
        rep.ill_conditioned = diag.min_rcond * cfg.filter.max_condition_warn < 1.0;
        cur = filter::mekf_reset(updated);
        rep.updated = true;
    } catch (const meas::EmptyFrameError& e) {
        rep.error = e.what();
        rep.skipped_points = static_cast<int>(frame.points.size());
    } catch (const filter::JacobianError& e) {
        rep.error = e.what();
    } catch (const filter::UpdateError& e) {
        rep.error = e.what();
    }
    return cur;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    models_ = build_models(cfg_);
}

StepReport Tracker::process(const meas::MeasurementFrame& frame) {
    if (!state_) {
        state_ = initial_state(cfg_, models_, frame);
    }
    StepReport rep;
    state_ = step(*state_, frame, cfg_, models_, &rep);
    return rep;
}

}  // namespace gpeot::tracking
