#include "qflow/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace qflow {

void validate_solver_config(const SolverConfig& cfg) {
    if (cfg.steps < 1) throw std::invalid_argument("SolverConfig: steps must be >= 1");
    if (!(cfg.min_t >= 0.0 && cfg.min_t < 1.0))
        throw std::invalid_argument("SolverConfig: min_t must lie in [0, 1)");
    // last model evaluation happens at t = 1 - 1/steps; keep it <= 1 - min_t
    if (cfg.min_t > 0.0 && static_cast<double>(cfg.steps) > 1.0 / cfg.min_t)
        throw std::invalid_argument("SolverConfig: steps incompatible with min_t (grid crosses 1 - min_t)");
    if (cfg.scheduler_enabled && !(cfg.scheduler.gamma > 0.0))
        throw std::invalid_argument("SolverConfig: scheduler gamma must be > 0");
}

Vec3 euler_step_translation(const Vec3& x, const Vec3& v, double dt) { return x + v * dt; }

UnitQuat euler_step_quat_exp(const UnitQuat& q, const Vec3& omega_adj, double dt) {
    return UnitQuat::unchecked(hamilton(q.quat(), exp_map(omega_adj * dt).quat()));
}

Quat euler_step_quat_additive(const Quat& q, const Quat& eta, double dt, bool renormalize) {
    const Quat next = q + eta * dt;
    if (!renormalize) return next;
    const double n = next.norm();
    return n > 0.0 ? next * (1.0 / n) : next;
}

Mat3 euler_step_matrix(const Mat3& r, const Vec3& omega, double dt) { return r * mat_exp(omega * dt); }

namespace {

FrameTransform advance_one(const FrameTransform& state, const Vec3& x1_pred, const UnitQuat& q1_pred,
                           double t, double dt, const SolverConfig& cfg) {
    FrameTransform next = state;

    const double to_go_trans = std::max(1.0 - t, cfg.min_t);
    const Vec3 v = (x1_pred - state.x) * (1.0 / to_go_trans);
    next.x = euler_step_translation(state.x, v, dt);

    const Vec3 rem = log_map(hamilton(inverse(state.q), align_hemisphere(state.q, q1_pred)));
    Vec3 omega_adj;
    if (cfg.scheduler_enabled) {
        const double gamma = cfg.scheduler.gamma;
        const double decay = std::exp(-gamma * t);             // 1 - kappa(t)
        const double to_go_rot = std::max(decay, cfg.min_t);
        omega_adj = rem * (gamma * decay / to_go_rot);
    } else {
        omega_adj = rem * (1.0 / to_go_trans);
    }
    next.q = euler_step_quat_exp(state.q, omega_adj, dt);
    return next;
}

}  // namespace

FrameTransform integrate_path(const EndpointModel& model, const FrameTransform& start,
                              const SolverConfig& cfg) {
    validate_solver_config(cfg);
    const int steps = cfg.steps;
    const double dt = 1.0 / steps;
    FrameTransform state = start;
    for (int k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const auto [x1_pred, q1_pred] = model(state, t);
        state = advance_one(state, x1_pred, q1_pred, t, dt, cfg);
    }
    return state;
}

std::vector<FrameTransform> integrate_path_trace(const EndpointModel& model, const FrameTransform& start,
                                                 const SolverConfig& cfg) {
    validate_solver_config(cfg);
    const int steps = cfg.steps;
    const double dt = 1.0 / steps;
    std::vector<FrameTransform> trace;
    trace.reserve(steps + 1);
    trace.push_back(start);
    for (int k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const auto [x1_pred, q1_pred] = model(trace.back(), t);
        trace.push_back(advance_one(trace.back(), x1_pred, q1_pred, t, dt, cfg));
    }
    return trace;
}

}  // namespace qflow
