#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qflow/frame.hpp"
#include "qflow/interpolants.hpp"

namespace qflow {

struct SolverConfig {
    int steps = 500;
    SchedulerConfig scheduler{};
    bool scheduler_enabled = true;
    // Floor protecting the time-to-go division during integration. Distinct
    // from the training-time kInterpolantMinT: the inference grid stops at
    // t = 1 - 1/steps, so any floor <= 1/steps is never active.
    double min_t = 1e-6;
};

// Throws std::invalid_argument when steps < 1 or steps is incompatible with
// min_t (the last grid point would cross 1 - min_t).
void validate_solver_config(const SolverConfig& cfg);

Vec3 euler_step_translation(const Vec3& x, const Vec3& v, double dt);

// q (x) exp(dt * omega_adj); stays unit to rounding with no renormalization.
UnitQuat euler_step_quat_exp(const UnitQuat& q, const Vec3& omega_adj, double dt);

// q + dt * eta. Norm drifts off 1 unless renormalize is set; non-finite
// values propagate (that is a measured outcome, not an error).
Quat euler_step_quat_additive(const Quat& q, const Quat& eta, double dt, bool renormalize);

Mat3 euler_step_matrix(const Mat3& r, const Vec3& omega, double dt);

// Endpoint predictor: maps (state, t) to the predicted (x1, q1).
using EndpointModel = std::function<std::pair<Vec3, UnitQuat>(const FrameTransform&, double)>;

// Explicit Euler over t_k = k/L, model evaluated at the left endpoint.
// Translation follows the (x1_pred - x_t)/(1 - t) velocity. The rotation
// channel, when the scheduler is on, measures time-to-go on the scheduler
// clock (1 - kappa(t) = exp(-gamma t)); combined with the gamma exp(-gamma t)
// velocity factor each update covers a gamma*dt fraction of the remaining
// geodesic, which is what lands the oracle at the exp(-gamma)*phi residual of
// the scheduled interpolant.
FrameTransform integrate_path(const EndpointModel& model, const FrameTransform& start,
                              const SolverConfig& cfg);

// Same walk, returning all L+1 states (index k = state at t = k/L).
std::vector<FrameTransform> integrate_path_trace(const EndpointModel& model, const FrameTransform& start,
                                                 const SolverConfig& cfg);

}  // namespace qflow
