#pragma once

#include "qflow/frame.hpp"
#include "qflow/quat.hpp"

namespace qflow {

// Training-time floor on t: samples are drawn from [min_t, 1 - min_t] so the
// endpoint-velocity division by (1 - t) stays bounded.
inline constexpr double kInterpolantMinT = 0.01;

struct SchedulerConfig {
    double gamma = 10.0;
};

// kappa(t) = 1 - exp(-gamma t); the interpolation fraction under the scheduler.
double schedule_kappa(double t, const SchedulerConfig& cfg);

struct LerpResult {
    Vec3 x_t;
    Vec3 v;  // constant velocity x1 - x0
};

LerpResult lerp_translation(const Vec3& x0, const Vec3& x1, double t);

// q0 (x) exp(t log(q0^-1 (x) q1)), with q1 hemisphere-aligned to q0 first.
// Well defined for all unit inputs including q0 = +/- q1.
UnitQuat slerp_exp(const UnitQuat& q0, const UnitQuat& q1, double t);

// Additive-format SLERP, implemented without small-angle guards: dividing by
// sin(phi/2) at phi -> 0 is the failure mode under measurement, so the result
// may be non-finite. Returned unnormalized.
Quat slerp_additive(const UnitQuat& q0, const UnitQuat& q1, double t);

// Tangent velocity of the additive format at time t (for its Euler solver).
Quat slerp_additive_velocity(const UnitQuat& q0, const UnitQuat& q1, double t);

// r0 exp_M(t log_M(r0^T r1)) using the naive mat_log.
Mat3 matrix_geodesic(const Mat3& r0, const Mat3& r1, double t);

// Constant angular velocity of the geodesic: 2 log(q0^-1 (x) q1), aligned.
Vec3 angular_velocity(const UnitQuat& q0, const UnitQuat& q1);

// q0 (x) exp(kappa(t) log(q0^-1 (x) q1)). Note kappa(1) < 1: the scheduled
// interpolant stops exp(-gamma)*phi short of q1 by construction.
UnitQuat scheduled_slerp(const UnitQuat& q0, const UnitQuat& q1, double t, const SchedulerConfig& cfg);

// gamma exp(-gamma t) * omega: the angular velocity of the scheduled path.
Vec3 scheduled_angular_velocity(const Vec3& omega, double t, const SchedulerConfig& cfg);

struct Velocities {
    Vec3 v;
    Vec3 omega;
};

// Endpoint-prediction to velocities: v = (x1_pred - x_t)/(1-t),
// omega = 2 log(q_t^-1 (x) q1_pred)/(1-t) with hemisphere alignment.
// Throws std::domain_error when t is within min_t of 1.
Velocities endpoint_velocities(const Vec3& x_t, const UnitQuat& q_t, const Vec3& x1_pred,
                               const UnitQuat& q1_pred, double t, double min_t = kInterpolantMinT);

// One training sample on the interpolant path with its target velocities.
struct InterpolantSample {
    Vec3 x_t;
    UnitQuat q_t;
    double t = 0.0;
    Vec3 v_target;
    Vec3 omega_target;
};

InterpolantSample make_interpolant_sample(const FrameTransform& t0, const FrameTransform& t1, double t);

}  // namespace qflow
