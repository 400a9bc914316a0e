#include "qflow/interpolants.hpp"

#include <cmath>
#include <stdexcept>

namespace qflow {

double schedule_kappa(double t, const SchedulerConfig& cfg) { return 1.0 - std::exp(-cfg.gamma * t); }

LerpResult lerp_translation(const Vec3& x0, const Vec3& x1, double t) {
    return {(1.0 - t) * x0 + t * x1, x1 - x0};
}

UnitQuat slerp_exp(const UnitQuat& q0, const UnitQuat& q1, double t) {
    const UnitQuat q1a = align_hemisphere(q0, q1);
    const Vec3 rel = log_map(hamilton(inverse(q0), q1a));
    return hamilton(q0, exp_map(rel * t));
}

Quat slerp_additive(const UnitQuat& q0, const UnitQuat& q1, double t) {
    // phi is the full rotation angle: cos(phi/2) = <q0, q1>
    const double half_phi = std::acos(dot(q0, q1));
    const double den = std::sin(half_phi);
    const double w0 = std::sin((1.0 - t) * half_phi) / den;
    const double w1 = std::sin(t * half_phi) / den;
    return w0 * q0.quat() + w1 * q1.quat();
}

Quat slerp_additive_velocity(const UnitQuat& q0, const UnitQuat& q1, double t) {
    const double half_phi = std::acos(dot(q0, q1));
    const double phi = 2.0 * half_phi;
    const double den = 2.0 * std::sin(half_phi);
    return (phi / den) * (std::cos(t * half_phi) * q1.quat() - std::cos((1.0 - t) * half_phi) * q0.quat());
}

Mat3 matrix_geodesic(const Mat3& r0, const Mat3& r1, double t) {
    return r0 * mat_exp(mat_log(r0.transpose() * r1) * t);
}

Vec3 angular_velocity(const UnitQuat& q0, const UnitQuat& q1) {
    return log_map(hamilton(inverse(q0), align_hemisphere(q0, q1)));
}

UnitQuat scheduled_slerp(const UnitQuat& q0, const UnitQuat& q1, double t, const SchedulerConfig& cfg) {
    const UnitQuat q1a = align_hemisphere(q0, q1);
    const Vec3 rel = log_map(hamilton(inverse(q0), q1a));
    return hamilton(q0, exp_map(rel * schedule_kappa(t, cfg)));
}

Vec3 scheduled_angular_velocity(const Vec3& omega, double t, const SchedulerConfig& cfg) {
    return omega * (cfg.gamma * std::exp(-cfg.gamma * t));
}

Velocities endpoint_velocities(const Vec3& x_t, const UnitQuat& q_t, const Vec3& x1_pred,
                               const UnitQuat& q1_pred, double t, double min_t) {
    if (1.0 - t < min_t)
        throw std::domain_error("endpoint_velocities: t within min_t of 1 (division would blow up)");
    const double inv = 1.0 / (1.0 - t);
    return {(x1_pred - x_t) * inv, angular_velocity(q_t, q1_pred) * inv};
}

InterpolantSample make_interpolant_sample(const FrameTransform& t0, const FrameTransform& t1, double t) {
    InterpolantSample s;
    s.t = t;
    const LerpResult lerp = lerp_translation(t0.x, t1.x, t);
    s.x_t = lerp.x_t;
    s.v_target = lerp.v;
    s.q_t = slerp_exp(t0.q, t1.q, t);
    s.omega_target = angular_velocity(t0.q, t1.q);
    return s;
}

}  // namespace qflow
