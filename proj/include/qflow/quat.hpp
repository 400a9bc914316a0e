#pragma once

#include "qflow/linalg.hpp"

namespace qflow {

// Taylor branch threshold for the exp/log small-angle series.
inline constexpr double kSmallAngle = 1e-8;
// Tolerance for checked conversions that claim unit norm.
inline constexpr double kUnitNormTol = 1e-6;

// General quaternion as the 4-vector [s, u^T]; not necessarily unit.
struct Quat {
    double s = 1.0;
    Vec3 u{};

    constexpr Quat operator+(const Quat& o) const { return {s + o.s, u + o.u}; }
    constexpr Quat operator-(const Quat& o) const { return {s - o.s, u - o.u}; }
    constexpr Quat operator-() const { return {-s, -u}; }
    constexpr Quat operator*(double k) const { return {s * k, u * k}; }

    constexpr double norm2() const { return s * s + u.norm2(); }
    double norm() const { return std::sqrt(norm2()); }
};

constexpr Quat operator*(double k, const Quat& q) { return q * k; }

constexpr double dot(const Quat& a, const Quat& b) { return a.s * b.s + dot(a.u, b.u); }

// Hamilton product; defined for all quaternions, norm-multiplicative.
Quat hamilton(const Quat& a, const Quat& b);

bool is_finite(const Quat& q);

// Rotation on the unit 3-sphere. q and -q act identically on vectors.
class UnitQuat {
public:
    UnitQuat() = default;

    static UnitQuat identity() { return {}; }

    // Normalizes arbitrary nonzero input; throws std::invalid_argument on (near-)zero.
    static UnitQuat from_parts(double s, const Vec3& u);
    static UnitQuat normalize(const Quat& q) { return from_parts(q.s, q.u); }

    // Checked conversion: rejects inputs whose norm deviates from 1 beyond tol.
    static UnitQuat from_unit(const Quat& q, double tol = kUnitNormTol);

    // Caller guarantees the value is unit up to rounding; no renormalization.
    // Used where the algebra itself preserves the norm (exp map, products of units).
    static UnitQuat unchecked(const Quat& q) { return UnitQuat(q); }

    double s() const { return q_.s; }
    const Vec3& u() const { return q_.u; }
    const Quat& quat() const { return q_; }

    UnitQuat operator-() const { return UnitQuat(-q_); }

private:
    explicit UnitQuat(const Quat& q) : q_(q) {}
    Quat q_{1.0, {}};
};

UnitQuat hamilton(const UnitQuat& a, const UnitQuat& b);

inline double dot(const UnitQuat& a, const UnitQuat& b) { return dot(a.quat(), b.quat()); }

// Conjugate; equals the inverse for unit quaternions.
UnitQuat inverse(const UnitQuat& q);

// Axis-angle omega = phi*u (phi = |omega|) -> [cos(phi/2), sin(phi/2) u].
UnitQuat exp_map(const Vec3& omega);

// Inverse of exp_map. Returns phi*u with phi = 2*atan2(|u|, s) in [0, pi];
// operates on -q when s < 0 so the angle stays canonical.
Vec3 log_map(const UnitQuat& q);

// Im(q (x) [0, v] (x) q^-1); length-preserving.
Vec3 rotate_vector(const UnitQuat& q, const Vec3& v);

Mat3 quat_to_matrix(const UnitQuat& q);

// Shepperd-style extraction (branch by largest diagonal), canonical s >= 0.
// Throws std::invalid_argument if r is not a rotation within tol.
UnitQuat matrix_to_quat(const Mat3& r, double tol = kUnitNormTol);

bool is_rotation_matrix(const Mat3& r, double tol);

// Rodrigues formula.
Mat3 mat_exp(const Vec3& omega);

// Angle from acos((tr-1)/2), axis from the antisymmetric part. This is the
// numerically naive form used by the matrix-based systems we benchmark
// against; its loss of precision as phi -> pi is a measured quantity, so no
// stabilized large-angle branch is substituted.
Vec3 mat_log(const Mat3& r);

// q1 if <q0,q1> >= 0 else -q1, so interpolation takes the shorter geodesic.
UnitQuat align_hemisphere(const UnitQuat& q0, const UnitQuat& q1);

// Rotation angle between q0 and q1 after hemisphere alignment; in [0, pi].
double geodesic_distance(const UnitQuat& q0, const UnitQuat& q1);

}  // namespace qflow
