#include "qflow/quat.hpp"

#include <cmath>
#include <stdexcept>

namespace qflow {

Quat hamilton(const Quat& a, const Quat& b) {
    return {a.s * b.s - dot(a.u, b.u), a.s * b.u + b.s * a.u + cross(a.u, b.u)};
}

bool is_finite(const Quat& q) { return std::isfinite(q.s) && is_finite(q.u); }

UnitQuat UnitQuat::from_parts(double s, const Vec3& u) {
    const Quat q{s, u};
    const double n = q.norm();
    if (!(n > 1e-150)) throw std::invalid_argument("UnitQuat: cannot normalize near-zero quaternion");
    return UnitQuat(q * (1.0 / n));
}

UnitQuat UnitQuat::from_unit(const Quat& q, double tol) {
    const double n = q.norm();
    if (!(std::abs(n - 1.0) <= tol))
        throw std::invalid_argument("UnitQuat: norm deviates from 1 beyond tolerance");
    return UnitQuat(q * (1.0 / n));
}

UnitQuat hamilton(const UnitQuat& a, const UnitQuat& b) {
    return UnitQuat::unchecked(hamilton(a.quat(), b.quat()));
}

UnitQuat inverse(const UnitQuat& q) { return UnitQuat::unchecked(Quat{q.s(), -q.u()}); }

UnitQuat exp_map(const Vec3& omega) {
    const double phi = omega.norm();
    const double half = 0.5 * phi;
    // sin(phi/2)/phi, with its series below the small-angle threshold
    const double k = phi < kSmallAngle ? 0.5 - phi * phi / 48.0 : std::sin(half) / phi;
    return UnitQuat::unchecked(Quat{std::cos(half), omega * k});
}

Vec3 log_map(const UnitQuat& q) {
    double s = q.s();
    Vec3 u = q.u();
    if (s < 0.0) {
        s = -s;
        u = -u;
    }
    const double n = u.norm();
    if (n < kSmallAngle) {
        // 2*atan2(n, s)/n -> (2/s)(1 - n^2/(3 s^2)) as n -> 0
        return u * ((2.0 / s) * (1.0 - n * n / (3.0 * s * s)));
    }
    return u * (2.0 * std::atan2(n, s) / n);
}

Vec3 rotate_vector(const UnitQuat& q, const Vec3& v) {
    return hamilton(hamilton(q.quat(), Quat{0.0, v}), inverse(q).quat()).u;
}

Mat3 quat_to_matrix(const UnitQuat& q) {
    const double s = q.s();
    const double x = q.u().x, y = q.u().y, z = q.u().z;
    Mat3 r;
    r(0, 0) = 1.0 - 2.0 * (y * y + z * z);
    r(0, 1) = 2.0 * (x * y - s * z);
    r(0, 2) = 2.0 * (x * z + s * y);
    r(1, 0) = 2.0 * (x * y + s * z);
    r(1, 1) = 1.0 - 2.0 * (x * x + z * z);
    r(1, 2) = 2.0 * (y * z - s * x);
    r(2, 0) = 2.0 * (x * z - s * y);
    r(2, 1) = 2.0 * (y * z + s * x);
    r(2, 2) = 1.0 - 2.0 * (x * x + y * y);
    return r;
}

bool is_rotation_matrix(const Mat3& r, double tol) {
    const Mat3 rtr = r.transpose() * r;
    if (max_abs_diff(rtr, Mat3::identity()) > tol) return false;
    return std::abs(r.det() - 1.0) <= tol;
}

UnitQuat matrix_to_quat(const Mat3& r, double tol) {
    if (!is_rotation_matrix(r, tol))
        throw std::invalid_argument("matrix_to_quat: input is not a rotation matrix within tolerance");

    // Branch by the largest of {trace, r00, r11, r22} for stability.
    const double tr = r.trace();
    double s, x, y, z;
    if (tr > r(0, 0) && tr > r(1, 1) && tr > r(2, 2)) {
        const double t = std::sqrt(1.0 + tr);
        s = 0.5 * t;
        const double f = 0.5 / t;
        x = (r(2, 1) - r(1, 2)) * f;
        y = (r(0, 2) - r(2, 0)) * f;
        z = (r(1, 0) - r(0, 1)) * f;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double t = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
        x = 0.5 * t;
        const double f = 0.5 / t;
        s = (r(2, 1) - r(1, 2)) * f;
        y = (r(0, 1) + r(1, 0)) * f;
        z = (r(0, 2) + r(2, 0)) * f;
    } else if (r(1, 1) > r(2, 2)) {
        const double t = std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
        y = 0.5 * t;
        const double f = 0.5 / t;
        s = (r(0, 2) - r(2, 0)) * f;
        x = (r(0, 1) + r(1, 0)) * f;
        z = (r(1, 2) + r(2, 1)) * f;
    } else {
        const double t = std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
        z = 0.5 * t;
        const double f = 0.5 / t;
        s = (r(1, 0) - r(0, 1)) * f;
        x = (r(0, 2) + r(2, 0)) * f;
        y = (r(1, 2) + r(2, 1)) * f;
    }
    if (s < 0.0) {
        s = -s;
        x = -x;
        y = -y;
        z = -z;
    }
    return UnitQuat::from_parts(s, {x, y, z});
}

Mat3 mat_exp(const Vec3& omega) {
    const double phi = omega.norm();
    // R = I + a*W + b*W^2, W = skew(omega), a = sin(phi)/phi, b = (1-cos(phi))/phi^2
    double a, b;
    if (phi < kSmallAngle) {
        a = 1.0 - phi * phi / 6.0;
        b = 0.5 - phi * phi / 24.0;
    } else {
        a = std::sin(phi) / phi;
        b = (1.0 - std::cos(phi)) / (phi * phi);
    }
    Mat3 w{};
    w(0, 1) = -omega.z;
    w(0, 2) = omega.y;
    w(1, 0) = omega.z;
    w(1, 2) = -omega.x;
    w(2, 0) = -omega.y;
    w(2, 1) = omega.x;
    return Mat3::identity() + w * a + (w * w) * b;
}

Vec3 mat_log(const Mat3& r) {
    double c = 0.5 * (r.trace() - 1.0);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    const double phi = std::acos(c);
    const Vec3 vee{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
    if (phi < 1e-7) {
        // small angles: phi/(2 sin phi) -> 1/2
        return vee * (0.5 * (1.0 + phi * phi / 6.0));
    }
    return vee * (phi / (2.0 * std::sin(phi)));
}

UnitQuat align_hemisphere(const UnitQuat& q0, const UnitQuat& q1) {
    return dot(q0, q1) >= 0.0 ? q1 : -q1;
}

double geodesic_distance(const UnitQuat& q0, const UnitQuat& q1) {
    return log_map(hamilton(inverse(q0), align_hemisphere(q0, q1))).norm();
}

}  // namespace qflow
