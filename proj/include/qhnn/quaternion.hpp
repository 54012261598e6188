#pragma once

#include <cmath>
#include <string>

namespace qhnn {

/// Quaternion q = w + x*i + y*j + z*k over double precision.
///
/// The product follows Hamilton's rules i^2 = j^2 = k^2 = ijk = -1; it is
/// associative but not commutative.
struct Quaternion {
    double w = 0.0;  ///< real part
    double x = 0.0;  ///< i coefficient
    double y = 0.0;  ///< j coefficient
    double z = 0.0;  ///< k coefficient

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion zero() { return {0.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion unit_i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion unit_j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion unit_k() { return {0.0, 0.0, 0.0, 1.0}; }

    constexpr double real() const { return w; }
    constexpr Quaternion vector_part() const { return {0.0, x, y, z}; }

    constexpr Quaternion conjugate() const { return {w, -x, -y, -z}; }

    constexpr double norm_squared() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_squared()); }

    constexpr bool operator==(const Quaternion&) const = default;

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& q) { return {-q.w, -q.x, -q.y, -q.z}; }

constexpr Quaternion operator*(double s, const Quaternion& q) {
    return {s * q.w, s * q.x, s * q.y, s * q.z};
}
constexpr Quaternion operator*(const Quaternion& q, double s) { return s * q; }
constexpr Quaternion operator/(const Quaternion& q, double s) {
    return {q.w / s, q.x / s, q.y / s, q.z / s};
}

/// Hamilton product pq = p0*q0 - p.q + p0*q + q0*p + p x q.
constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) {
    return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
}

/// Re(q̄p): the Euclidean inner product of p and q viewed as 4-vectors.
/// Satisfies real_inner(p, q) = |p||q| cos(A) with A the angle between them.
constexpr double real_inner(const Quaternion& p, const Quaternion& q) {
    return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
}

/// Phase-angle factors of a nonzero quaternion, q = |q| e^{i*phi} e^{k*psi} e^{j*theta},
/// with phi in [-pi, pi), psi in [-pi/4, pi/4], theta in [-pi/2, pi/2).
struct PhaseTriple {
    double phi = 0.0;
    double psi = 0.0;
    double theta = 0.0;

    constexpr bool operator==(const PhaseTriple&) const = default;
};

inline Quaternion exp_i(double a) { return {std::cos(a), std::sin(a), 0.0, 0.0}; }
inline Quaternion exp_j(double a) { return {std::cos(a), 0.0, std::sin(a), 0.0}; }
inline Quaternion exp_k(double a) { return {std::cos(a), 0.0, 0.0, std::sin(a)}; }

/// magnitude * e^{i*phi} e^{k*psi} e^{j*theta}, evaluated as two Hamilton products.
inline Quaternion from_phase_angles(const PhaseTriple& p, double magnitude = 1.0) {
    return magnitude * ((exp_i(p.phi) * exp_k(p.psi)) * exp_j(p.theta));
}

/// Quaternions whose |psi| is within this band of pi/4 are treated as
/// gimbal-locked: phi and theta are no longer numerically determined.
inline constexpr double kGimbalLockBand = 1e-9;

/// Why a quaternion has no unique phase-angle factorization.
enum class PhaseError { none, zero, gimbal_lock };

/// Result of a phase-angle extraction; `angles` is meaningful only when ok().
struct PhaseExtraction {
    PhaseTriple angles{};
    PhaseError error = PhaseError::none;

    bool ok() const { return error == PhaseError::none; }
};

/// Recovers the unique (phi, psi, theta) of q, or reports why none exists
/// (q = 0, or |psi| = pi/4 up to the lock band).
///
/// psi comes from arcsin of the doubled-angle invariant; theta and phi from
/// atan2 of theirs. The doubled-angle atan2 pins phi only modulo pi, so the
/// candidate is checked by reconstruction and shifted by pi when it lands on
/// -q instead of q. Boundary outputs phi = pi and theta = pi/2 wrap to the
/// lower interval ends.
PhaseExtraction to_phase_angles(const Quaternion& q);

/// True iff q has a unique phase-angle factorization (q != 0 and |psi| != pi/4).
bool is_phase_representable(const Quaternion& q);

/// Renders "a+bi+cj+dk" with 4 significant digits, e.g. "-0.1121+1.577i-5.207j+7.028k".
std::string to_string(const Quaternion& q);

}  // namespace qhnn
