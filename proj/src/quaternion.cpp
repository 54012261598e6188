#include "qhnn/quaternion.hpp"

#include <algorithm>
#include <cstdio>

namespace qhnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

PhaseExtraction to_phase_angles(const Quaternion& q) {
    PhaseExtraction out;
    const double n2 = q.norm_squared();
    if (n2 == 0.0) {
        out.error = PhaseError::zero;
        return out;
    }

    // sin(2*psi) = 2(q0 q3 - q1 q2) / |q|^2
    const double sin_two_psi = 2.0 * (q.w * q.z - q.x * q.y) / n2;
    if (std::abs(sin_two_psi) >= 1.0 - kGimbalLockBand) {
        out.error = PhaseError::gimbal_lock;
        return out;
    }
    const double psi = 0.5 * std::asin(clamp_unit(sin_two_psi));

    // atan2 of (sin, cos) of the doubled angles; both scaled by cos(2*psi) > 0.
    double theta = 0.5 * std::atan2(2.0 * (q.w * q.y + q.x * q.z),
                                    q.w * q.w + q.x * q.x - q.y * q.y - q.z * q.z);
    if (theta >= kPi / 2.0) theta = -kPi / 2.0;

    double phi = 0.5 * std::atan2(2.0 * (q.w * q.x + q.y * q.z),
                                  q.w * q.w - q.x * q.x + q.y * q.y - q.z * q.z);
    // phi is determined modulo pi so far; the reconstruction picks between q and -q.
    const Quaternion probe = from_phase_angles({phi, psi, theta});
    if (real_inner(probe, q) < 0.0) phi += (phi > 0.0) ? -kPi : kPi;
    if (phi >= kPi) phi = -kPi;

    out.angles = {phi, psi, theta};
    return out;
}

bool is_phase_representable(const Quaternion& q) {
    return to_phase_angles(q).ok();
}

std::string to_string(const Quaternion& q) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.4g%+.4gi%+.4gj%+.4gk", q.w, q.x, q.y, q.z);
    return buf;
}

}  // namespace qhnn
