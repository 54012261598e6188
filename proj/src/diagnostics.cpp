#include "qhnn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qhnn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroShiftTolerance = 1e-9;

// Reduce to (-pi, pi].
double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Re(conj(u) w) for u = e^{i p1}e^{k s1}e^{j t1}, w = e^{i p2}e^{k s2}e^{j t2}:
//   cos(dp)cos(ds)cos(dt) + sin(dp) sin(s1 + s2) sin(dt),
// with dp = p2 - p1, ds = s2 - s1, dt = t2 - t1.
double factored_inner(double dp, double ds, double dt, double psi_sum) {
    return std::cos(dp) * std::cos(ds) * std::cos(dt) +
           std::sin(dp) * std::sin(psi_sum) * std::sin(dt);
}

void check_single_neuron_diff(const NetworkState& before, const NetworkState& after, int i) {
    if (before.size() != after.size())
        throw std::invalid_argument("states differ in size");
    if (i < 0 || i >= before.size()) throw std::invalid_argument("neuron index out of range");
    for (int j = 0; j < before.size(); ++j) {
        if (j != i && !(before.value(j) == after.value(j)))
            throw std::invalid_argument("states differ at more than one neuron");
    }
}

}  // namespace

EnergyTerms energy_terms(const Quaternion& before, const Quaternion& after,
                         const Quaternion& potential) {
    return {real_inner(after, potential), real_inner(before, potential),
            real_inner(after, before)};
}

double delta_e_from_terms(const EnergyTerms& terms, double w_ii_real) {
    return -(terms.x1 - terms.x2) + w_ii_real * (terms.x3 - 1.0);
}

DeltaEDecomposition decompose(const WeightMatrix& w, const NetworkState& before,
                              const NetworkState& after, int i, const ResolutionFactors& k) {
    check_single_neuron_diff(before, after, i);
    if (!before.has_indices() || !after.has_indices())
        throw std::invalid_argument("decomposition needs index-backed states");

    const Quaternion v = activation_potential(w, before, i);
    const PhaseExtraction vp = to_phase_angles(v);
    if (!vp.ok())
        throw std::invalid_argument("potential has no unique phase-angle factorization");

    const PhaseIndices& li = before.indices(i);
    const PhaseIndices& lf = after.indices(i);
    const PhaseTriple angles_before = angles_of(li, k);
    const PhaseTriple angles_after = angles_of(lf, k);

    DeltaEDecomposition d;
    d.a = lf.l1 - li.l1;
    d.b = lf.l2 - li.l2;
    d.c = lf.l3 - li.l3;
    d.dphi_shift = wrap_angle(vp.angles.phi - angles_after.phi);
    d.dpsi_shift = wrap_angle(vp.angles.psi - angles_after.psi);
    d.dtheta_shift = wrap_angle(vp.angles.theta - angles_after.theta);
    d.w_ii = w(i, i).real();

    const EnergyTerms terms = energy_terms(before.value(i), after.value(i), v);
    d.x1 = terms.x1;
    d.x2 = terms.x2;
    d.x3 = terms.x3;
    d.delta_e = delta_e_from_terms(terms, d.w_ii);

    const double vn = v.norm();
    d.cos_a1 = clamp_unit(d.x1 / vn);
    d.cos_a2 = clamp_unit(d.x2 / vn);
    d.cos_a3 = clamp_unit(d.x3);

    const double dphi = k.phi_quantum();
    const double dpsi = k.psi_quantum();
    const double dtheta = k.theta_quantum();
    const double psi_t = angles_before.psi;
    const double a_dphi = static_cast<double>(d.a) * dphi;
    const double b_dpsi = static_cast<double>(d.b) * dpsi;
    const double c_dtheta = static_cast<double>(d.c) * dtheta;

    // X3: angles of x(t+dt) -> x(t) differ by (-a dphi, -b dpsi, -c dtheta);
    // the psi factors sum to 2 psi(t) + b dpsi.
    d.x3_closed = factored_inner(-a_dphi, -b_dpsi, -c_dtheta, 2.0 * psi_t + b_dpsi);
    // X1: x(t+dt) -> v differs by the residual shifts.
    d.x1_closed = vn * factored_inner(d.dphi_shift, d.dpsi_shift, d.dtheta_shift,
                                      2.0 * psi_t + 2.0 * b_dpsi + d.dpsi_shift);
    // X2: x(t) -> v differs by integer steps plus residual shifts.
    d.x2_closed = vn * factored_inner(a_dphi + d.dphi_shift, b_dpsi + d.dpsi_shift,
                                      c_dtheta + d.dtheta_shift,
                                      2.0 * psi_t + b_dpsi + d.dpsi_shift);

    const bool phi_zero = std::abs(d.dphi_shift) < kZeroShiftTolerance;
    const bool theta_zero = std::abs(d.dtheta_shift) < kZeroShiftTolerance;
    d.h1_holds = ((d.a == 0) == phi_zero) && ((d.c == 0) == theta_zero);
    d.h2_holds = std::abs(d.dphi_shift) < dphi && std::abs(d.dpsi_shift) < dpsi &&
                 std::abs(d.dtheta_shift) < dtheta;
    return d;
}

CosineView cosine_view(const NetworkState& before, const NetworkState& after,
                       const Quaternion& potential, int i) {
    check_single_neuron_diff(before, after, i);
    const double vn = potential.norm();
    if (vn == 0.0) throw std::invalid_argument("zero potential has no direction");

    const Quaternion& xb = before.value(i);
    const Quaternion& xa = after.value(i);
    CosineView view;
    view.cos_a1 = clamp_unit(real_inner(xa, potential) / (xa.norm() * vn));
    view.cos_a2 = clamp_unit(real_inner(xb, potential) / (xb.norm() * vn));
    view.cos_a3 = clamp_unit(real_inner(xa, xb) / (xa.norm() * xb.norm()));
    return view;
}

}  // namespace qhnn
