#include "qhnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qhnn/rng.hpp"

namespace qhnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_positive(int k) {
    if (k < 1) throw std::invalid_argument("resolution factors must be positive");
}

}  // namespace

double ResolutionFactors::phi_quantum() const { return 2.0 * kPi / k1; }
double ResolutionFactors::psi_quantum() const { return kPi / (2.0 * k2); }
double ResolutionFactors::theta_quantum() const { return kPi / k3; }

double ResolutionFactors::phi_value(int l) const {
    const double d = phi_quantum();
    return (-kPi + d * l) + d / 2.0;
}

double ResolutionFactors::psi_value(int l) const {
    const double d = psi_quantum();
    return (-kPi / 4.0 + d * l) + d / 2.0;
}

double ResolutionFactors::theta_value(int l) const {
    const double d = theta_quantum();
    return (-kPi / 2.0 + d * l) + d / 2.0;
}

PhaseTriple angles_of(const PhaseIndices& idx, const ResolutionFactors& k) {
    return {k.phi_value(idx.l1), k.psi_value(idx.l2), k.theta_value(idx.l3)};
}

NetworkState NetworkState::from_quaternions(std::vector<Quaternion> values) {
    NetworkState s;
    s.values_ = std::move(values);
    return s;
}

NetworkState NetworkState::from_indices(std::vector<PhaseIndices> indices,
                                        const ResolutionFactors& k) {
    check_positive(k.k1);
    check_positive(k.k2);
    check_positive(k.k3);
    NetworkState s;
    s.values_.reserve(indices.size());
    for (const PhaseIndices& idx : indices) s.values_.push_back(from_phase_angles(angles_of(idx, k)));
    s.indices_ = std::move(indices);
    return s;
}

void NetworkState::set_value(int i, const Quaternion& q) {
    values_[static_cast<std::size_t>(i)] = q;
    indices_.reset();
}

void NetworkState::set_indices(int i, const PhaseIndices& idx, const ResolutionFactors& k) {
    if (!indices_) throw std::logic_error("state carries no phase indices");
    (*indices_)[static_cast<std::size_t>(i)] = idx;
    values_[static_cast<std::size_t>(i)] = from_phase_angles(angles_of(idx, k));
}

Quaternion activation_potential(const WeightMatrix& w, const NetworkState& x, int i) {
    if (i < 0 || i >= w.size()) throw std::out_of_range("neuron index out of range");
    Quaternion v;
    for (int j = 0; j < w.size(); ++j) v += w(i, j) * x.value(j);
    return v;
}

Quaternion state_quadratic_form(const WeightMatrix& w, const NetworkState& x) {
    Quaternion total;
    for (int i = 0; i < w.size(); ++i) {
        Quaternion v;
        for (int j = 0; j < w.size(); ++j) v += w(i, j) * x.value(j);
        total += x.value(i).conjugate() * v;
    }
    return total;
}

double energy(const WeightMatrix& w, const NetworkState& x) {
    double sum = 0.0;
    for (int i = 0; i < w.size(); ++i) {
        Quaternion v;
        for (int j = 0; j < w.size(); ++j) v += w(i, j) * x.value(j);
        sum += real_inner(x.value(i), v);  // Re(conj(x_i) v)
    }
    return -0.5 * sum;
}

ConditionReport validate_weights(const WeightMatrix& w, double tolerance) {
    ConditionReport report;
    for (int i = 0; i < w.size(); ++i) {
        const Quaternion& d = w(i, i);
        const double imag = d.vector_part().norm();
        const double neg = std::max(0.0, -d.real());
        const double dev = std::max(imag, neg);
        report.max_diagonal_deviation = std::max(report.max_diagonal_deviation, dev);
        if (dev > tolerance) {
            report.diagonal_ok = false;
            report.violations.push_back({i, i, dev});
        }
        for (int j = i + 1; j < w.size(); ++j) {
            const double dev_ij = (w(i, j) - w(j, i).conjugate()).norm();
            report.max_hermitian_deviation = std::max(report.max_hermitian_deviation, dev_ij);
            if (dev_ij > tolerance) {
                report.hermitian_ok = false;
                report.violations.push_back({i, j, dev_ij});
            }
        }
    }
    return report;
}

WeightMatrix random_hermitian_weights(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("neuron count must be positive");
    RandomSource rng(mix_seed(seed));
    WeightMatrix w(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Quaternion r_ij{rng.next_normal(), rng.next_normal(), rng.next_normal(),
                                  rng.next_normal()};
            const Quaternion r_ji{rng.next_normal(), rng.next_normal(), rng.next_normal(),
                                  rng.next_normal()};
            w(i, j) = 0.5 * (r_ij + r_ji.conjugate());
            w(j, i) = w(i, j).conjugate();
        }
    }
    return w;
}

NetworkState random_state(int n, const ResolutionFactors& k, std::uint64_t seed) {
    check_positive(k.k1);
    check_positive(k.k2);
    check_positive(k.k3);
    RandomSource rng(mix_seed(seed));
    std::vector<PhaseIndices> indices(static_cast<std::size_t>(n));
    for (PhaseIndices& idx : indices) {
        idx.l1 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k.k1)));
        idx.l2 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k.k2)));
        idx.l3 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k.k3)));
    }
    return NetworkState::from_indices(std::move(indices), k);
}

}  // namespace qhnn
