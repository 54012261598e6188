#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qhnn/quaternion.hpp"

namespace qhnn {

/// Resolution factors (K1, K2, K3) and the derived phase quanta
/// dphi = 2*pi/K1, dpsi = pi/(2*K2), dtheta = pi/K3.
///
/// Each phase-angle of a multivalued neuron lives on a finite grid of arc
/// midpoints; grid member l of K slots is lo + quantum*l + quantum/2 (this
/// ordering keeps the midpoints exact for power-of-two K).
struct ResolutionFactors {
    int k1 = 2;
    int k2 = 2;
    int k3 = 2;

    double phi_quantum() const;
    double psi_quantum() const;
    double theta_quantum() const;

    double phi_value(int l) const;    ///< midpoint l of the phi grid, l in [0, k1)
    double psi_value(int l) const;    ///< midpoint l of the psi grid, l in [0, k2)
    double theta_value(int l) const;  ///< midpoint l of the theta grid, l in [0, k3)

    constexpr bool operator==(const ResolutionFactors&) const = default;
};

/// Grid coordinates (l1, l2, l3) of a multivalued neuron state.
struct PhaseIndices {
    int l1 = 0;
    int l2 = 0;
    int l3 = 0;

    constexpr bool operator==(const PhaseIndices&) const = default;
};

PhaseTriple angles_of(const PhaseIndices& idx, const ResolutionFactors& k);

/// n x n quaternionic synaptic weight matrix, row-major.
class WeightMatrix {
public:
    WeightMatrix() = default;
    explicit WeightMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n) {}

    int size() const { return n_; }

    const Quaternion& operator()(int i, int j) const {
        return entries_[static_cast<std::size_t>(i) * n_ + j];
    }
    Quaternion& operator()(int i, int j) {
        return entries_[static_cast<std::size_t>(i) * n_ + j];
    }

    bool operator==(const WeightMatrix&) const = default;

private:
    int n_ = 0;
    std::vector<Quaternion> entries_;
};

/// Vector of n unit-quaternion neuron states. Multivalued states carry the
/// integer grid indices as the ground truth; the quaternion values are derived
/// from them, which keeps revisit detection exact.
class NetworkState {
public:
    NetworkState() = default;

    static NetworkState from_quaternions(std::vector<Quaternion> values);
    static NetworkState from_indices(std::vector<PhaseIndices> indices,
                                     const ResolutionFactors& k);

    int size() const { return static_cast<int>(values_.size()); }

    const Quaternion& value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<Quaternion>& values() const { return values_; }

    bool has_indices() const { return indices_.has_value(); }
    const PhaseIndices& indices(int i) const { return (*indices_)[static_cast<std::size_t>(i)]; }
    const std::vector<PhaseIndices>& index_vector() const { return *indices_; }

    void set_value(int i, const Quaternion& q);
    void set_indices(int i, const PhaseIndices& idx, const ResolutionFactors& k);

    bool operator==(const NetworkState&) const = default;

private:
    std::vector<Quaternion> values_;
    std::optional<std::vector<PhaseIndices>> indices_;
};

/// v_i = sum_j w_ij * x_j, with the weight on the left of each product.
Quaternion activation_potential(const WeightMatrix& w, const NetworkState& x, int i);

/// The quadratic form x* W x (a quaternion; analytically real when the weight
/// conditions hold, so its vector part measures rounding/violation residue).
Quaternion state_quadratic_form(const WeightMatrix& w, const NetworkState& x);

/// E(x) = -1/2 Re(x* W x).
double energy(const WeightMatrix& w, const NetworkState& x);

/// One weight-condition violation: an off-diagonal pair breaking w_ij = conj(w_ji)
/// or a diagonal entry that is not real and nonnegative.
struct WeightViolation {
    int row = 0;
    int col = 0;
    double deviation = 0.0;
};

/// Outcome of checking w_ij = conj(w_ji) and w_ii real >= 0.
struct ConditionReport {
    bool hermitian_ok = true;
    bool diagonal_ok = true;
    double max_hermitian_deviation = 0.0;  ///< max |w_ij - conj(w_ji)| over pairs
    double max_diagonal_deviation = 0.0;   ///< max of |Ve(w_ii)| and max(0, -Re(w_ii))
    std::vector<WeightViolation> violations;

    bool pass() const { return hermitian_ok && diagonal_ok; }
};

ConditionReport validate_weights(const WeightMatrix& w, double tolerance = 1e-12);

/// Zero-diagonal Hermitian matrix with N(0, 1/2) entry components: the
/// U = (R + R*)/2, W = U - diag(U) construction with R component-wise standard
/// normal. The lower triangle is mirrored as exact conjugates, so the symmetry
/// holds bitwise. Deterministic in the seed.
WeightMatrix random_hermitian_weights(int n, std::uint64_t seed);

/// n neuron states drawn uniformly from the K-grid (each index uniform in
/// {0,...,Km-1}). Deterministic in the seed.
NetworkState random_state(int n, const ResolutionFactors& k, std::uint64_t seed);

}  // namespace qhnn
