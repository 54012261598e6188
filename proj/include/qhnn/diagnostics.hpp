#pragma once

#include "qhnn/network.hpp"

namespace qhnn {

/// The X terms of the single-neuron energy variation identity
/// deltaE = -(X1 - X2) + w_ii (X3 - 1), computed from their definitions:
/// X1 = Re(conj(x_i(t+dt)) v_i), X2 = Re(conj(x_i(t)) v_i),
/// X3 = Re(conj(x_i(t+dt)) x_i(t)).
struct EnergyTerms {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

EnergyTerms energy_terms(const Quaternion& before, const Quaternion& after,
                         const Quaternion& potential);

double delta_e_from_terms(const EnergyTerms& terms, double w_ii_real);

/// Full decomposition of one multivalued single-neuron transition.
///
/// The x*_closed fields evaluate the trigonometric expansions of X1/X2/X3 in
/// the integer shifts (a, b, c) and residual shifts; tests cross-check them
/// against the definitional values. h1_holds/h2_holds report the two
/// assumptions of the historical convergence argument:
///   (H1) a = 0 iff dphi_shift = 0, and c = 0 iff dtheta_shift = 0;
///   (H2) every residual shift is smaller than its quantum.
struct DeltaEDecomposition {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    double x1_closed = 0.0;
    double x2_closed = 0.0;
    double x3_closed = 0.0;
    long long a = 0;  ///< phi steps: phi(t+dt) = phi(t) + a * dphi
    long long b = 0;  ///< psi steps
    long long c = 0;  ///< theta steps
    double dphi_shift = 0.0;    ///< alpha - phi(t+dt), reduced to (-pi, pi]
    double dpsi_shift = 0.0;    ///< beta - psi(t+dt)
    double dtheta_shift = 0.0;  ///< gamma - theta(t+dt)
    double w_ii = 0.0;
    double delta_e = 0.0;  ///< -(x1 - x2) + w_ii (x3 - 1)
    double cos_a1 = 0.0;   ///< x1 / |v|
    double cos_a2 = 0.0;   ///< x2 / |v|
    double cos_a3 = 0.0;   ///< x3
    bool h1_holds = false;
    bool h2_holds = false;
};

/// Decomposes the transition of neuron i between two index-backed states that
/// differ at most at that neuron. Throws std::invalid_argument when the states
/// differ elsewhere, carry no indices, or the potential has no unique
/// phase-angle factorization.
DeltaEDecomposition decompose(const WeightMatrix& w, const NetworkState& before,
                              const NetworkState& after, int i, const ResolutionFactors& k);

/// cos(A1), cos(A2), cos(A3): angles of x_i(t+dt) vs v_i, x_i(t) vs v_i, and
/// x_i(t+dt) vs x_i(t), as 4-vectors.
struct CosineView {
    double cos_a1 = 0.0;
    double cos_a2 = 0.0;
    double cos_a3 = 0.0;
};

/// Throws std::invalid_argument on a zero potential.
CosineView cosine_view(const NetworkState& before, const NetworkState& after,
                       const Quaternion& potential, int i);

}  // namespace qhnn
