#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qhnn/network.hpp"

namespace qhnn {

/// The three update rules.
///
/// mv_qhnn replaces one phase-angle of a neuron by the quantized angle of its
/// activation potential; mv_qhnn3 replaces all three simultaneously; cv_qhnn
/// normalizes the potential to length one (the infinite-resolution limit).
enum class ModelKind { mv_qhnn, mv_qhnn3, cv_qhnn };

/// Asynchronous: one neuron at a time, each update visible immediately.
/// Parallel: every neuron of a sweep computed from the sweep-start snapshot.
enum class UpdateMode { asynchronous, parallel };

enum class AngleSelector { phi, psi, theta };

/// Event timestamp as an exact fraction of a time unit.
struct RationalTime {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    constexpr bool operator==(const RationalTime&) const = default;
};

/// Arc-midpoint quantization of a phase triple: each angle maps to the
/// midpoint of the grid arc containing it (floor formula, index clamped to
/// the valid range). The outputs stay within half a quantum of the inputs;
/// that bound is asserted on every call and tallied in the module counters.
PhaseIndices quantize_to_indices(const PhaseTriple& vp, const ResolutionFactors& k);
PhaseTriple quantize(const PhaseTriple& vp, const ResolutionFactors& k);

std::uint64_t quantize_call_count();
std::uint64_t quantize_violation_count();
void reset_quantize_stats();

/// Proposed next value of one neuron. `indices` is present for the MV rules.
struct NeuronUpdate {
    Quaternion value;
    std::optional<PhaseIndices> indices;
    bool changed = false;
};

/// Single-angle rule: the selected phase-angle of neuron i moves to the
/// quantized angle of v_i; the other two keep their current values. No-op when
/// v_i has no unique phase-angle factorization.
NeuronUpdate step_mvqhnn(const WeightMatrix& w, const NetworkState& x, int i,
                         const ResolutionFactors& k, AngleSelector selector);

/// Three-angle rule: all phase-angles of neuron i move at once. Same no-op rule.
NeuronUpdate step_mvqhnn3(const WeightMatrix& w, const NetworkState& x, int i,
                          const ResolutionFactors& k);

/// Continuous rule: x_i becomes v_i/|v_i| unless |v_i| <= zero_tolerance.
/// `changed` reports whether some component moved by more than
/// change_tolerance.
NeuronUpdate step_cvqhnn(const WeightMatrix& w, const NetworkState& x, int i,
                         double zero_tolerance = 1e-12, double change_tolerance = 1e-9);

struct TraceEvent {
    RationalTime t;
    double energy = 0.0;
    int neuron = -1;  ///< 0-based; -1 for the initial row and whole-network events
    bool changed = false;
};

/// Detail of a single-neuron update, available to observers.
struct Transition {
    int neuron = 0;
    Quaternion before;
    Quaternion after;
    Quaternion potential;
    std::optional<PhaseIndices> idx_before;
    std::optional<PhaseIndices> idx_after;
};

/// Snapshot handed to an observer after every update event. The pointers stay
/// valid only during the callback.
struct UpdateEvent {
    RationalTime t;
    int neuron = -1;  ///< -1 for whole-network (parallel) events
    bool changed = false;
    double energy_after = 0.0;
    double delta_e = 0.0;
    const Transition* transition = nullptr;   ///< null for whole-network events
    const NetworkState* state_before = nullptr;
    const NetworkState* state_after = nullptr;
};

using EventObserver = std::function<void(const UpdateEvent&)>;

enum class Verdict { converged, periodic, exhausted };

struct RunConfig {
    ModelKind model = ModelKind::cv_qhnn;
    UpdateMode mode = UpdateMode::asynchronous;
    std::optional<ResolutionFactors> resolution;  ///< required by the MV models
    std::int64_t t_max = 1000;                    ///< time-unit budget
    double cv_state_tolerance = 1e-9;             ///< CV change/revisit tolerance
    double zero_potential_tolerance = 1e-12;
    bool record_trace = true;
    bool record_unit_states = false;
    EventObserver observer;
};

struct TrajectoryOutcome {
    Verdict verdict = Verdict::exhausted;
    RationalTime convergence_time;   ///< converged: time of the last state change
    std::int64_t period = 0;         ///< periodic: cycle length in time units
    std::int64_t first_entry = 0;    ///< periodic: unit at which the cycle starts
    std::int64_t units_elapsed = 0;
    double final_energy = 0.0;
    std::uint64_t change_events = 0;
    NetworkState final_state;
    std::vector<TraceEvent> trace;          ///< leading t=0 row, then one per event
    std::vector<NetworkState> unit_states;  ///< states at t = 0, 1, 2, ...
};

/// Evolves x0 under the configured model/mode until it is stationary for a
/// full time unit (converged), revisits a unit-boundary state (periodic),
/// or exhausts t_max.
///
/// Scheduling follows the sweep-by-angle discipline: the MV-QHNN updates phi
/// of neurons 1..n, then psi, then theta within each unit (delta-t = 1/(3n)
/// async, 1/3 per parallel sub-sweep); the MV-QHNN3 and CV-QHNN update each
/// neuron once per unit (delta-t = 1/n async, 1 parallel). Energy is recorded
/// after every event.
///
/// A change event is an index move for the grid models (exact). The
/// continuous model applies v/|v| verbatim; an asynchronous event counts as a
/// change when its energy drop clears twice the 1e-12 (1+|E|) monotonicity
/// slack (plain cv_state_tolerance move threshold when the weight conditions
/// fail), which keeps sub-rounding creep out of the change count and makes
/// the convergence verdict fire at an energy resolution comparable to a grid
/// snap. Revisits compare unit-boundary states: exact index match for the
/// grid models, per-component cv_state_tolerance match for the continuous
/// one.
TrajectoryOutcome run(const WeightMatrix& w, const NetworkState& x0, const RunConfig& cfg);

struct BudgetExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exhaustively lists the MV grid states invariant under a full time-unit
/// sweep (every neuron update a no-op). Throws BudgetExceededError when
/// (K1*K2*K3)^n exceeds the budget.
std::vector<NetworkState> enumerate_fixed_points(ModelKind model, const WeightMatrix& w,
                                                 const ResolutionFactors& k,
                                                 double budget = 1e6);

/// Largest per-component difference between two equally sized states.
double max_state_discrepancy(const NetworkState& a, const NetworkState& b);

}  // namespace qhnn
