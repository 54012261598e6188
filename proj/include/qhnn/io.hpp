#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "qhnn/dynamics.hpp"
#include "qhnn/network.hpp"

namespace qhnn {

/// A weight matrix plus an initial state, as stored in an instance file.
struct Instance {
    WeightMatrix weights;
    NetworkState state;
};

/// Instance JSON layout:
///   {"n": 2,
///    "weights": [[[q0,q1,q2,q3], ...], ...],
///    "state":   [[q0,q1,q2,q3], ...],
///    "indices": [[l1,l2,l3], ...]}      // optional, present for grid states
/// Numbers round-trip losslessly. Indices are honored when the caller
/// supplies the resolution factors that give them meaning; otherwise the
/// plain state values are loaded.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text,
                            const std::optional<ResolutionFactors>& k = std::nullopt);

Instance load_instance(const std::string& path,
                       const std::optional<ResolutionFactors>& k = std::nullopt);
void save_instance(const std::string& path, const Instance& inst);

/// Energy trace CSV: header `t_num,t_den,energy,neuron,changed`, one row per
/// trace entry. `neuron` is 1-based; 0 marks the initial row and whole-network
/// events. Energies are written with full precision.
void write_trace_csv(std::ostream& os, const TrajectoryOutcome& outcome);

/// Verdict JSON: {"verdict": ..., "t": ..., "period": ..., "final_energy": ...}.
/// `t` is the convergence time for converged runs, the first cycle entry for
/// periodic runs, and the exhausted budget otherwise; `period` is 0 unless
/// periodic.
std::string verdict_to_json(const TrajectoryOutcome& outcome);

std::string format_full(double v);  ///< shortest round-trip decimal form

}  // namespace qhnn
