#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qhnn/dynamics.hpp"
#include "qhnn/io.hpp"
#include "qhnn/network.hpp"

namespace qhnn {

/// The two-neuron counterexample network shared by the worked examples:
/// W = [[0, 5+i+7j+2k], [5-i-7j-2k, 0]], x(0) = both neurons at the lowest
/// grid member of the K = (2,2,2) grid.
struct ExampleInstance {
    WeightMatrix weights;
    NetworkState x0;
    ResolutionFactors resolution;
};

ExampleInstance counterexample_instance();

/// One compared quantity of a reproduction run.
struct ReproCheck {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ReproReport {
    int example_id = 0;
    std::vector<ReproCheck> checks;
    bool all_pass = true;

    void add(const std::string& name, double expected, double actual, double tolerance);
};

/// Re-runs worked example 1 (single-angle rule), 2 (three-angle rule) or
/// 3 (continuous rule) on the counterexample network and compares every
/// printed quantity: potentials, phase-angles, quantized angles, shifts,
/// energies and verdicts.
ReproReport reproduce_example(int id);

void print_report(std::ostream& os, const ReproReport& report);
std::string report_to_json(const ReproReport& report);

/// Convergence-probability study configuration. Every trial draws one weight
/// matrix; for each resolution one initial state; every (model, mode) cell
/// then runs from that same instance, which makes the per-cell probabilities
/// directly comparable.
struct SweepConfig {
    int n = 20;
    int trials = 30;
    std::int64_t t_max = 200;
    std::vector<ResolutionFactors> resolutions;  ///< empty selects the default grid
    std::vector<std::pair<ModelKind, UpdateMode>> cells;  ///< empty selects all six
    std::uint64_t master_seed = 20180646;
    bool full_scale = false;  ///< n=100, trials=100, t_max=1000, K = 2^1..2^20
    double trial_time_cap_seconds = 0.0;  ///< 0 disables the per-trial budget

    static std::vector<ResolutionFactors> default_resolutions(bool full_scale);
    void apply_scale();
};

struct SweepCell {
    ModelKind model{};
    UpdateMode mode{};
    ResolutionFactors resolution;
    int trials = 0;
    int converged = 0;
    double probability = 0.0;
    double mean_t_conv = 0.0;         ///< NaN when no trial converged
    std::vector<Verdict> verdicts;    ///< per trial, in trial order
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::uint64_t cv_async_monotonicity_violations = 0;

    const SweepCell& cell(ModelKind model, UpdateMode mode, const ResolutionFactors& k) const;
};

SweepResult convergence_sweep(const SweepConfig& cfg);

/// CSV: model,mode,K1,K2,K3,trials,converged,probability,mean_t_conv
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// Lockstep comparison of the asynchronous three-angle rule at resolution
/// k_big against the asynchronous continuous rule, from the same instance.
struct ComparisonReport {
    Verdict mv_verdict{};
    Verdict cv_verdict{};
    bool verdicts_agree = false;
    double max_event_discrepancy = 0.0;  ///< over common events, per component
    double per_step_bound = 0.0;         ///< 2 (dphi + dpsi + dtheta)
    std::int64_t events_compared = 0;
    bool within_accumulated_bound = false;  ///< discrepancy <= events * per_step_bound
};

ComparisonReport large_k_equivalence(const WeightMatrix& w, const NetworkState& x0,
                                     const ResolutionFactors& k_big, std::int64_t t_max);

const char* model_name(ModelKind m);
const char* mode_name(UpdateMode m);
const char* verdict_name(Verdict v);

}  // namespace qhnn
