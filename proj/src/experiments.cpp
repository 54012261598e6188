#include "qhnn/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "qhnn/diagnostics.hpp"
#include "qhnn/rng.hpp"

namespace qhnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Seed stream tags for deriving per-trial generators from the master seed.
constexpr std::uint64_t kWeightStream = 1;
constexpr std::uint64_t kStateStream = 2;

}  // namespace

ExampleInstance counterexample_instance() {
    ExampleInstance inst;
    inst.resolution = {2, 2, 2};
    inst.weights = WeightMatrix(2);
    const Quaternion u{5.0, 1.0, 7.0, 2.0};
    inst.weights(0, 1) = u;
    inst.weights(1, 0) = u.conjugate();
    inst.x0 = NetworkState::from_indices({{0, 0, 0}, {0, 0, 0}}, inst.resolution);
    return inst;
}

void ReproReport::add(const std::string& name, double expected, double actual,
                      double tolerance) {
    const bool pass = std::abs(expected - actual) <= tolerance;
    checks.push_back({name, expected, actual, tolerance, pass});
    all_pass = all_pass && pass;
}

namespace {

void add_verdict_check(ReproReport& report, const std::string& name, Verdict expected,
                       Verdict actual) {
    report.add(name, 1.0, (expected == actual) ? 1.0 : 0.0, 0.0);
}

void add_quaternion_checks(ReproReport& report, const std::string& name, const Quaternion& expected,
                           const Quaternion& actual, double tolerance) {
    report.add(name + ".q0", expected.w, actual.w, tolerance);
    report.add(name + ".q1", expected.x, actual.x, tolerance);
    report.add(name + ".q2", expected.y, actual.y, tolerance);
    report.add(name + ".q3", expected.z, actual.z, tolerance);
}

ReproReport reproduce_example1() {
    ReproReport report;
    report.example_id = 1;
    const ExampleInstance inst = counterexample_instance();
    const ResolutionFactors& k = inst.resolution;

    report.add("E(x(0))", -5.0, energy(inst.weights, inst.x0), 1e-9);

    const Quaternion v1 = activation_potential(inst.weights, inst.x0, 0);
    add_quaternion_checks(report, "v1(0)", {-0.1121, 1.577, -5.207, 7.028}, v1, 5e-4);
    report.add("|v1(0)|", 8.888, v1.norm(), 1e-3);

    const PhaseExtraction vp = to_phase_angles(v1);
    report.add("v1(0) representable", 1.0, vp.ok() ? 1.0 : 0.0, 0.0);
    report.add("alpha1(0)", 2.1939, vp.angles.phi, 5e-4);
    report.add("beta1(0)", 0.09455, vp.angles.psi, 5e-4);
    report.add("gamma1(0)", 1.4181, vp.angles.theta, 5e-4);

    const PhaseTriple mid = quantize(vp.angles, k);
    report.add("phi_M", kPi / 2.0, mid.phi, 0.0);
    report.add("psi_M", kPi / 8.0, mid.psi, 0.0);
    report.add("theta_M", kPi / 4.0, mid.theta, 0.0);

    // First event: the phi-angle of neuron 1 moves to phi_M.
    const NeuronUpdate upd = step_mvqhnn(inst.weights, inst.x0, 0, k, AngleSelector::phi);
    NetworkState x_next = inst.x0;
    x_next.set_indices(0, *upd.indices, k);
    report.add("x1(1/6) index l1", 1.0, upd.indices->l1, 0.0);
    report.add("x1(1/6) index l2", 0.0, upd.indices->l2, 0.0);
    report.add("x1(1/6) index l3", 0.0, upd.indices->l3, 0.0);
    report.add("E(x(1/6))", 5.0, energy(inst.weights, x_next), 1e-9);

    const DeltaEDecomposition d = decompose(inst.weights, inst.x0, x_next, 0, k);
    report.add("a", 1.0, static_cast<double>(d.a), 0.0);
    report.add("b", 0.0, static_cast<double>(d.b), 0.0);
    report.add("c", 0.0, static_cast<double>(d.c), 0.0);
    report.add("delta_phi", 0.6231, d.dphi_shift, 5e-4);
    report.add("delta_psi", 0.4873, d.dpsi_shift, 5e-4);
    report.add("delta_theta", 2.2035, d.dtheta_shift, 5e-4);
    report.add("H1 violated", 1.0, d.h1_holds ? 0.0 : 1.0, 0.0);
    report.add("H2 violated", 1.0, d.h2_holds ? 0.0 : 1.0, 0.0);
    report.add("deltaE(0 -> 1/6)", 10.0, d.delta_e, 1e-9);

    RunConfig cfg;
    cfg.model = ModelKind::mv_qhnn;
    cfg.mode = UpdateMode::asynchronous;
    cfg.resolution = k;
    cfg.t_max = 100;
    const TrajectoryOutcome async_out = run(inst.weights, inst.x0, cfg);
    add_verdict_check(report, "async verdict periodic", Verdict::periodic, async_out.verdict);
    report.add("trace E(0)", -5.0, async_out.trace.at(0).energy, 1e-9);
    report.add("trace E(1/6)", 5.0, async_out.trace.at(1).energy, 1e-9);
    report.add("trace E(1/3)", -5.0, async_out.trace.at(2).energy, 1e-9);

    cfg.mode = UpdateMode::parallel;
    const TrajectoryOutcome par_out = run(inst.weights, inst.x0, cfg);
    add_verdict_check(report, "parallel verdict periodic", Verdict::periodic, par_out.verdict);
    return report;
}

ReproReport reproduce_example2() {
    ReproReport report;
    report.example_id = 2;
    const ExampleInstance inst = counterexample_instance();
    const ResolutionFactors& k = inst.resolution;

    const NeuronUpdate upd = step_mvqhnn3(inst.weights, inst.x0, 0, k);
    report.add("x1(1/2) index l1", 1.0, upd.indices->l1, 0.0);
    report.add("x1(1/2) index l2", 1.0, upd.indices->l2, 0.0);
    report.add("x1(1/2) index l3", 1.0, upd.indices->l3, 0.0);
    add_quaternion_checks(report, "x1(1/2)",
                          from_phase_angles({kPi / 2.0, kPi / 8.0, kPi / 4.0}), upd.value, 0.0);

    NetworkState x_next = inst.x0;
    x_next.set_indices(0, *upd.indices, k);
    report.add("E(x(1/2))", -7.0, energy(inst.weights, x_next), 1e-9);

    RunConfig cfg;
    cfg.model = ModelKind::mv_qhnn3;
    cfg.mode = UpdateMode::asynchronous;
    cfg.resolution = k;
    cfg.t_max = 100;
    const TrajectoryOutcome async_out = run(inst.weights, inst.x0, cfg);
    add_verdict_check(report, "async verdict periodic", Verdict::periodic, async_out.verdict);
    report.add("trace E(1/2)", -7.0, async_out.trace.at(1).energy, 1e-9);

    cfg.mode = UpdateMode::parallel;
    const TrajectoryOutcome par_out = run(inst.weights, inst.x0, cfg);
    add_verdict_check(report, "parallel verdict periodic", Verdict::periodic, par_out.verdict);
    return report;
}

ReproReport reproduce_example3() {
    ReproReport report;
    report.example_id = 3;
    const ExampleInstance inst = counterexample_instance();
    const double e0 = energy(inst.weights, inst.x0);

    RunConfig cfg;
    cfg.model = ModelKind::cv_qhnn;
    cfg.mode = UpdateMode::asynchronous;
    cfg.t_max = 100;
    cfg.record_unit_states = true;
    const TrajectoryOutcome async_out = run(inst.weights, inst.x0, cfg);
    add_verdict_check(report, "async verdict converged", Verdict::converged, async_out.verdict);
    report.add("async t*", 0.5, async_out.convergence_time.value(), 0.0);
    add_quaternion_checks(report, "x1(1/2)", {-0.01261, 0.1774, -0.5858, 0.7907},
                          async_out.unit_states.at(1).value(0), 5e-4);
    add_quaternion_checks(report, "x2(1/2)", {-0.2706, -0.6533, -0.2706, 0.6533},
                          async_out.unit_states.at(1).value(1), 5e-4);
    report.add("async final energy", -8.888, async_out.final_energy, 1e-3);
    report.add("async deltaE", -3.888, async_out.final_energy - e0, 1e-3);

    cfg.mode = UpdateMode::parallel;
    cfg.t_max = 10;
    const TrajectoryOutcome par_out = run(inst.weights, inst.x0, cfg);
    add_verdict_check(report, "parallel verdict periodic", Verdict::periodic, par_out.verdict);
    report.add("parallel period", 2.0, static_cast<double>(par_out.period), 0.0);
    report.add("parallel first entry", 0.0, static_cast<double>(par_out.first_entry), 0.0);
    add_quaternion_checks(report, "x1(1)", {-0.01261, 0.1774, -0.5858, 0.7907},
                          par_out.unit_states.at(1).value(0), 5e-4);
    add_quaternion_checks(report, "x2(1)", {-0.2918, -0.9124, 0.2814, -0.05567},
                          par_out.unit_states.at(1).value(1), 5e-4);
    report.add("x(2) = x(0)", 0.0,
               max_state_discrepancy(par_out.unit_states.at(2), inst.x0), 1e-9);
    report.add("parallel E(x(1))", -5.0, par_out.trace.at(1).energy, 1e-9);
    report.add("parallel E(x(2))", -5.0, par_out.trace.at(2).energy, 1e-9);
    return report;
}

}  // namespace

ReproReport reproduce_example(int id) {
    switch (id) {
        case 1: return reproduce_example1();
        case 2: return reproduce_example2();
        case 3: return reproduce_example3();
        default: throw std::invalid_argument("example id must be 1, 2 or 3");
    }
}

void print_report(std::ostream& os, const ReproReport& report) {
    char line[160];
    os << "example " << report.example_id << " reproduction\n";
    for (const ReproCheck& c : report.checks) {
        std::snprintf(line, sizeof(line), "  %-28s expected %-12.4g actual %-12.4g %s\n",
                      c.name.c_str(), c.expected, c.actual, c.pass ? "ok" : "FAIL");
        os << line;
    }
    os << (report.all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
}

std::string report_to_json(const ReproReport& report) {
    nlohmann::json j;
    j["example"] = report.example_id;
    j["all_pass"] = report.all_pass;
    nlohmann::json checks = nlohmann::json::array();
    for (const ReproCheck& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"expected", c.expected},
                          {"actual", c.actual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    }
    j["checks"] = std::move(checks);
    return j.dump(2) + "\n";
}

std::vector<ResolutionFactors> SweepConfig::default_resolutions(bool full_scale) {
    std::vector<ResolutionFactors> ks;
    if (full_scale) {
        for (int m = 1; m <= 20; ++m) {
            const int k = 1 << m;
            ks.push_back({k, k, k});
        }
    } else {
        for (int m : {1, 2, 4, 8, 17}) {
            const int k = 1 << m;
            ks.push_back({k, k, k});
        }
    }
    return ks;
}

void SweepConfig::apply_scale() {
    if (full_scale) {
        n = 100;
        trials = 100;
        t_max = 1000;
    }
    if (resolutions.empty()) resolutions = default_resolutions(full_scale);
    if (cells.empty()) {
        for (ModelKind model :
             {ModelKind::mv_qhnn, ModelKind::mv_qhnn3, ModelKind::cv_qhnn}) {
            cells.emplace_back(model, UpdateMode::asynchronous);
            cells.emplace_back(model, UpdateMode::parallel);
        }
    }
}

const SweepCell& SweepResult::cell(ModelKind model, UpdateMode mode,
                                   const ResolutionFactors& k) const {
    for (const SweepCell& c : cells) {
        if (c.model == model && c.mode == mode && c.resolution == k) return c;
    }
    throw std::out_of_range("no such sweep cell");
}

SweepResult convergence_sweep(const SweepConfig& config) {
    SweepConfig cfg = config;
    cfg.apply_scale();
    if (cfg.trials < 1) throw std::invalid_argument("sweep needs at least one trial");
    if (cfg.n < 1) throw std::invalid_argument("sweep needs at least one neuron");

    SweepResult result;
    for (const auto& [model, mode] : cfg.cells) {
        for (const ResolutionFactors& k : cfg.resolutions) {
            SweepCell c;
            c.model = model;
            c.mode = mode;
            c.resolution = k;
            c.trials = cfg.trials;
            result.cells.push_back(c);
        }
    }
    std::vector<double> t_conv_sums(result.cells.size(), 0.0);

    std::uint64_t monotone_violations = 0;
    double last_energy = 0.0;
    EventObserver monotone_observer = [&](const UpdateEvent& ev) {
        const double slack = 1e-12 * (1.0 + std::abs(last_energy));
        if (ev.energy_after > last_energy + slack) ++monotone_violations;
        last_energy = ev.energy_after;
    };

    const auto t_start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const WeightMatrix w =
            random_hermitian_weights(cfg.n, mix_seed(cfg.master_seed, kWeightStream, trial));

        for (std::size_t ki = 0; ki < cfg.resolutions.size(); ++ki) {
            const ResolutionFactors& k = cfg.resolutions[ki];
            const NetworkState x0 = random_state(
                cfg.n, k, mix_seed(mix_seed(cfg.master_seed, kStateStream, trial), ki));

            std::size_t cell_index = ki;
            for (const auto& [model, mode] : cfg.cells) {
                RunConfig rc;
                rc.model = model;
                rc.mode = mode;
                rc.t_max = cfg.t_max;
                rc.record_trace = false;
                if (model != ModelKind::cv_qhnn) rc.resolution = k;
                if (model == ModelKind::cv_qhnn && mode == UpdateMode::asynchronous) {
                    last_energy = energy(w, x0);
                    rc.observer = monotone_observer;
                }
                const TrajectoryOutcome out = run(w, x0, rc);
                SweepCell& cell = result.cells[cell_index];
                cell.verdicts.push_back(out.verdict);
                if (out.verdict == Verdict::converged) {
                    cell.converged += 1;
                    t_conv_sums[cell_index] += out.convergence_time.value();
                }
                cell_index += cfg.resolutions.size();
            }
        }

        if (cfg.trial_time_cap_seconds > 0.0) {
            const std::chrono::duration<double> elapsed =
                std::chrono::steady_clock::now() - t_start;
            if (elapsed.count() > cfg.trial_time_cap_seconds * (trial + 1))
                throw BudgetExceededError("sweep exceeded the per-trial time budget");
        }
    }

    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        SweepCell& c = result.cells[i];
        c.probability = static_cast<double>(c.converged) / c.trials;
        c.mean_t_conv = (c.converged > 0)
                            ? t_conv_sums[i] / c.converged
                            : std::numeric_limits<double>::quiet_NaN();
    }
    result.cv_async_monotonicity_violations = monotone_violations;
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "model,mode,K1,K2,K3,trials,converged,probability,mean_t_conv\n";
    for (const SweepCell& c : result.cells) {
        os << model_name(c.model) << ',' << mode_name(c.mode) << ',' << c.resolution.k1 << ','
           << c.resolution.k2 << ',' << c.resolution.k3 << ',' << c.trials << ','
           << c.converged << ',' << format_full(c.probability) << ','
           << format_full(c.mean_t_conv) << '\n';
    }
}

ComparisonReport large_k_equivalence(const WeightMatrix& w, const NetworkState& x0,
                                     const ResolutionFactors& k_big, std::int64_t t_max) {
    if (k_big.k1 < 2 || k_big.k2 < 2 || k_big.k3 < 2)
        throw std::invalid_argument("large-K comparison needs K components >= 2");

    auto collect = [&](ModelKind model, std::vector<NetworkState>& states) {
        RunConfig rc;
        rc.model = model;
        rc.mode = UpdateMode::asynchronous;
        rc.t_max = t_max;
        rc.record_trace = false;
        if (model != ModelKind::cv_qhnn) rc.resolution = k_big;
        rc.observer = [&states](const UpdateEvent& ev) { states.push_back(*ev.state_after); };
        return run(w, x0, rc);
    };

    std::vector<NetworkState> mv_states;
    std::vector<NetworkState> cv_states;
    const TrajectoryOutcome mv_out = collect(ModelKind::mv_qhnn3, mv_states);
    const TrajectoryOutcome cv_out = collect(ModelKind::cv_qhnn, cv_states);

    ComparisonReport report;
    report.mv_verdict = mv_out.verdict;
    report.cv_verdict = cv_out.verdict;
    report.verdicts_agree = mv_out.verdict == cv_out.verdict;
    report.per_step_bound =
        2.0 * (k_big.phi_quantum() + k_big.psi_quantum() + k_big.theta_quantum());
    report.events_compared =
        static_cast<std::int64_t>(std::min(mv_states.size(), cv_states.size()));
    report.within_accumulated_bound = true;
    for (std::int64_t e = 0; e < report.events_compared; ++e) {
        const double d = max_state_discrepancy(mv_states[static_cast<std::size_t>(e)],
                                               cv_states[static_cast<std::size_t>(e)]);
        report.max_event_discrepancy = std::max(report.max_event_discrepancy, d);
        if (d > report.per_step_bound * static_cast<double>(e + 1))
            report.within_accumulated_bound = false;
    }
    return report;
}

const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::mv_qhnn: return "mv";
        case ModelKind::mv_qhnn3: return "mv3";
        case ModelKind::cv_qhnn: default: return "cv";
    }
}

const char* mode_name(UpdateMode m) {
    return m == UpdateMode::asynchronous ? "async" : "parallel";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::periodic: return "periodic";
        case Verdict::exhausted: default: return "exhausted";
    }
}

}  // namespace qhnn
