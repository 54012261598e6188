#include "qhnn/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhnn/diagnostics.hpp"
#include "qhnn/experiments.hpp"
#include "qhnn/io.hpp"
#include "qhnn/rng.hpp"

namespace qhnn {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

ModelKind parse_model(const std::string& name) {
    if (name == "mv") return ModelKind::mv_qhnn;
    if (name == "mv3") return ModelKind::mv_qhnn3;
    if (name == "cv") return ModelKind::cv_qhnn;
    throw CLI::ValidationError("--model", "expected one of mv, mv3, cv");
}

UpdateMode parse_mode(const std::string& name) {
    if (name == "async") return UpdateMode::asynchronous;
    if (name == "parallel") return UpdateMode::parallel;
    throw CLI::ValidationError("--mode", "expected async or parallel");
}

struct InstanceOptions {
    std::string file;
    int example = 0;
    int random_n = 0;
    std::uint64_t seed = 1;
    int k_all = 0;
    int k1 = 0, k2 = 0, k3 = 0;

    void attach(CLI::App& cmd, bool with_random) {
        cmd.add_option("--instance", file, "instance JSON file to replay");
        cmd.add_option("--example-instance", example,
                       "built-in two-neuron counterexample (1, 2 or 3)")
            ->check(CLI::Range(1, 3));
        if (with_random) {
            cmd.add_option("--random", random_n, "draw a random n-neuron instance");
            cmd.add_option("--seed", seed, "seed for --random");
        }
        cmd.add_option("--k", k_all, "resolution factor applied to K1, K2 and K3");
        cmd.add_option("--k1", k1, "resolution factor K1");
        cmd.add_option("--k2", k2, "resolution factor K2");
        cmd.add_option("--k3", k3, "resolution factor K3");
    }

    std::optional<ResolutionFactors> resolution() const {
        if (k_all > 0) {
            ResolutionFactors k{k_all, k_all, k_all};
            if (k1 > 0) k.k1 = k1;
            if (k2 > 0) k.k2 = k2;
            if (k3 > 0) k.k3 = k3;
            return k;
        }
        if (k1 > 0 || k2 > 0 || k3 > 0) {
            if (k1 > 0 && k2 > 0 && k3 > 0) return ResolutionFactors{k1, k2, k3};
            throw CLI::ValidationError("--k1/--k2/--k3", "give all three or use --k");
        }
        if (example > 0) return ResolutionFactors{2, 2, 2};
        return std::nullopt;
    }

    Instance make() const {
        const int sources = (file.empty() ? 0 : 1) + (example > 0 ? 1 : 0) +
                            (random_n > 0 ? 1 : 0);
        if (sources != 1)
            throw CLI::ValidationError(
                "instance", "give exactly one of --instance, --example-instance, --random");
        if (example > 0) {
            const ExampleInstance ex = counterexample_instance();
            return {ex.weights, ex.x0};
        }
        if (random_n > 0) {
            const std::optional<ResolutionFactors> k = resolution();
            if (!k)
                throw CLI::ValidationError("--random",
                                           "random instances draw grid states; give --k");
            return {random_hermitian_weights(random_n, mix_seed(seed, 1)),
                    random_state(random_n, *k, mix_seed(seed, 2))};
        }
        return load_instance(file, resolution());
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

nlohmann::json diagnose_record(const WeightMatrix& w, const UpdateEvent& ev,
                               const std::optional<ResolutionFactors>& k) {
    nlohmann::json j;
    j["t_num"] = ev.t.num;
    j["t_den"] = ev.t.den;
    j["neuron"] = ev.neuron + 1;
    j["changed"] = ev.changed;
    j["delta_e"] = ev.delta_e;
    j["energy"] = ev.energy_after;
    if (!ev.transition || !ev.state_before || !ev.state_after) return j;

    const Transition& tr = *ev.transition;
    if (tr.idx_before && tr.idx_after && k) {
        try {
            const DeltaEDecomposition d =
                decompose(w, *ev.state_before, *ev.state_after, tr.neuron, *k);
            j["x1"] = d.x1;
            j["x2"] = d.x2;
            j["x3"] = d.x3;
            j["x1_closed"] = d.x1_closed;
            j["x2_closed"] = d.x2_closed;
            j["x3_closed"] = d.x3_closed;
            j["a"] = d.a;
            j["b"] = d.b;
            j["c"] = d.c;
            j["dphi_shift"] = d.dphi_shift;
            j["dpsi_shift"] = d.dpsi_shift;
            j["dtheta_shift"] = d.dtheta_shift;
            j["cos_a1"] = d.cos_a1;
            j["cos_a2"] = d.cos_a2;
            j["cos_a3"] = d.cos_a3;
            j["h1_holds"] = d.h1_holds;
            j["h2_holds"] = d.h2_holds;
        } catch (const std::invalid_argument&) {
            j["potential_not_representable"] = true;
        }
        return j;
    }
    if (tr.potential.norm() > 0.0) {
        const EnergyTerms terms = energy_terms(tr.before, tr.after, tr.potential);
        j["x1"] = terms.x1;
        j["x2"] = terms.x2;
        j["x3"] = terms.x3;
        const CosineView view =
            cosine_view(*ev.state_before, *ev.state_after, tr.potential, tr.neuron);
        j["cos_a1"] = view.cos_a1;
        j["cos_a2"] = view.cos_a2;
        j["cos_a3"] = view.cos_a3;
    }
    return j;
}

int command_example(int id, const std::string& json_path, std::ostream& out) {
    const ReproReport report = reproduce_example(id);
    print_report(out, report);
    if (!json_path.empty()) write_file(json_path, report_to_json(report));
    return report.all_pass ? kExitOk : kExitCheckFailure;
}

int command_run(const InstanceOptions& opts, const std::string& model_name_str,
                const std::string& mode_name_str, std::int64_t t_max,
                const std::string& trace_path, const std::string& verdict_path,
                const std::string& diagnose_path, double cv_tolerance, std::ostream& out) {
    RunConfig cfg;
    cfg.model = parse_model(model_name_str);
    cfg.mode = parse_mode(mode_name_str);
    cfg.t_max = t_max;
    cfg.cv_state_tolerance = cv_tolerance;
    cfg.resolution = opts.resolution();
    if (cfg.model != ModelKind::cv_qhnn && !cfg.resolution)
        throw CLI::ValidationError("--k", "multivalued models need resolution factors");

    const Instance inst = opts.make();

    std::ostringstream diagnose;
    if (!diagnose_path.empty()) {
        cfg.observer = [&](const UpdateEvent& ev) {
            diagnose << diagnose_record(inst.weights, ev, cfg.resolution).dump() << '\n';
        };
    }

    const TrajectoryOutcome outcome = run(inst.weights, inst.state, cfg);
    out << "verdict: " << verdict_name(outcome.verdict);
    if (outcome.verdict == Verdict::converged)
        out << " (t* = " << outcome.convergence_time.num << "/"
            << outcome.convergence_time.den << ")";
    if (outcome.verdict == Verdict::periodic)
        out << " (period " << outcome.period << ", first entry t = " << outcome.first_entry
            << ")";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", outcome.final_energy);
    out << "\nfinal energy: " << buf << "\n";

    if (!trace_path.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, outcome);
        write_file(trace_path, csv.str());
    }
    if (!verdict_path.empty()) write_file(verdict_path, verdict_to_json(outcome));
    if (!diagnose_path.empty()) write_file(diagnose_path, diagnose.str());
    return kExitOk;
}

int command_sweep(const SweepConfig& cfg, const std::string& out_path, std::ostream& out) {
    const SweepResult result = convergence_sweep(cfg);
    std::ostringstream csv;
    write_sweep_csv(csv, result);
    if (!out_path.empty()) {
        write_file(out_path, csv.str());
        out << "sweep finished: " << result.cells.size() << " cells -> " << out_path << "\n";
    } else {
        out << csv.str();
    }
    return kExitOk;
}

int command_validate(const InstanceOptions& opts, double tolerance, std::ostream& out) {
    const Instance inst = opts.make();
    const ConditionReport report = validate_weights(inst.weights, tolerance);
    out << "hermitian symmetry: " << (report.hermitian_ok ? "ok" : "VIOLATED")
        << " (max deviation " << format_full(report.max_hermitian_deviation) << ")\n";
    out << "diagonal real and nonnegative: " << (report.diagonal_ok ? "ok" : "VIOLATED")
        << " (max deviation " << format_full(report.max_diagonal_deviation) << ")\n";
    for (const WeightViolation& v : report.violations) {
        out << "  entry (" << (v.row + 1) << "," << (v.col + 1) << ") deviates by "
            << format_full(v.deviation) << "\n";
    }
    return report.pass() ? kExitOk : kExitCheckFailure;
}

int command_fixed_points(const InstanceOptions& opts, const std::string& model_name_str,
                         double budget, std::ostream& out) {
    const ModelKind model = parse_model(model_name_str);
    const std::optional<ResolutionFactors> k = opts.resolution();
    if (!k) throw CLI::ValidationError("--k", "fixed-point enumeration needs resolution factors");
    const Instance inst = opts.make();

    const std::vector<NetworkState> fixed =
        enumerate_fixed_points(model, inst.weights, *k, budget);
    out << fixed.size() << " fixed point(s)\n";
    for (const NetworkState& s : fixed) {
        out << " ";
        for (int i = 0; i < s.size(); ++i) {
            const PhaseIndices& idx = s.indices(i);
            out << " [" << idx.l1 << "," << idx.l2 << "," << idx.l3 << "] "
                << to_string(s.value(i));
        }
        out << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"quaternionic Hopfield network laboratory"};
    app.require_subcommand(1);

    // example
    auto* example_cmd = app.add_subcommand("example", "reproduce a worked example");
    int example_id = 0;
    std::string example_json;
    example_cmd->add_option("id", example_id, "example number")->required()->check(CLI::Range(1, 3));
    example_cmd->add_option("--json", example_json, "also write the report as JSON");

    // run
    auto* run_cmd = app.add_subcommand("run", "run one trajectory");
    InstanceOptions run_opts;
    run_opts.attach(*run_cmd, true);
    std::string run_model = "cv";
    std::string run_mode = "async";
    std::int64_t run_t_max = 1000;
    std::string trace_path, verdict_path, diagnose_path;
    double cv_tolerance = 1e-9;
    run_cmd->add_option("--model", run_model, "mv, mv3 or cv")->capture_default_str();
    run_cmd->add_option("--mode", run_mode, "async or parallel")->capture_default_str();
    run_cmd->add_option("--t-max", run_t_max, "time-unit budget")->capture_default_str();
    run_cmd->add_option("--trace", trace_path, "write the energy-trace CSV here");
    run_cmd->add_option("--verdict", verdict_path, "write the verdict JSON here");
    run_cmd->add_option("--diagnose", diagnose_path,
                        "write per-event decomposition JSON lines here");
    run_cmd->add_option("--tolerance", cv_tolerance, "continuous-model state tolerance")
        ->capture_default_str();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "convergence-probability study");
    SweepConfig sweep_cfg;
    std::vector<int> k_exponents;
    std::vector<std::string> sweep_models;
    std::vector<std::string> sweep_modes;
    std::string sweep_out;
    sweep_cmd->add_option("--n", sweep_cfg.n, "neuron count")->capture_default_str();
    sweep_cmd->add_option("--models", sweep_models, "models to include (default all)");
    sweep_cmd->add_option("--modes", sweep_modes, "modes to include (default all)");
    sweep_cmd->add_option("--trials", sweep_cfg.trials, "trials per cell")->capture_default_str();
    sweep_cmd->add_option("--t-max", sweep_cfg.t_max, "time-unit budget per run")
        ->capture_default_str();
    sweep_cmd->add_option("--k-exponents", k_exponents,
                          "resolution exponents m; each K = 2^m (default 1 2 4 8 17)");
    sweep_cmd->add_option("--seed", sweep_cfg.master_seed, "master seed")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "write the results CSV here");
    sweep_cmd->add_flag("--full", sweep_cfg.full_scale,
                        "paper scale: n=100, 100 trials, t_max=1000, K = 2^1..2^20");
    sweep_cmd->add_option("--trial-cap", sweep_cfg.trial_time_cap_seconds,
                          "abort when a trial exceeds this many seconds (0 = off)");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check the weight conditions");
    InstanceOptions validate_opts;
    validate_opts.attach(*validate_cmd, true);
    double validate_tolerance = 1e-12;
    validate_cmd->add_option("--tolerance", validate_tolerance, "deviation tolerance")
        ->capture_default_str();

    // fixed-points
    auto* fp_cmd = app.add_subcommand("fixed-points", "enumerate stationary grid states");
    InstanceOptions fp_opts;
    fp_opts.attach(*fp_cmd, true);
    std::string fp_model = "mv3";
    double fp_budget = 1e6;
    fp_cmd->add_option("--model", fp_model, "mv or mv3")->capture_default_str();
    fp_cmd->add_option("--budget", fp_budget, "state-count budget")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (example_cmd->parsed()) return command_example(example_id, example_json, out);
        if (run_cmd->parsed())
            return command_run(run_opts, run_model, run_mode, run_t_max, trace_path,
                               verdict_path, diagnose_path, cv_tolerance, out);
        if (sweep_cmd->parsed()) {
            for (int m : k_exponents) {
                if (m < 0 || m > 30) throw CLI::ValidationError("--k-exponents", "m out of range");
                sweep_cfg.resolutions.push_back({1 << m, 1 << m, 1 << m});
            }
            if (!sweep_models.empty() || !sweep_modes.empty()) {
                if (sweep_models.empty()) sweep_models = {"mv", "mv3", "cv"};
                if (sweep_modes.empty()) sweep_modes = {"async", "parallel"};
                for (const std::string& m : sweep_models)
                    for (const std::string& u : sweep_modes)
                        sweep_cfg.cells.emplace_back(parse_model(m), parse_mode(u));
            }
            return command_sweep(sweep_cfg, sweep_out, out);
        }
        if (validate_cmd->parsed()) return command_validate(validate_opts, validate_tolerance, out);
        if (fp_cmd->parsed()) return command_fixed_points(fp_opts, fp_model, fp_budget, out);
    } catch (const BudgetExceededError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace qhnn
