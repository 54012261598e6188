#include <cmath>
#include <sstream>

#include <doctest.h>

#include "qhnn/experiments.hpp"

using namespace qhnn;

TEST_CASE("worked examples reproduce end to end") {
    for (int id : {1, 2, 3}) {
        const ReproReport report = reproduce_example(id);
        for (const ReproCheck& c : report.checks) {
            INFO("example ", id, " check ", c.name, ": expected ", c.expected, " actual ",
                 c.actual);
            CHECK(c.pass);
        }
        CHECK(report.all_pass);
    }
    CHECK_THROWS_AS(reproduce_example(4), std::invalid_argument);
}

TEST_CASE("report rendering") {
    const ReproReport report = reproduce_example(1);
    std::ostringstream os;
    print_report(os, report);
    CHECK(os.str().find("all checks passed") != std::string::npos);
    CHECK(report_to_json(report).find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("sweep rejects degenerate configurations") {
    SweepConfig cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(convergence_sweep(cfg), std::invalid_argument);
}

TEST_CASE("single-trial sweep probabilities are 0 or 1") {
    SweepConfig cfg;
    cfg.n = 4;
    cfg.trials = 1;
    cfg.t_max = 30;
    cfg.resolutions = {{4, 4, 4}};
    const SweepResult result = convergence_sweep(cfg);
    CHECK(result.cells.size() == 6);
    for (const SweepCell& c : result.cells) {
        CHECK((c.probability == 0.0 || c.probability == 1.0));
        CHECK(c.trials == 1);
    }
}

TEST_CASE("sweep is deterministic in the master seed") {
    SweepConfig cfg;
    cfg.n = 5;
    cfg.trials = 4;
    cfg.t_max = 40;
    cfg.resolutions = {{2, 2, 2}, {16, 16, 16}};
    cfg.master_seed = 777;

    const SweepResult a = convergence_sweep(cfg);
    const SweepResult b = convergence_sweep(cfg);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].converged == b.cells[i].converged);
        const bool both_nan =
            std::isnan(a.cells[i].mean_t_conv) && std::isnan(b.cells[i].mean_t_conv);
        CHECK((both_nan || a.cells[i].mean_t_conv == b.cells[i].mean_t_conv));
    }

    std::ostringstream csv_a, csv_b;
    write_sweep_csv(csv_a, a);
    write_sweep_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());

    cfg.master_seed = 778;
    std::ostringstream csv_c;
    write_sweep_csv(csv_c, convergence_sweep(cfg));
    CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("sweep keeps the continuous-model energies monotone") {
    SweepConfig cfg;
    cfg.n = 6;
    cfg.trials = 5;
    cfg.t_max = 60;
    cfg.resolutions = {{4, 4, 4}, {256, 256, 256}};
    const SweepResult result = convergence_sweep(cfg);
    CHECK(result.cv_async_monotonicity_violations == 0);
}

TEST_CASE("paired parallel probability never beats asynchronous") {
    SweepConfig cfg;
    cfg.n = 6;
    cfg.trials = 6;
    cfg.t_max = 60;
    cfg.resolutions = {{2, 2, 2}, {16, 16, 16}, {1 << 17, 1 << 17, 1 << 17}};
    const SweepResult result = convergence_sweep(cfg);
    for (ModelKind model : {ModelKind::mv_qhnn, ModelKind::mv_qhnn3, ModelKind::cv_qhnn}) {
        for (const ResolutionFactors& k : cfg.resolutions) {
            const double p_async =
                result.cell(model, UpdateMode::asynchronous, k).probability;
            const double p_par = result.cell(model, UpdateMode::parallel, k).probability;
            CHECK(p_par <= p_async);
        }
    }
}

TEST_CASE("sweep budget cap aborts pathological runs") {
    SweepConfig cfg;
    cfg.n = 10;
    cfg.trials = 3;
    cfg.t_max = 200;
    cfg.resolutions = {{1 << 17, 1 << 17, 1 << 17}};
    cfg.trial_time_cap_seconds = 1e-9;
    CHECK_THROWS_AS(convergence_sweep(cfg), BudgetExceededError);
}

TEST_CASE("large resolution mirrors the continuous model") {
    const ResolutionFactors big{1 << 17, 1 << 17, 1 << 17};
    const WeightMatrix w = random_hermitian_weights(10, 4242);
    const NetworkState x0 = random_state(10, big, 2424);

    const ComparisonReport report = large_k_equivalence(w, x0, big, 200);
    CHECK(report.verdicts_agree);
    CHECK(report.events_compared > 0);
    CHECK(report.within_accumulated_bound);
    CHECK(report.max_event_discrepancy <
          report.per_step_bound * static_cast<double>(report.events_compared));
}

TEST_CASE("small resolution does not mirror the continuous model") {
    const ExampleInstance inst = counterexample_instance();
    const ComparisonReport report =
        large_k_equivalence(inst.weights, inst.x0, inst.resolution, 100);
    CHECK_FALSE(report.verdicts_agree);
    CHECK(report.mv_verdict == Verdict::periodic);
    CHECK(report.cv_verdict == Verdict::converged);

    CHECK_THROWS_AS(large_k_equivalence(inst.weights, inst.x0, {1, 1, 1}, 10),
                    std::invalid_argument);
}

TEST_CASE("identical trajectories have zero discrepancy") {
    const WeightMatrix w = random_hermitian_weights(4, 11);
    const NetworkState x0 = random_state(4, {8, 8, 8}, 12);

    auto collect = [&](std::vector<NetworkState>& states) {
        RunConfig cfg;
        cfg.model = ModelKind::cv_qhnn;
        cfg.t_max = 30;
        cfg.record_trace = false;
        cfg.observer = [&states](const UpdateEvent& ev) { states.push_back(*ev.state_after); };
        return run(w, x0, cfg);
    };
    std::vector<NetworkState> a, b;
    collect(a);
    collect(b);
    REQUIRE(a.size() == b.size());
    REQUIRE(!a.empty());
    for (std::size_t e = 0; e < a.size(); ++e)
        CHECK(max_state_discrepancy(a[e], b[e]) == 0.0);
}

TEST_CASE("sweep CSV layout") {
    SweepConfig cfg;
    cfg.n = 3;
    cfg.trials = 2;
    cfg.t_max = 20;
    cfg.resolutions = {{2, 2, 2}};
    std::ostringstream os;
    write_sweep_csv(os, convergence_sweep(cfg));
    const std::string text = os.str();
    CHECK(text.rfind("model,mode,K1,K2,K3,trials,converged,probability,mean_t_conv\n", 0) == 0);
    CHECK(text.find("mv,async,2,2,2,2,") != std::string::npos);
    CHECK(text.find("cv,parallel,2,2,2,2,") != std::string::npos);
}
