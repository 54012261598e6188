#include "qhnn/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_map>

namespace qhnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::atomic<std::uint64_t> g_quantize_calls{0};
std::atomic<std::uint64_t> g_quantize_violations{0};

// Strict half-quantum bound with a small float guard; an input sitting exactly
// on an arc boundary is half a quantum from the chosen midpoint.
bool within_half_quantum(double out, double in, double quantum) {
    return std::abs(out - in) <= quantum / 2.0 + 1e-12;
}

int floor_index(double offset, double quantum, int count) {
    const int l = static_cast<int>(std::floor(offset / quantum));
    return std::clamp(l, 0, count - 1);
}

}  // namespace

PhaseIndices quantize_to_indices(const PhaseTriple& vp, const ResolutionFactors& k) {
    PhaseIndices idx;
    idx.l1 = floor_index(kPi + vp.phi, k.phi_quantum(), k.k1);
    idx.l2 = floor_index(kPi / 4.0 + vp.psi, k.psi_quantum(), k.k2);
    idx.l3 = floor_index(kPi / 2.0 + vp.theta, k.theta_quantum(), k.k3);

    g_quantize_calls.fetch_add(1, std::memory_order_relaxed);
    const PhaseTriple mid = angles_of(idx, k);
    if (!within_half_quantum(mid.phi, vp.phi, k.phi_quantum()) ||
        !within_half_quantum(mid.psi, vp.psi, k.psi_quantum()) ||
        !within_half_quantum(mid.theta, vp.theta, k.theta_quantum())) {
        g_quantize_violations.fetch_add(1, std::memory_order_relaxed);
    }
    return idx;
}

PhaseTriple quantize(const PhaseTriple& vp, const ResolutionFactors& k) {
    return angles_of(quantize_to_indices(vp, k), k);
}

std::uint64_t quantize_call_count() { return g_quantize_calls.load(); }
std::uint64_t quantize_violation_count() { return g_quantize_violations.load(); }
void reset_quantize_stats() {
    g_quantize_calls.store(0);
    g_quantize_violations.store(0);
}

namespace {

NeuronUpdate propose_mv(const Quaternion& potential, const NetworkState& x, int i,
                        const ResolutionFactors& k, AngleSelector selector, bool all_angles) {
    const PhaseExtraction vp = to_phase_angles(potential);
    if (!vp.ok()) return {x.value(i), x.indices(i), false};

    const PhaseIndices quantized = quantize_to_indices(vp.angles, k);
    PhaseIndices next = x.indices(i);
    if (all_angles) {
        next = quantized;
    } else {
        switch (selector) {
            case AngleSelector::phi: next.l1 = quantized.l1; break;
            case AngleSelector::psi: next.l2 = quantized.l2; break;
            case AngleSelector::theta: next.l3 = quantized.l3; break;
        }
    }
    if (next == x.indices(i)) return {x.value(i), x.indices(i), false};
    return {from_phase_angles(angles_of(next, k)), next, true};
}

NeuronUpdate propose_cv(const Quaternion& potential, const Quaternion& current,
                        double zero_tolerance, double change_tolerance) {
    const double n = potential.norm();
    if (n <= zero_tolerance) return {current, std::nullopt, false};

    const Quaternion next = potential / n;
    const Quaternion diff = next - current;
    const double move = std::max(std::max(std::abs(diff.w), std::abs(diff.x)),
                                 std::max(std::abs(diff.y), std::abs(diff.z)));
    return {next, std::nullopt, move > change_tolerance};
}

}  // namespace

NeuronUpdate step_mvqhnn(const WeightMatrix& w, const NetworkState& x, int i,
                         const ResolutionFactors& k, AngleSelector selector) {
    return propose_mv(activation_potential(w, x, i), x, i, k, selector, false);
}

NeuronUpdate step_mvqhnn3(const WeightMatrix& w, const NetworkState& x, int i,
                          const ResolutionFactors& k) {
    return propose_mv(activation_potential(w, x, i), x, i, k, AngleSelector::phi, true);
}

NeuronUpdate step_cvqhnn(const WeightMatrix& w, const NetworkState& x, int i,
                         double zero_tolerance, double change_tolerance) {
    return propose_cv(activation_potential(w, x, i), x.value(i), zero_tolerance,
                      change_tolerance);
}

double max_state_discrepancy(const NetworkState& a, const NetworkState& b) {
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const Quaternion d = a.value(i) - b.value(i);
        worst = std::max({worst, std::abs(d.w), std::abs(d.x), std::abs(d.y), std::abs(d.z)});
    }
    return worst;
}

namespace {

struct IndexKeyHash {
    std::size_t operator()(const std::vector<int>& key) const {
        std::size_t h = 1469598103934665603ULL;
        for (int v : key) {
            h ^= static_cast<std::size_t>(static_cast<unsigned>(v));
            h *= 1099511628211ULL;
        }
        return h;
    }
};

std::vector<int> flatten_indices(const NetworkState& x) {
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(x.size()) * 3);
    for (int i = 0; i < x.size(); ++i) {
        key.push_back(x.indices(i).l1);
        key.push_back(x.indices(i).l2);
        key.push_back(x.indices(i).l3);
    }
    return key;
}

std::uint64_t grid_hash(const NetworkState& x, double grid) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h, grid](double c) {
        const auto cell = static_cast<std::uint64_t>(std::llround(c / grid));
        h ^= cell;
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < x.size(); ++i) {
        feed(x.value(i).w);
        feed(x.value(i).x);
        feed(x.value(i).y);
        feed(x.value(i).z);
    }
    return h;
}

bool is_multivalued(ModelKind m) { return m != ModelKind::cv_qhnn; }

class TrajectoryEngine {
public:
    TrajectoryEngine(const WeightMatrix& w, const RunConfig& cfg, bool certified)
        : w_(w), cfg_(cfg), certified_(certified) {
        const int n = w.size();
        if (cfg.model == ModelKind::mv_qhnn) {
            events_per_unit_ = (cfg.mode == UpdateMode::asynchronous) ? 3 * n : 3;
        } else {
            events_per_unit_ = (cfg.mode == UpdateMode::asynchronous) ? n : 1;
        }
    }

    std::int64_t events_per_unit() const { return events_per_unit_; }
    RationalTime last_change() const { return last_change_; }

    // Runs one full time unit; returns the number of change events.
    std::uint64_t run_unit(NetworkState& x, double& e, std::int64_t& event_counter,
                           TrajectoryOutcome& out) {
        std::uint64_t changes = 0;
        auto sweep = [&](AngleSelector selector) {
            if (cfg_.mode == UpdateMode::asynchronous) {
                for (int i = 0; i < w_.size(); ++i)
                    changes += async_event(x, i, selector, e, event_counter, out);
            } else {
                changes += parallel_event(x, selector, e, event_counter, out);
            }
        };
        if (cfg_.model == ModelKind::mv_qhnn) {
            sweep(AngleSelector::phi);
            sweep(AngleSelector::psi);
            sweep(AngleSelector::theta);
        } else {
            sweep(AngleSelector::phi);
        }
        return changes;
    }

private:
    NeuronUpdate propose(const Quaternion& potential, const NetworkState& x, int i,
                         AngleSelector selector) const {
        switch (cfg_.model) {
            case ModelKind::mv_qhnn:
                return propose_mv(potential, x, i, *cfg_.resolution, selector, false);
            case ModelKind::mv_qhnn3:
                return propose_mv(potential, x, i, *cfg_.resolution, selector, true);
            case ModelKind::cv_qhnn:
            default:
                return propose_cv(potential, x.value(i), cfg_.zero_potential_tolerance,
                                  cfg_.cv_state_tolerance);
        }
    }

    // delta-E of one changed neuron via -(X1 - X2) + w_ii (X3 - 1); exact under
    // the certified weight conditions, O(1) given the potential.
    double identity_delta_e(const Quaternion& before, const Quaternion& after,
                            const Quaternion& potential, int i) const {
        const double x1 = real_inner(after, potential);
        const double x2 = real_inner(before, potential);
        const double x3 = real_inner(after, before);
        return -(x1 - x2) + w_(i, i).real() * (x3 - 1.0);
    }

    std::uint64_t async_event(NetworkState& x, int i, AngleSelector selector, double& e,
                              std::int64_t& event_counter, TrajectoryOutcome& out) {
        const Quaternion potential = activation_potential(w_, x, i);
        const NeuronUpdate upd = propose(potential, x, i, selector);

        Transition tr;
        tr.neuron = i;
        tr.before = x.value(i);
        tr.after = upd.value;
        tr.potential = potential;
        if (x.has_indices()) {
            tr.idx_before = x.indices(i);
            tr.idx_after = upd.indices;
        }

        std::optional<NetworkState> before_copy;
        if (cfg_.observer) before_copy = x;

        const bool applied = upd.indices ? (*upd.indices != x.indices(i))
                                         : !(upd.value == x.value(i));
        double delta_e = 0.0;
        bool flagged = false;
        if (applied) {
            const double e_before = e;
            if (certified_) {
                delta_e = identity_delta_e(tr.before, tr.after, potential, i);
                apply(x, i, upd);
            } else {
                const double direct_before = energy(w_, x);
                apply(x, i, upd);
                delta_e = energy(w_, x) - direct_before;
            }
            e += delta_e;
            if (upd.indices) {
                flagged = true;  // any grid move is a change
            } else if (certified_) {
                // energy-certified change: the drop clears twice the
                // monotonicity slack, so sub-rounding creep is not flagged
                flagged = -delta_e > 2e-12 * (1.0 + std::abs(e_before));
            } else {
                flagged = upd.changed;
            }
        }

        ++event_counter;
        finish_event(x, i, flagged, e, delta_e, event_counter, &tr,
                     before_copy ? &*before_copy : nullptr, out);
        return flagged ? 1u : 0u;
    }

    std::uint64_t parallel_event(NetworkState& x, AngleSelector selector, double& e,
                                 std::int64_t& event_counter, TrajectoryOutcome& out) {
        std::vector<NeuronUpdate> updates;
        updates.reserve(static_cast<std::size_t>(w_.size()));
        for (int i = 0; i < w_.size(); ++i)
            updates.push_back(propose(activation_potential(w_, x, i), x, i, selector));

        std::optional<NetworkState> before_copy;
        if (cfg_.observer) before_copy = x;

        std::uint64_t flagged = 0;
        std::uint64_t applied = 0;
        for (int i = 0; i < w_.size(); ++i) {
            const NeuronUpdate& upd = updates[static_cast<std::size_t>(i)];
            const bool moves = upd.indices ? (*upd.indices != x.indices(i))
                                           : !(upd.value == x.value(i));
            if (moves) {
                apply(x, i, upd);
                ++applied;
            }
            if (upd.changed) ++flagged;
        }
        double delta_e = 0.0;
        if (applied > 0) {
            const double e_new = energy(w_, x);
            delta_e = e_new - e;
            e = e_new;
        }

        ++event_counter;
        finish_event(x, -1, flagged > 0, e, delta_e, event_counter, nullptr,
                     before_copy ? &*before_copy : nullptr, out);
        return flagged > 0 ? 1u : 0u;
    }

    void apply(NetworkState& x, int i, const NeuronUpdate& upd) const {
        if (upd.indices) {
            x.set_indices(i, *upd.indices, *cfg_.resolution);
        } else {
            x.set_value(i, upd.value);
        }
    }

    void finish_event(const NetworkState& x, int neuron, bool changed, double e, double delta_e,
                      std::int64_t event_counter, const Transition* tr,
                      const NetworkState* before, TrajectoryOutcome& out) {
        const RationalTime t{event_counter, events_per_unit_};
        if (changed) {
            out.change_events += 1;
            last_change_ = t;
        }
        if (cfg_.record_trace) out.trace.push_back({t, e, neuron, changed});
        if (cfg_.observer) {
            UpdateEvent ev;
            ev.t = t;
            ev.neuron = neuron;
            ev.changed = changed;
            ev.energy_after = e;
            ev.delta_e = delta_e;
            ev.transition = tr;
            ev.state_before = before;
            ev.state_after = &x;
            cfg_.observer(ev);
        }
    }

    const WeightMatrix& w_;
    const RunConfig& cfg_;
    bool certified_;
    std::int64_t events_per_unit_ = 1;
    RationalTime last_change_{0, 1};
};

void validate_run_inputs(const WeightMatrix& w, const NetworkState& x0, const RunConfig& cfg) {
    if (w.size() < 1) throw std::invalid_argument("network must have at least one neuron");
    if (x0.size() != w.size()) throw std::invalid_argument("state/weight size mismatch");
    if (cfg.t_max < 1) throw std::invalid_argument("t_max must be at least one time unit");
    if (is_multivalued(cfg.model)) {
        if (!cfg.resolution)
            throw std::invalid_argument("multivalued models require resolution factors");
        if (!x0.has_indices())
            throw std::invalid_argument("multivalued models require an index-backed state");
        const ResolutionFactors& k = *cfg.resolution;
        if (k.k1 < 1 || k.k2 < 1 || k.k3 < 1)
            throw std::invalid_argument("resolution factors must be positive");
        for (int i = 0; i < x0.size(); ++i) {
            const PhaseIndices& idx = x0.indices(i);
            if (idx.l1 < 0 || idx.l1 >= k.k1 || idx.l2 < 0 || idx.l2 >= k.k2 || idx.l3 < 0 ||
                idx.l3 >= k.k3)
                throw std::invalid_argument("state indices exceed the resolution grid");
        }
    }
}

}  // namespace

TrajectoryOutcome run(const WeightMatrix& w, const NetworkState& x0, const RunConfig& cfg) {
    validate_run_inputs(w, x0, cfg);

    const bool certified = validate_weights(w, 1e-12).pass();
    TrajectoryEngine engine(w, cfg, certified);

    TrajectoryOutcome out;
    NetworkState x = x0;
    double e = energy(w, x);
    std::int64_t event_counter = 0;

    if (cfg.record_trace) {
        out.trace.reserve(static_cast<std::size_t>(
            std::min<std::int64_t>(cfg.t_max, 1024) * engine.events_per_unit() + 1));
        out.trace.push_back({{0, engine.events_per_unit()}, e, -1, false});
    }
    if (cfg.record_unit_states) out.unit_states.push_back(x);

    const bool mv = is_multivalued(cfg.model);
    std::unordered_map<std::vector<int>, std::int64_t, IndexKeyHash> seen_mv;
    std::unordered_multimap<std::uint64_t, std::int64_t> seen_cv;
    std::vector<NetworkState> cv_states;
    if (mv) {
        seen_mv.emplace(flatten_indices(x), 0);
    } else {
        seen_cv.emplace(grid_hash(x, cfg.cv_state_tolerance), 0);
        cv_states.push_back(x);
    }

    for (std::int64_t unit = 1; unit <= cfg.t_max; ++unit) {
        const std::uint64_t changes = engine.run_unit(x, e, event_counter, out);
        out.units_elapsed = unit;
        if (cfg.record_unit_states) out.unit_states.push_back(x);

        // Converged: a full unit without state changes (exact index moves for
        // the grid models, certified changes for the continuous one).
        if (changes == 0) {
            out.verdict = Verdict::converged;
            out.convergence_time = (out.change_events == 0)
                                       ? RationalTime{0, engine.events_per_unit()}
                                       : engine.last_change();
            break;
        }
        if (mv) {
            auto [it, inserted] = seen_mv.emplace(flatten_indices(x), unit);
            if (!inserted) {
                out.verdict = Verdict::periodic;
                out.first_entry = it->second;
                out.period = unit - it->second;
                break;
            }
        } else {
            const std::uint64_t h = grid_hash(x, cfg.cv_state_tolerance);
            auto [lo, hi] = seen_cv.equal_range(h);
            std::int64_t match = -1;
            for (auto it = lo; it != hi; ++it) {
                if (max_state_discrepancy(x, cv_states[static_cast<std::size_t>(it->second)]) <=
                    cfg.cv_state_tolerance) {
                    match = it->second;
                    break;
                }
            }
            if (match >= 0) {
                out.verdict = Verdict::periodic;
                out.first_entry = match;
                out.period = unit - match;
                break;
            }
            seen_cv.emplace(h, unit);
            cv_states.push_back(x);
        }
    }

    out.final_energy = e;
    out.final_state = std::move(x);
    return out;
}

std::vector<NetworkState> enumerate_fixed_points(ModelKind model, const WeightMatrix& w,
                                                 const ResolutionFactors& k, double budget) {
    if (!is_multivalued(model))
        throw std::invalid_argument("fixed-point enumeration needs a multivalued model");
    const int n = w.size();
    const double per_neuron = static_cast<double>(k.k1) * k.k2 * k.k3;
    if (std::pow(per_neuron, n) > budget)
        throw BudgetExceededError("state space exceeds the enumeration budget");

    const auto states_per_neuron = static_cast<std::int64_t>(per_neuron);
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) total *= states_per_neuron;

    auto decode = [&k](std::int64_t code, PhaseIndices& idx) {
        idx.l1 = static_cast<int>(code % k.k1);
        code /= k.k1;
        idx.l2 = static_cast<int>(code % k.k2);
        idx.l3 = static_cast<int>(code / k.k2);
    };

    std::vector<NetworkState> fixed;
    std::vector<PhaseIndices> assignment(static_cast<std::size_t>(n));
    for (std::int64_t code = 0; code < total; ++code) {
        std::int64_t rest = code;
        for (int i = 0; i < n; ++i) {
            decode(rest % states_per_neuron, assignment[static_cast<std::size_t>(i)]);
            rest /= states_per_neuron;
        }
        NetworkState x = NetworkState::from_indices(assignment, k);

        bool is_fixed = true;
        for (int i = 0; i < n && is_fixed; ++i) {
            const PhaseExtraction vp = to_phase_angles(activation_potential(w, x, i));
            if (!vp.ok()) continue;  // no-op rule: this neuron never moves
            if (quantize_to_indices(vp.angles, k) != x.indices(i)) is_fixed = false;
        }
        if (is_fixed) fixed.push_back(std::move(x));
    }
    return fixed;
}

}  // namespace qhnn
