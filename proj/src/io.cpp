#include "qhnn/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qhnn {

namespace {

using nlohmann::json;

json quaternion_to_json(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }

Quaternion quaternion_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("quaternion entries must be 4-element arrays");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

std::string format_full(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string instance_to_json(const Instance& inst) {
    const int n = inst.weights.size();
    json j;
    j["n"] = n;
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int k = 0; k < n; ++k) row.push_back(quaternion_to_json(inst.weights(i, k)));
        rows.push_back(std::move(row));
    }
    j["weights"] = std::move(rows);
    json state = json::array();
    for (int i = 0; i < n; ++i) state.push_back(quaternion_to_json(inst.state.value(i)));
    j["state"] = std::move(state);
    if (inst.state.has_indices()) {
        json idx = json::array();
        for (int i = 0; i < n; ++i) {
            const PhaseIndices& l = inst.state.indices(i);
            idx.push_back(json::array({l.l1, l.l2, l.l3}));
        }
        j["indices"] = std::move(idx);
    }
    return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text,
                            const std::optional<ResolutionFactors>& k) {
    const json j = json::parse(text);
    const int n = j.at("n").get<int>();
    if (n < 1) throw std::invalid_argument("instance must have at least one neuron");

    Instance inst;
    inst.weights = WeightMatrix(n);
    const json& rows = j.at("weights");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw std::invalid_argument("weights must be an n x n array");
    for (int i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw std::invalid_argument("weights must be an n x n array");
        for (int c = 0; c < n; ++c)
            inst.weights(i, c) = quaternion_from_json(row[static_cast<std::size_t>(c)]);
    }

    if (j.contains("indices") && k) {
        const json& idx = j.at("indices");
        if (static_cast<int>(idx.size()) != n)
            throw std::invalid_argument("indices must list one triple per neuron");
        std::vector<PhaseIndices> indices;
        indices.reserve(static_cast<std::size_t>(n));
        for (const json& triple : idx) {
            if (!triple.is_array() || triple.size() != 3)
                throw std::invalid_argument("index entries must be 3-element arrays");
            indices.push_back(
                {triple[0].get<int>(), triple[1].get<int>(), triple[2].get<int>()});
        }
        inst.state = NetworkState::from_indices(std::move(indices), *k);
    } else {
        const json& state = j.at("state");
        if (static_cast<int>(state.size()) != n)
            throw std::invalid_argument("state must list one quaternion per neuron");
        std::vector<Quaternion> values;
        values.reserve(static_cast<std::size_t>(n));
        for (const json& q : state) values.push_back(quaternion_from_json(q));
        inst.state = NetworkState::from_quaternions(std::move(values));
    }
    return inst;
}

Instance load_instance(const std::string& path, const std::optional<ResolutionFactors>& k) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return instance_from_json(buf.str(), k);
}

void save_instance(const std::string& path, const Instance& inst) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << instance_to_json(inst);
}

void write_trace_csv(std::ostream& os, const TrajectoryOutcome& outcome) {
    os << "t_num,t_den,energy,neuron,changed\n";
    for (const TraceEvent& ev : outcome.trace) {
        os << ev.t.num << ',' << ev.t.den << ',' << format_full(ev.energy) << ','
           << (ev.neuron + 1) << ',' << (ev.changed ? 1 : 0) << '\n';
    }
}

std::string verdict_to_json(const TrajectoryOutcome& outcome) {
    json j;
    switch (outcome.verdict) {
        case Verdict::converged:
            j["verdict"] = "converged";
            j["t"] = outcome.convergence_time.value();
            break;
        case Verdict::periodic:
            j["verdict"] = "periodic";
            j["t"] = static_cast<double>(outcome.first_entry);
            break;
        case Verdict::exhausted:
            j["verdict"] = "exhausted";
            j["t"] = static_cast<double>(outcome.units_elapsed);
            break;
    }
    j["period"] = outcome.period;
    j["final_energy"] = outcome.final_energy;
    return j.dump(2) + "\n";
}

}  // namespace qhnn
