#include "netsize/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace netsize {

namespace {

std::unordered_map<std::int64_t, int> ordinal_map(const Scenario& s) {
    std::unordered_map<std::int64_t, int> m;
    for (std::size_t k = 0; k < s.agents.size(); ++k)
        m[s.agents[k]] = static_cast<int>(k);
    return m;
}

std::string edge_text(const IdEdge& e) {
    return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

} // namespace

int ordinal_of(const Scenario& s, std::int64_t identifier) {
    for (std::size_t k = 0; k < s.agents.size(); ++k)
        if (s.agents[k] == identifier) return static_cast<int>(k);
    throw std::invalid_argument("unknown agent identifier " +
                                std::to_string(identifier));
}

NetworkGraph initial_graph(const Scenario& s) {
    const auto m = ordinal_map(s);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(s.initial_edges.size());
    for (const auto& e : s.initial_edges) {
        const auto a = m.find(e.first);
        const auto b = m.find(e.second);
        if (a == m.end() || b == m.end())
            throw std::invalid_argument("edge " + edge_text(e) +
                                        " references unknown agent");
        edges.emplace_back(a->second, b->second);
    }
    return NetworkGraph(s.agents, edges);
}

NetworkGraph apply_event(const NetworkGraph& g, const Scenario& s,
                         const TopologyEvent& ev) {
    const auto m = ordinal_map(s);
    NetworkGraph out = g;
    for (const auto& e : ev.remove_edges) {
        const auto a = m.find(e.first);
        const auto b = m.find(e.second);
        if (a == m.end() || b == m.end())
            throw std::invalid_argument("event removes edge " + edge_text(e) +
                                        " referencing unknown agent");
        out = out.remove_edge(a->second, b->second);
    }
    for (const auto& e : ev.add_edges) {
        const auto a = m.find(e.first);
        const auto b = m.find(e.second);
        if (a == m.end() || b == m.end())
            throw std::invalid_argument("event adds edge " + edge_text(e) +
                                        " referencing unknown agent");
        out = out.add_edge(a->second, b->second);
    }
    return out;
}

void validate(const Scenario& s) {
    if (s.agents.empty())
        throw std::invalid_argument("scenario has no agents");
    if (!(s.gamma > 0.0))
        throw std::invalid_argument("gamma must be positive");
    if (!(s.horizon > 0.0))
        throw std::invalid_argument("horizon must be positive");
    if (!(s.sample_interval > 0.0))
        throw std::invalid_argument("sample_interval must be positive");
    if (!(s.integrator.rel_tol > 0.0) || !(s.integrator.abs_tol > 0.0))
        throw std::invalid_argument("integrator tolerances must be positive");
    if (!(s.integrator.max_step > 0.0))
        throw std::invalid_argument("max_step must be positive");
    if (s.init.mode == InitialState::Mode::seeded_random && !(s.init.range > 0.0))
        throw std::invalid_argument("random init range must be positive");

    // Constructing the graph checks identifiers and initial edges.
    NetworkGraph g = initial_graph(s);

    double prev = 0.0;
    for (const auto& ev : s.events) {
        if (!(ev.time > prev))
            throw std::invalid_argument("event times must be strictly increasing");
        if (!(ev.time < s.horizon))
            throw std::invalid_argument("event at t=" + std::to_string(ev.time) +
                                        " is not inside (0, horizon)");
        prev = ev.time;
        g = apply_event(g, s, ev); // replays adds/removes, throws on misuse
    }
}

} // namespace netsize
