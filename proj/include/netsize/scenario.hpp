#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netsize/graph.hpp"

namespace netsize {

/// Edges in scenarios are named by agent identifier, not ordinal.
using IdEdge = std::pair<std::int64_t, std::int64_t>;

/// Topology change applied at a fixed time; removals run before additions.
struct TopologyEvent {
    double time = 0.0;
    std::vector<IdEdge> add_edges;
    std::vector<IdEdge> remove_edges;
};

struct InitialState {
    enum class Mode { zeros, seeded_random };
    Mode mode = Mode::zeros;
    std::uint64_t seed = 0;
    double range = 1.0; // entries drawn uniformly from [-range, range]
};

struct IntegratorOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.05;
    bool affine_fast_path = true;
};

struct Scenario {
    std::vector<std::int64_t> agents; // identifiers; ordinal = position
    std::vector<IdEdge> initial_edges;
    std::vector<TopologyEvent> events;
    double gamma = 1.0;
    double horizon = 0.0;
    double sample_interval = 0.0;
    InitialState init;
    IntegratorOptions integrator;
    std::string name = "scenario";
};

/// Throws std::invalid_argument describing the first violated invariant
/// (distinct ids >= 1, valid edges, strictly increasing event times inside
/// (0, horizon), adds new / removes existing when replayed in order, ...).
void validate(const Scenario& s);

/// Graph at t = 0.
NetworkGraph initial_graph(const Scenario& s);

/// Applies one event's removals then additions.
NetworkGraph apply_event(const NetworkGraph& g, const Scenario& s,
                         const TopologyEvent& ev);

int ordinal_of(const Scenario& s, std::int64_t identifier);

} // namespace netsize
