#pragma once

#include <cstdint>
#include <random>

#include "netsize/graph.hpp"

namespace netsize {

/// Connected graph on n in [n_min, n_max] agents with distinct identifiers
/// drawn from 1..id_max: a random attachment tree plus extra edges with the
/// given probability.
NetworkGraph random_connected_graph(std::mt19937_64& rng, int n_min, int n_max,
                                    std::int64_t id_max,
                                    double extra_edge_prob = 0.3);

/// Disjoint union of `parts` random connected graphs (component count is
/// exactly `parts`); identifiers distinct across the whole graph.
NetworkGraph random_multi_component_graph(std::mt19937_64& rng, int parts,
                                          int n_min, int n_max,
                                          std::int64_t id_max,
                                          double extra_edge_prob = 0.3);

} // namespace netsize
