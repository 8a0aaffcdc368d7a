#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "netsize/graph.hpp"

namespace netsize {

/// Stacked protocol state over all agents: max-id estimate z, its dual
/// integrator mu, and the size estimate x.
struct ProtocolState {
    Eigen::VectorXd z;
    Eigen::VectorXd mu;
    Eigen::VectorXd x;

    static ProtocolState zeros(int n);
    int size() const { return static_cast<int>(z.size()); }
    bool all_finite() const;
};

/// Coupling gain gamma > 0, shared by all agents.
struct Params {
    double gamma = 1.0;
};

/// Flattened topology for hot loops: identifiers + neighbor lists.
struct CompiledGraph {
    std::vector<std::int64_t> ids;
    std::vector<std::vector<int>> adj;
    std::size_t edge_count = 0;

    static CompiledGraph from(const NetworkGraph& g);
    /// Induced subgraph of one component, reindexed to 0..local_n-1.
    static CompiledGraph from(const NetworkGraph& g, const ComponentView& c);
    int size() const { return static_cast<int>(ids.size()); }
};

/// Elementwise pull toward each identifier: entry i is
/// 4*a_i^2 * max(a_i - z_i, 0).
Eigen::VectorXd identifier_pull(const Eigen::VectorXd& z,
                                const std::vector<std::int64_t>& ids);

/// Nearest integer; halves round away from zero.
std::int64_t round_nearest(double v);

/// 1 iff the rounded estimate matches the agent's own identifier.
int indicator(std::int64_t u, std::int64_t a);

/// round_nearest over a vector.
std::vector<std::int64_t> round_all(const Eigen::VectorXd& z);

/// Time derivative of the full protocol state. The rounded estimate u is
/// taken from the supplied state (u_i = round_nearest(z_i)).
ProtocolState rhs(const ProtocolState& s, const NetworkGraph& g, const Params& p);
ProtocolState rhs(const ProtocolState& s, const CompiledGraph& g, const Params& p);

/// Same derivative with u supplied explicitly (held fixed across the stages
/// of one integration step).
ProtocolState rhs_frozen(const ProtocolState& s, const CompiledGraph& g,
                         const Params& p, const std::vector<std::int64_t>& u);

/// Allocation-free core used by the integrator.
void rhs_frozen_into(const ProtocolState& s, const CompiledGraph& g,
                     const Params& p, const std::vector<std::int64_t>& u,
                     ProtocolState& out);

} // namespace netsize
