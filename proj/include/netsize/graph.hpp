#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netsize {

/// One agent: its 0-based position in the network plus its unique
/// positive-integer identifier.
struct AgentDescriptor {
    int ordinal = 0;
    std::int64_t identifier = 0;
};

/// Undirected, unweighted topology over a fixed agent list. Value type:
/// add_edge/remove_edge return modified copies.
class NetworkGraph {
public:
    NetworkGraph() = default;

    /// Agents take ordinals 0..n-1 in list order. Identifiers must be
    /// pairwise distinct and >= 1.
    explicit NetworkGraph(std::vector<std::int64_t> identifiers);

    NetworkGraph(std::vector<std::int64_t> identifiers,
                 const std::vector<std::pair<int, int>>& edges);

    int size() const { return static_cast<int>(agents_.size()); }
    const std::vector<AgentDescriptor>& agents() const { return agents_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    std::int64_t identifier(int ordinal) const;
    std::vector<std::int64_t> identifiers() const;

    bool has_edge(int i, int j) const;

    /// Throws std::invalid_argument on self-loop, bad ordinal, or duplicate.
    NetworkGraph add_edge(int i, int j) const;
    /// Throws std::invalid_argument if the edge does not exist.
    NetworkGraph remove_edge(int i, int j) const;

    /// Neighbor lists indexed by ordinal.
    std::vector<std::vector<int>> adjacency() const;

private:
    void check_ordinal(int i) const;
    static std::pair<int, int> ordered(int i, int j);

    std::vector<AgentDescriptor> agents_;
    std::set<std::pair<int, int>> edges_;
};

/// A maximal connected subgraph: sorted member ordinals, its size, the
/// largest member identifier, and the unique member holding it.
struct ComponentView {
    std::vector<int> members;
    int local_n = 0;
    std::int64_t a_max = 0;
    int leader_ordinal = -1;

    /// Position of `ordinal` within members, -1 if absent.
    int local_index(int ordinal) const;
};

/// Partition of the graph into components, ordered by smallest member.
std::vector<ComponentView> connected_components(const NetworkGraph& g);

/// Identifiers of the component members, in member order.
std::vector<std::int64_t> component_identifiers(const NetworkGraph& g,
                                                const ComponentView& c);

/// Local leader index within the component's member ordering.
int leader_local_index(const ComponentView& c);

/// Combinatorial Laplacian of the component's induced subgraph, indexed by
/// member order: diagonal = degree, off-diagonal -1 for neighbors.
Eigen::MatrixXd laplacian(const NetworkGraph& g, const ComponentView& c);

} // namespace netsize
