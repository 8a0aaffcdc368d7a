#include "netsize/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace netsize {

NetworkGraph::NetworkGraph(std::vector<std::int64_t> identifiers) {
    std::unordered_set<std::int64_t> seen;
    agents_.reserve(identifiers.size());
    for (std::size_t k = 0; k < identifiers.size(); ++k) {
        const std::int64_t id = identifiers[k];
        if (id < 1)
            throw std::invalid_argument("agent identifier must be >= 1, got " +
                                        std::to_string(id));
        if (!seen.insert(id).second)
            throw std::invalid_argument("duplicate agent identifier " +
                                        std::to_string(id));
        agents_.push_back({static_cast<int>(k), id});
    }
}

NetworkGraph::NetworkGraph(std::vector<std::int64_t> identifiers,
                           const std::vector<std::pair<int, int>>& edges)
    : NetworkGraph(std::move(identifiers)) {
    for (const auto& [i, j] : edges) {
        check_ordinal(i);
        check_ordinal(j);
        if (i == j)
            throw std::invalid_argument("self-loop at ordinal " + std::to_string(i));
        if (!edges_.insert(ordered(i, j)).second)
            throw std::invalid_argument("duplicate edge (" + std::to_string(i) +
                                        "," + std::to_string(j) + ")");
    }
}

std::int64_t NetworkGraph::identifier(int ordinal) const {
    check_ordinal(ordinal);
    return agents_[static_cast<std::size_t>(ordinal)].identifier;
}

std::vector<std::int64_t> NetworkGraph::identifiers() const {
    std::vector<std::int64_t> ids;
    ids.reserve(agents_.size());
    for (const auto& a : agents_) ids.push_back(a.identifier);
    return ids;
}

bool NetworkGraph::has_edge(int i, int j) const {
    if (i == j) return false;
    return edges_.count(ordered(i, j)) > 0;
}

NetworkGraph NetworkGraph::add_edge(int i, int j) const {
    check_ordinal(i);
    check_ordinal(j);
    if (i == j)
        throw std::invalid_argument("cannot add self-loop at ordinal " +
                                    std::to_string(i));
    NetworkGraph out = *this;
    if (!out.edges_.insert(ordered(i, j)).second)
        throw std::invalid_argument("edge (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") already present");
    return out;
}

NetworkGraph NetworkGraph::remove_edge(int i, int j) const {
    check_ordinal(i);
    check_ordinal(j);
    NetworkGraph out = *this;
    if (out.edges_.erase(ordered(i, j)) == 0)
        throw std::invalid_argument("edge (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") not present");
    return out;
}

std::vector<std::vector<int>> NetworkGraph::adjacency() const {
    std::vector<std::vector<int>> adj(agents_.size());
    for (const auto& [i, j] : edges_) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        adj[static_cast<std::size_t>(j)].push_back(i);
    }
    return adj;
}

void NetworkGraph::check_ordinal(int i) const {
    if (i < 0 || i >= size())
        throw std::invalid_argument("ordinal " + std::to_string(i) +
                                    " out of range [0," + std::to_string(size()) + ")");
}

std::pair<int, int> NetworkGraph::ordered(int i, int j) {
    return i < j ? std::make_pair(i, j) : std::make_pair(j, i);
}

int ComponentView::local_index(int ordinal) const {
    auto it = std::lower_bound(members.begin(), members.end(), ordinal);
    if (it == members.end() || *it != ordinal) return -1;
    return static_cast<int>(it - members.begin());
}

std::vector<ComponentView> connected_components(const NetworkGraph& g) {
    const int n = g.size();
    const auto adj = g.adjacency();
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<ComponentView> out;

    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (label[static_cast<std::size_t>(start)] >= 0) continue;
        const int comp = static_cast<int>(out.size());
        out.emplace_back();
        stack.push_back(start);
        label[static_cast<std::size_t>(start)] = comp;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            out[static_cast<std::size_t>(comp)].members.push_back(v);
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (label[static_cast<std::size_t>(w)] < 0) {
                    label[static_cast<std::size_t>(w)] = comp;
                    stack.push_back(w);
                }
            }
        }
    }

    for (auto& c : out) {
        std::sort(c.members.begin(), c.members.end());
        c.local_n = static_cast<int>(c.members.size());
        c.a_max = 0;
        for (int m : c.members) {
            const std::int64_t id = g.identifier(m);
            if (id > c.a_max) {
                c.a_max = id;
                c.leader_ordinal = m;
            }
        }
    }
    return out;
}

std::vector<std::int64_t> component_identifiers(const NetworkGraph& g,
                                                const ComponentView& c) {
    std::vector<std::int64_t> ids;
    ids.reserve(c.members.size());
    for (int m : c.members) ids.push_back(g.identifier(m));
    return ids;
}

int leader_local_index(const ComponentView& c) {
    return c.local_index(c.leader_ordinal);
}

Eigen::MatrixXd laplacian(const NetworkGraph& g, const ComponentView& c) {
    const int n = c.local_n;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j] : g.edges()) {
        const int li = c.local_index(i);
        const int lj = c.local_index(j);
        if (li < 0 || lj < 0) continue; // edge outside this component
        L(li, lj) -= 1.0;
        L(lj, li) -= 1.0;
        L(li, li) += 1.0;
        L(lj, lj) += 1.0;
    }
    return L;
}

} // namespace netsize
