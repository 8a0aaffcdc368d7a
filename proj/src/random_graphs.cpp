#include "netsize/random_graphs.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace netsize {

namespace {

std::vector<std::int64_t> draw_distinct_ids(std::mt19937_64& rng, int n,
                                            std::int64_t id_max) {
    if (static_cast<std::int64_t>(n) > id_max)
        throw std::invalid_argument("not enough identifiers available");
    std::vector<std::int64_t> pool(static_cast<std::size_t>(id_max));
    std::iota(pool.begin(), pool.end(), std::int64_t{1});
    // Partial Fisher-Yates: first n entries become the sample.
    for (int k = 0; k < n; ++k) {
        std::uniform_int_distribution<std::size_t> pick(
            static_cast<std::size_t>(k), pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(k)], pool[pick(rng)]);
    }
    pool.resize(static_cast<std::size_t>(n));
    return pool;
}

std::vector<std::pair<int, int>> random_connected_edges(std::mt19937_64& rng,
                                                        int n,
                                                        double extra_edge_prob) {
    std::vector<std::pair<int, int>> edges;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::vector<bool>> present(
        static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int k = 1; k < n; ++k) {
        std::uniform_int_distribution<int> parent(0, k - 1);
        const int p = parent(rng);
        edges.emplace_back(p, k);
        present[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)] = true;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!present[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                coin(rng) < extra_edge_prob)
                edges.emplace_back(i, j);
    return edges;
}

} // namespace

NetworkGraph random_connected_graph(std::mt19937_64& rng, int n_min, int n_max,
                                    std::int64_t id_max, double extra_edge_prob) {
    std::uniform_int_distribution<int> size_dist(n_min, n_max);
    const int n = size_dist(rng);
    return NetworkGraph(draw_distinct_ids(rng, n, id_max),
                        random_connected_edges(rng, n, extra_edge_prob));
}

NetworkGraph random_multi_component_graph(std::mt19937_64& rng, int parts,
                                          int n_min, int n_max,
                                          std::int64_t id_max,
                                          double extra_edge_prob) {
    std::uniform_int_distribution<int> size_dist(n_min, n_max);
    std::vector<int> sizes;
    int total = 0;
    for (int p = 0; p < parts; ++p) {
        sizes.push_back(size_dist(rng));
        total += sizes.back();
    }
    std::vector<std::int64_t> ids = draw_distinct_ids(rng, total, id_max);
    std::vector<std::pair<int, int>> edges;
    int base = 0;
    for (int p = 0; p < parts; ++p) {
        for (auto [i, j] : random_connected_edges(rng, sizes[static_cast<std::size_t>(p)],
                                                  extra_edge_prob))
            edges.emplace_back(base + i, base + j);
        base += sizes[static_cast<std::size_t>(p)];
    }
    return NetworkGraph(std::move(ids), edges);
}

} // namespace netsize
