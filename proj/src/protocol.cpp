#include "netsize/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace netsize {

ProtocolState ProtocolState::zeros(int n) {
    ProtocolState s;
    s.z = Eigen::VectorXd::Zero(n);
    s.mu = Eigen::VectorXd::Zero(n);
    s.x = Eigen::VectorXd::Zero(n);
    return s;
}

bool ProtocolState::all_finite() const {
    return z.allFinite() && mu.allFinite() && x.allFinite();
}

CompiledGraph CompiledGraph::from(const NetworkGraph& g) {
    CompiledGraph cg;
    cg.ids = g.identifiers();
    cg.adj = g.adjacency();
    cg.edge_count = g.edges().size();
    return cg;
}

CompiledGraph CompiledGraph::from(const NetworkGraph& g, const ComponentView& c) {
    CompiledGraph cg;
    cg.ids.reserve(c.members.size());
    for (int m : c.members) cg.ids.push_back(g.identifier(m));
    cg.adj.assign(c.members.size(), {});
    for (const auto& [i, j] : g.edges()) {
        const int li = c.local_index(i);
        const int lj = c.local_index(j);
        if (li < 0 || lj < 0) continue;
        cg.adj[static_cast<std::size_t>(li)].push_back(lj);
        cg.adj[static_cast<std::size_t>(lj)].push_back(li);
        ++cg.edge_count;
    }
    return cg;
}

Eigen::VectorXd identifier_pull(const Eigen::VectorXd& z,
                                const std::vector<std::int64_t>& ids) {
    if (static_cast<std::size_t>(z.size()) != ids.size())
        throw std::invalid_argument("identifier_pull: size mismatch");
    Eigen::VectorXd out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double a = static_cast<double>(ids[static_cast<std::size_t>(i)]);
        const double gap = a - z(i);
        out(i) = gap > 0.0 ? 4.0 * a * a * gap : 0.0;
    }
    return out;
}

std::int64_t round_nearest(double v) {
    if (!(std::abs(v) < 4.6e18))
        throw std::domain_error("round_nearest: value out of integer range");
    return std::llround(v);
}

int indicator(std::int64_t u, std::int64_t a) { return u == a ? 1 : 0; }

std::vector<std::int64_t> round_all(const Eigen::VectorXd& z) {
    std::vector<std::int64_t> u(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i)
        u[static_cast<std::size_t>(i)] = round_nearest(z(i));
    return u;
}

ProtocolState rhs(const ProtocolState& s, const NetworkGraph& g, const Params& p) {
    return rhs(s, CompiledGraph::from(g), p);
}

ProtocolState rhs(const ProtocolState& s, const CompiledGraph& g, const Params& p) {
    return rhs_frozen(s, g, p, round_all(s.z));
}

ProtocolState rhs_frozen(const ProtocolState& s, const CompiledGraph& g,
                         const Params& p, const std::vector<std::int64_t>& u) {
    ProtocolState out;
    rhs_frozen_into(s, g, p, u, out);
    return out;
}

void rhs_frozen_into(const ProtocolState& s, const CompiledGraph& g,
                     const Params& p, const std::vector<std::int64_t>& u,
                     ProtocolState& out) {
    const int n = g.size();
    if (s.size() != n || s.mu.size() != n || s.x.size() != n ||
        u.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("rhs: state/graph dimension mismatch (graph " +
                                    std::to_string(n) + ", state " +
                                    std::to_string(s.size()) + ")");
    if (!(p.gamma > 0.0))
        throw std::invalid_argument("rhs: gamma must be positive");

    out.z.resize(n);
    out.mu.resize(n);
    out.x.resize(n);

    for (int i = 0; i < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        const double a = static_cast<double>(g.ids[si]);
        const double gap = a - s.z(i);
        const double pull = gap > 0.0 ? 4.0 * a * a * gap : 0.0;

        double z_coupling = 0.0;
        double mu_coupling = 0.0;
        double x_coupling = 0.0;
        for (int j : g.adj[si]) {
            z_coupling += s.z(j) - s.z(i);
            mu_coupling += s.mu(j) - s.mu(i);
            x_coupling += s.x(j) - s.x(i);
        }

        const double ui = static_cast<double>(u[si]);
        const double gain = ui * ui * ui;
        const int anchored = indicator(u[si], g.ids[si]);

        out.z(i) = -s.z(i) + pull + p.gamma * (z_coupling + mu_coupling);
        out.mu(i) = -p.gamma * z_coupling;
        out.x(i) = 1.0 - static_cast<double>(anchored) * s.x(i) + gain * x_coupling;
    }
}

} // namespace netsize
