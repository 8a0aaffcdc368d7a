#include "netsize/report_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "netsize/analysis.hpp"
#include "netsize/errors.hpp"

namespace netsize {

namespace {

std::string real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json json_real(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return v;
}

std::string show(double v) {
    if (std::isnan(v)) return "n/a";
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string show_opt(const std::optional<double>& v) {
    return v ? show(*v) : "unsettled";
}

} // namespace

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectorySample>& samples,
                          const std::vector<std::int64_t>& identifiers) {
    out << "t,agent_ordinal,identifier,component_id,z,mu,x,u,x_rounded\n";
    for (const auto& s : samples) {
        const std::string t_text = real17(s.t);
        for (std::size_t i = 0; i < s.agents.size(); ++i) {
            const auto& a = s.agents[i];
            out << t_text << ',' << i << ',' << identifiers[i] << ','
                << a.component_id << ',' << real17(a.z) << ',' << real17(a.mu)
                << ',' << real17(a.x) << ',' << a.u << ',' << a.x_rounded
                << '\n';
        }
    }
}

TrajectoryData read_trajectory_csv(std::istream& in) {
    TrajectoryData data;
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line))
        throw ParseError("trajectory.csv", 0, "empty stream");
    ++line_no;
    if (line.back() == '\r') line.pop_back();
    if (line != "t,agent_ordinal,identifier,component_id,z,mu,x,u,x_rounded")
        throw ParseError("trajectory.csv", line_no, "unexpected header");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        double t = 0, z = 0, mu = 0, x = 0;
        long long ordinal = 0, identifier = 0, component = 0, u = 0, xr = 0;
        const int got = std::sscanf(
            line.c_str(),
            "%lf,%lld,%lld,%lld,%lf,%lf,%lf,%lld,%lld",
            &t, &ordinal, &identifier, &component, &z, &mu, &x, &u, &xr);
        if (got != 9)
            throw ParseError("trajectory.csv", line_no, "malformed row");

        if (data.samples.empty() || data.samples.back().t != t ||
            ordinal == 0) {
            data.samples.push_back({t, {}});
        }
        auto& smp = data.samples.back();
        if (static_cast<long long>(smp.agents.size()) != ordinal)
            throw ParseError("trajectory.csv", line_no, "ordinal out of order");
        if (data.samples.size() == 1)
            data.identifiers.push_back(identifier);
        else if (data.identifiers.at(static_cast<std::size_t>(ordinal)) !=
                 identifier)
            throw ParseError("trajectory.csv", line_no, "identifier changed");
        smp.agents.push_back({z, mu, x, u, xr, static_cast<int>(component)});
    }
    return data;
}

nlohmann::json report_json(const RunReport& report) {
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& w : report.windows) {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& c : w.components) {
            comps.push_back({
                {"component_id", c.component_id},
                {"members", c.members},
                {"local_n", c.local_n},
                {"a_max", c.a_max},
                {"leader_ordinal", c.leader_ordinal},
                {"lambda2", json_real(c.lambda2)},
                {"z_star", c.z_star},
                {"eta_norm0", c.eta_norm0},
                {"rate", c.rate},
                {"u_settle_bound", json_real(c.u_settle_bound)},
                {"lambda_min_jl", c.lambda_min_jl},
                {"log_c", json_real(c.log_c)},
                {"c", json_real(c.c)},
                {"x_settle_bound", json_real(c.x_settle_bound)},
                {"x_settle_bound_vacuous", std::isinf(c.x_settle_bound)},
                {"u_settle", c.u_settle ? nlohmann::json(*c.u_settle)
                                        : nlohmann::json(nullptr)},
                {"x_settle", c.x_settle ? nlohmann::json(*c.x_settle)
                                        : nlohmann::json(nullptr)},
                {"z_envelope_violations", c.z_envelope_violations},
                {"x_envelope_violations", c.x_envelope_violations},
                {"x_envelope_checked", c.x_envelope_checked},
            });
        }
        windows.push_back({
            {"t_start", w.t_start},
            {"t_end", w.t_end},
            {"mu_sum_start", w.mu_sum_start},
            {"mu_drift", w.mu_drift},
            {"components", comps},
        });
    }
    return {
        {"windows", windows},
        {"accepted_steps", report.accepted_steps},
        {"rejected_steps", report.rejected_steps},
        {"affine_segments", report.affine_segments},
        {"affine_fallbacks", report.affine_fallbacks},
    };
}

std::string report_text(const RunReport& report) {
    std::ostringstream out;
    for (std::size_t wi = 0; wi < report.windows.size(); ++wi) {
        const auto& w = report.windows[wi];
        out << "window " << wi + 1 << ": t in [" << show(w.t_start) << ", "
            << show(w.t_end) << ")  mu drift " << show(w.mu_drift) << "\n";
        for (const auto& c : w.components) {
            out << "  component " << c.component_id << ": n=" << c.local_n
                << " a_max=" << c.a_max << " leader_ordinal="
                << c.leader_ordinal << " lambda2=" << show(c.lambda2) << "\n";
            out << "    z_star=" << show(c.z_star)
                << " eta0=" << show(c.eta_norm0) << " rate=" << show(c.rate)
                << " lambda_min=" << show(c.lambda_min_jl) << "\n";
            out << "    measured: u settle " << show_opt(c.u_settle)
                << ", x settle " << show_opt(c.x_settle) << "\n";
            out << "    bounds:   u settle <= " << show(c.u_settle_bound)
                << ", x settle <= " << show(c.x_settle_bound)
                << (std::isinf(c.x_settle_bound) ? " (vacuous)" : "")
                << "  [log_c=" << show(c.log_c) << "]\n";
            out << "    envelope violations: z=" << c.z_envelope_violations
                << ", x=" << c.x_envelope_violations
                << (c.x_envelope_checked ? "" : " (x not checked, c infinite)")
                << "\n";
        }
    }
    out << "steps: " << report.accepted_steps << " accepted, "
        << report.rejected_steps << " rejected; affine segments "
        << report.affine_segments << ", fallbacks " << report.affine_fallbacks
        << "\n";
    return out.str();
}

std::vector<ComponentBounds> compute_bounds(const Scenario& scenario) {
    validate(scenario);
    const NetworkGraph g = initial_graph(scenario);
    const ProtocolState st = initial_state(scenario);

    std::vector<ComponentBounds> out;
    const auto components = connected_components(g);
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
        const auto& cv = components[ci];
        const Eigen::MatrixXd lap = laplacian(g, cv);
        const SpectralData sd = spectral(lap);
        const auto ids = component_identifiers(g, cv);

        Eigen::VectorXd z0(cv.local_n), mu0(cv.local_n), x0(cv.local_n);
        for (int k = 0; k < cv.local_n; ++k) {
            const int m = cv.members[static_cast<std::size_t>(k)];
            z0(k) = st.z(m);
            mu0(k) = st.mu(m);
            x0(k) = st.x(m);
        }

        const auto eq =
            max_id_equilibrium(ids, cv.a_max, sd, scenario.gamma, z0, mu0);
        const auto se = size_equilibrium(lap, leader_local_index(cv), cv.a_max,
                                         x0, eq.eta_norm0, eq.settle_bound);

        ComponentBounds b;
        b.component_id = static_cast<int>(ci);
        b.identifiers = ids;
        b.local_n = cv.local_n;
        b.a_max = cv.a_max;
        b.lambda2 = sd.lambda2;
        b.z_star = eq.z_star;
        b.leader_local = leader_local_index(cv);
        b.x_star = se.x_star;
        b.lambda_min_jl = se.min_eigenvalue;
        b.eta_norm0 = eq.eta_norm0;
        b.rate = eq.rate;
        b.u_settle_bound = eq.settle_bound;
        b.log_c = se.constants.log_c;
        b.c = se.constants.c;
        b.x_settle_bound = se.constants.settle_bound;
        out.push_back(std::move(b));
    }
    return out;
}

nlohmann::json bounds_json(const std::vector<ComponentBounds>& bounds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : bounds) {
        std::vector<double> xs(b.x_star.data(), b.x_star.data() + b.x_star.size());
        arr.push_back({
            {"component_id", b.component_id},
            {"identifiers", b.identifiers},
            {"local_n", b.local_n},
            {"a_max", b.a_max},
            {"lambda2", json_real(b.lambda2)},
            {"z_star", b.z_star},
            {"x_star", xs},
            {"lambda_min_jl", b.lambda_min_jl},
            {"eta_norm0", b.eta_norm0},
            {"rate", b.rate},
            {"u_settle_bound", json_real(b.u_settle_bound)},
            {"log_c", json_real(b.log_c)},
            {"c", json_real(b.c)},
            {"x_settle_bound", json_real(b.x_settle_bound)},
        });
    }
    return {{"components", arr}};
}

std::string bounds_text(const std::vector<ComponentBounds>& bounds) {
    std::ostringstream out;
    for (const auto& b : bounds) {
        out << "component " << b.component_id << ": n=" << b.local_n
            << " a_max=" << b.a_max << " lambda2=" << show(b.lambda2) << "\n";
        out << "  z_star=" << show(b.z_star) << "  x_star[leader]="
            << show(b.x_star(b.leader_local))
            << "  lambda_min=" << show(b.lambda_min_jl) << "\n";
        out << "  eta0=" << show(b.eta_norm0) << "  rate=" << show(b.rate)
            << "  u_settle_bound=" << show(b.u_settle_bound) << "\n";
        out << "  log_c=" << show(b.log_c) << "  c=" << show(b.c)
            << "  x_settle_bound=" << show(b.x_settle_bound)
            << (std::isinf(b.x_settle_bound) ? " (vacuous)" : "") << "\n";
    }
    return out.str();
}

} // namespace netsize
