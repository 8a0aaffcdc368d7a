#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "netsize/scenario.hpp"
#include "netsize/sim.hpp"

namespace netsize {

/// Columns: t, agent_ordinal, identifier, component_id, z, mu, x, u,
/// x_rounded; one row per agent per sample; reals carry 17 significant
/// digits so the stream round-trips exactly.
void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectorySample>& samples,
                          const std::vector<std::int64_t>& identifiers);

struct TrajectoryData {
    std::vector<std::int64_t> identifiers;
    std::vector<TrajectorySample> samples;
};

/// Inverse of write_trajectory_csv. Throws ParseError on malformed input.
TrajectoryData read_trajectory_csv(std::istream& in);

nlohmann::json report_json(const RunReport& report);
std::string report_text(const RunReport& report);

/// Per-component equilibria and certificate constants of the initial
/// topology, computed without integrating.
struct ComponentBounds {
    int component_id = -1;
    std::vector<std::int64_t> identifiers;
    int local_n = 0;
    std::int64_t a_max = 0;
    double lambda2 = 0.0; // NaN for singleton
    double z_star = 0.0;
    int leader_local = -1;
    Eigen::VectorXd x_star;
    double lambda_min_jl = 0.0;
    double eta_norm0 = 0.0;
    double rate = 0.0;
    double u_settle_bound = 0.0;
    double log_c = 0.0;
    double c = 0.0;
    double x_settle_bound = 0.0;
};

std::vector<ComponentBounds> compute_bounds(const Scenario& scenario);
nlohmann::json bounds_json(const std::vector<ComponentBounds>& bounds);
std::string bounds_text(const std::vector<ComponentBounds>& bounds);

} // namespace netsize
