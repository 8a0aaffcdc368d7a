#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netsize/analysis.hpp"
#include "netsize/graph.hpp"
#include "netsize/protocol.hpp"
#include "netsize/scenario.hpp"
#include "netsize/spectral.hpp"

namespace netsize {

// ---------------------------------------------------------------------------
// Samples and reports
// ---------------------------------------------------------------------------

struct AgentSample {
    double z = 0.0;
    double mu = 0.0;
    double x = 0.0;
    std::int64_t u = 0;          // round_nearest(z)
    std::int64_t x_rounded = 0;  // round_nearest(x)
    int component_id = -1;
};

struct TrajectorySample {
    double t = 0.0;
    std::vector<AgentSample> agents;
};

struct ComponentWindowReport {
    int component_id = -1;
    std::vector<int> members;
    int local_n = 0;
    std::int64_t a_max = 0;
    int leader_ordinal = -1;
    double lambda2 = 0.0;      // NaN for singletons
    double z_star = 0.0;
    double eta_norm0 = 0.0;    // deviation norm at window start
    double rate = 0.0;
    double u_settle_bound = 0.0;
    double lambda_min_jl = 0.0;
    double log_c = 0.0;
    double c = 0.0;            // +inf when saturated
    double x_settle_bound = 0.0; // +inf when c saturates
    std::optional<double> u_settle;  // measured, absolute time
    std::optional<double> x_settle;
    long z_envelope_violations = 0;
    long x_envelope_violations = 0;
    bool x_envelope_checked = false; // true iff c is finite
};

struct WindowReport {
    double t_start = 0.0;
    double t_end = 0.0;
    double mu_sum_start = 0.0; // 1' mu at window start
    double mu_drift = 0.0;     // max over samples of |1' mu - mu_sum_start|
    std::vector<ComponentWindowReport> components;
};

struct RunReport {
    std::vector<WindowReport> windows;
    std::uint64_t accepted_steps = 0;
    std::uint64_t rejected_steps = 0;
    std::uint64_t affine_segments = 0;
    std::uint64_t affine_fallbacks = 0;
};

struct SimResult {
    std::vector<TrajectorySample> samples;
    RunReport report;
};

// ---------------------------------------------------------------------------
// Low-level stepping
// ---------------------------------------------------------------------------

struct StepControl {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.05;
};

struct StepOutcome {
    ProtocolState state;
    double h_used = 0.0;
    double h_next = 0.0;
    int rejections = 0;
};

/// Stability cap for an explicit step: 1/(2 (2 u^3 d + 4 gamma d + 4 a^2 + 1))
/// with u the largest rounded-estimate magnitude and d the max degree.
double step_stability_cap(const CompiledGraph& g, double gamma,
                          const std::vector<std::int64_t>& u);

/// One accepted embedded RK step of the full dynamics from `s` with initial
/// trial size h (shrunk on rejection; u frozen at step start). Throws
/// SimulationError on step-size underflow or non-finite state.
StepOutcome step(const ProtocolState& s, const CompiledGraph& g,
                 const Params& p, double h, const StepControl& ctl);

// ---------------------------------------------------------------------------
// Per-component affine machinery (settled regime)
// ---------------------------------------------------------------------------

/// Frozen matrices of one component in the settled regime, where both
/// subsystems are affine and can be propagated exactly through matrix
/// exponentials. Also the per-window home of equilibrium data.
class ComponentSystem {
public:
    ComponentSystem(CompiledGraph local, Eigen::MatrixXd laplacian,
                    SpectralData sd, double gamma);

    const CompiledGraph& graph() const { return local_; }
    const SpectralData& spectral_data() const { return sd_; }
    int size() const { return local_.size(); }
    std::int64_t a_max() const { return a_max_; }
    int leader_local() const { return leader_local_; }
    double gamma() const { return gamma_; }
    double z_star() const { return z_star_; }
    const Eigen::VectorXd& mu_proj_star() const { return mu_proj_star_; }
    const Eigen::VectorXd& x_star() const { return x_star_; }
    double lambda_min_jl() const { return lambda_min_jl_; }
    /// Gap from the equilibrium to the nearest switching surface of the
    /// identifier pull, a_max - z_star, in (0, 1/4).
    double piece_margin() const { return piece_margin_; }

    double deviation(const Eigen::VectorXd& z, const Eigen::VectorXd& mu) const;

    /// All rounded estimates equal a_max.
    bool u_settled(const Eigen::VectorXd& z) const;
    /// z lies in the affine piece: z_leader <= a_max, z_i >= a_i otherwise.
    bool in_affine_piece(const Eigen::VectorXd& z) const;

    /// Certificate that u stays settled for all future time (so the size
    /// subsystem is affine from here on).
    bool x_affine_admissible(const Eigen::VectorXd& z,
                             const Eigen::VectorXd& mu) const;
    /// Certificate that the whole component stays in the affine piece.
    bool full_affine_admissible(const Eigen::VectorXd& z,
                                const Eigen::VectorXd& mu) const;

    /// x(t+dt) = x_star + exp(-(J + a^3 L) dt) (x - x_star).
    void propagate_x(Eigen::VectorXd& x, double dt) const;
    /// Exact propagation of (z, mu) in the affine piece.
    void propagate_zmu(Eigen::VectorXd& z, Eigen::VectorXd& mu, double dt) const;

private:
    const Eigen::MatrixXd& x_propagator(double dt) const;
    const Eigen::MatrixXd& zmu_propagator(double dt) const;

    CompiledGraph local_;
    SpectralData sd_;
    double gamma_ = 0.0;
    std::int64_t a_max_ = 0;
    int leader_local_ = -1;
    double z_star_ = 0.0;
    double piece_margin_ = 0.0;
    Eigen::VectorXd mu_proj_star_;
    Eigen::VectorXd x_star_;
    double lambda_min_jl_ = 0.0;
    Eigen::MatrixXd size_basis_;     // eigenvectors of J + a^3 L
    Eigen::VectorXd size_spectrum_;  // its eigenvalues
    Eigen::MatrixXd zmu_matrix_;     // 2n x 2n affine system matrix
    Eigen::VectorXd zmu_equilibrium_;
    mutable std::map<double, Eigen::MatrixXd> x_cache_;
    mutable std::map<double, Eigen::MatrixXd> zmu_cache_;
};

/// Exact settled-regime propagation of a component-local state by dt.
/// Throws std::domain_error unless full_affine_admissible holds.
ProtocolState affine_fast_path(const ProtocolState& local,
                               const ComponentSystem& sys, double dt);

// ---------------------------------------------------------------------------
// Settling detection and integration
// ---------------------------------------------------------------------------

struct SettlingTimes {
    std::optional<double> u_settle;
    std::optional<double> x_settle;
};

/// Earliest sample time in [t_start, t_end) after which the settling
/// condition holds at every later sample of the window; nullopt if it fails
/// at the final sample.
SettlingTimes detect_settling(const std::vector<TrajectorySample>& samples,
                              double t_start, double t_end,
                              const ComponentView& c, std::int64_t a_max,
                              int local_n);

/// State at t = 0 per the scenario's init block (zeros, or seeded uniform
/// draws in z-, mu-, x-order).
ProtocolState initial_state(const Scenario& scenario);

/// Integrates a validated scenario over [0, horizon], sampling at multiples
/// of sample_interval, recomputing components/equilibria at each topology
/// event while leaving the state untouched. Deterministic for a fixed
/// scenario. Throws SimulationError on integration failure.
SimResult integrate(const Scenario& scenario);

} // namespace netsize
