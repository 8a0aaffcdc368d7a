#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "netsize/graph.hpp"
#include "netsize/spectral.hpp"

namespace netsize {

// ---------------------------------------------------------------------------
// Max-identifier subsystem: equilibrium, contraction rate, settling bound
// ---------------------------------------------------------------------------

/// Common equilibrium value of the z dynamics on a component:
/// 4*a_max^3 / (n + 4*a_max^2), always inside (a_max - 1/4, a_max).
double z_star(const ComponentView& c);
double z_star(std::int64_t a_max, int local_n);

/// Mean-field residual g(r) = -r + (1/n) * sum_i 4 a_i^2 max(a_i - r, 0).
/// Strictly decreasing with a unique zero at z_star.
double mean_field_residual(double r, const std::vector<std::int64_t>& ids);

/// Root of the mean-field residual by bisection on [0, a_max + 1] to 1e-12.
double solve_mean_field_root(const std::vector<std::int64_t>& ids);

/// Consensus-restricted cost (1/2) sum_i (s^2 + 4 a_i^2 P(a_i - s)) with
/// P(p) = p^2 for p >= 0 else 0; its minimizer over s equals z_star.
double consensus_cost(double s, const std::vector<std::int64_t>& ids);

/// Reduced dual equilibrium (1/gamma) * Lambda^-1 R' H(1 z_star). Its norm is
/// invariant to the basis choice in `sd`. Empty for a singleton.
Eigen::VectorXd mu_proj_star(const std::vector<std::int64_t>& ids,
                             std::int64_t a_max, const SpectralData& sd,
                             double gamma);

/// Norm of the combined error [z - 1 z_star; R' mu - mu_proj_star].
double deviation_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& mu,
                      double z_star_value, const Eigen::VectorXd& mu_proj_star_value,
                      const SpectralData& sd);

/// Guaranteed exponential rate of the max-id subsystem:
/// gamma*lambda2 / (4 a^2 + 2 (4 a^2 + 1)^2 / (gamma*lambda2) + gamma*lambda2 + 6).
double contraction_rate(double gamma, double lambda2, std::int64_t a_max);

/// Degenerate singleton case (no lambda2): the exact rate 1 + 4 a_max^2 of
/// the scalar z dynamics in its active piece.
double contraction_rate_singleton(std::int64_t a_max);

/// Settling bound for the rounded max-id estimate:
/// ln(4*sqrt(2)*eta0) / rate, clamped to 0 when the log is not positive.
double max_id_settling_bound(double rate, double eta0);

/// Error envelope of the z estimates: sqrt(2) * eta0 * exp(-rate * t).
double max_id_envelope(double t, double eta0, double rate);

/// Equilibrium data of the max-id subsystem for one component/window.
struct MaxIdEquilibrium {
    double z_star = 0.0;
    Eigen::VectorXd mu_proj_star;
    double rate = 0.0;        // contraction rate
    double eta_norm0 = 0.0;   // deviation norm at window start
    double settle_bound = 0.0;
};

MaxIdEquilibrium max_id_equilibrium(const std::vector<std::int64_t>& ids,
                                    std::int64_t a_max, const SpectralData& sd,
                                    double gamma, const Eigen::VectorXd& z0,
                                    const Eigen::VectorXd& mu0);

// ---------------------------------------------------------------------------
// Size subsystem: equilibrium, spectral floor, certificate constants
// ---------------------------------------------------------------------------

/// J + a_max^3 L where J has a single 1 on the leader's diagonal.
Eigen::MatrixXd size_system_matrix(const Eigen::MatrixXd& laplacian,
                                   int leader_local, std::int64_t a_max);

/// Equilibrium x_star = (J + a_max^3 L)^-1 1. Its leader entry equals the
/// component size exactly; every entry is within sqrt(2)/4 of it.
Eigen::VectorXd x_star(const Eigen::MatrixXd& laplacian, int leader_local,
                       std::int64_t a_max);

/// Smallest eigenvalue of the size system matrix (>= 1/(4n)).
double size_system_min_eigenvalue(const Eigen::MatrixXd& laplacian,
                                  int leader_local, std::int64_t a_max);

/// Certificate constants for the size subsystem. They grow doubly
/// exponentially, so logs are kept alongside the (possibly +inf-saturated)
/// linear value of c.
struct SizeBoundConstants {
    double log_c1 = 0.0;
    double log_c2 = 0.0;
    double log_c3 = 0.0;
    double log_c4 = 0.0;
    double log_c = 0.0;
    double c = 0.0;           // exp(log_c), +inf when out of double range
    double settle_bound = 0.0; // 4n ln(4c/(2-sqrt 2)); +inf when c saturates
};

/// eta0/t1 come from the max-id side; w0 = (1/2)|x(0) - x_star|^2.
SizeBoundConstants size_bound_constants(double eta0, const Eigen::VectorXd& x_star,
                                        std::int64_t a_max, int local_n,
                                        double w0, double t1);

/// Size-error envelope c * exp(-t / (4n)) + sqrt(2)/4.
double size_envelope(double t, double c, int local_n);

struct SizeEquilibrium {
    Eigen::VectorXd x_star;
    double min_eigenvalue = 0.0;
    int leader_local = -1;
    SizeBoundConstants constants;
};

SizeEquilibrium size_equilibrium(const Eigen::MatrixXd& laplacian,
                                 int leader_local, std::int64_t a_max,
                                 const Eigen::VectorXd& x0, double eta0,
                                 double t1);

// ---------------------------------------------------------------------------
// Secant decomposition of the identifier pull (used by the rate proofs)
// ---------------------------------------------------------------------------

/// Secant slope (max(y,0) - max(y*,0)) / (y - y*), zero when y == y*.
double secant_slope(double y, double y_star);

/// Diagonal matrix D with D_ii = 4 a_i^2 * secant_slope(a_i - w_i, a_i - w*_i),
/// satisfying H(w) - H(w*) = -D (w - w*), D >= 0, ||D|| <= 4 a_max^2.
Eigen::MatrixXd secant_slope_matrix(const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& w_star,
                                    const std::vector<std::int64_t>& ids);

struct SecantCheckReport {
    bool identity_ok = false;  // H(w)-H(w*) == -D (w - w*) to 1e-12 relative
    bool psd_ok = false;       // every diagonal entry >= 0
    bool norm_ok = false;      // every diagonal entry <= 4 a_max^2
    double max_identity_err = 0.0; // relative
    double min_diag = 0.0;
    double max_diag = 0.0;
    bool all_ok() const { return identity_ok && psd_ok && norm_ok; }
};

SecantCheckReport check_secant_decomposition(const Eigen::VectorXd& w,
                                             const Eigen::VectorXd& w_star,
                                             const std::vector<std::int64_t>& ids);

} // namespace netsize
