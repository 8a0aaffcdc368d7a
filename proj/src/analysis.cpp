#include "netsize/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "netsize/errors.hpp"
#include "netsize/protocol.hpp"

namespace netsize {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t max_id(const std::vector<std::int64_t>& ids) {
    if (ids.empty())
        throw std::invalid_argument("identifier list must be nonempty");
    return *std::max_element(ids.begin(), ids.end());
}
} // namespace

double z_star(std::int64_t a_max, int local_n) {
    const double a = static_cast<double>(a_max);
    return 4.0 * a * a * a / (static_cast<double>(local_n) + 4.0 * a * a);
}

double z_star(const ComponentView& c) { return z_star(c.a_max, c.local_n); }

double mean_field_residual(double r, const std::vector<std::int64_t>& ids) {
    const double n = static_cast<double>(ids.size());
    double acc = 0.0;
    for (std::int64_t id : ids) {
        const double a = static_cast<double>(id);
        const double gap = a - r;
        if (gap > 0.0) acc += 4.0 * a * a * gap;
    }
    return -r + acc / n;
}

double solve_mean_field_root(const std::vector<std::int64_t>& ids) {
    const double a = static_cast<double>(max_id(ids));
    double lo = 0.0;
    double hi = a + 1.0;
    double flo = mean_field_residual(lo, ids);
    if (flo <= 0.0) {
        // g(0) = (1/n) sum 4 a_i^3 > 0 for any valid id list.
        throw NumericalError("mean-field root: bracket failure at r=0");
    }
    if (mean_field_residual(hi, ids) >= 0.0)
        throw NumericalError("mean-field root: bracket failure at r=a_max+1");
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mean_field_residual(mid, ids) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double consensus_cost(double s, const std::vector<std::int64_t>& ids) {
    double acc = 0.0;
    for (std::int64_t id : ids) {
        const double a = static_cast<double>(id);
        const double gap = a - s;
        const double penalty = gap >= 0.0 ? gap * gap : 0.0;
        acc += s * s + 4.0 * a * a * penalty;
    }
    return 0.5 * acc;
}

Eigen::VectorXd mu_proj_star(const std::vector<std::int64_t>& ids,
                             std::int64_t a_max, const SpectralData& sd,
                             double gamma) {
    const int n = static_cast<int>(ids.size());
    if (sd.laplacian.rows() != n)
        throw std::invalid_argument("mu_proj_star: spectral data size mismatch");
    if (!(gamma > 0.0))
        throw std::invalid_argument("mu_proj_star: gamma must be positive");
    if (n == 1) return Eigen::VectorXd(0);

    const Eigen::VectorXd pull = identifier_pull(
        Eigen::VectorXd::Constant(n, z_star(a_max, n)), ids);
    Eigen::VectorXd reduced = sd.r_basis.transpose() * pull;
    for (Eigen::Index k = 0; k < reduced.size(); ++k)
        reduced(k) /= gamma * sd.lambda_diag(k);
    return reduced;
}

double deviation_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& mu,
                      double z_star_value, const Eigen::VectorXd& mu_proj_star_value,
                      const SpectralData& sd) {
    const auto n = sd.laplacian.rows();
    if (z.size() != n || mu.size() != n)
        throw std::invalid_argument("deviation_norm: state size mismatch");
    const double z_part =
        (z - Eigen::VectorXd::Constant(n, z_star_value)).squaredNorm();
    const double mu_part =
        (sd.r_basis.transpose() * mu - mu_proj_star_value).squaredNorm();
    return std::sqrt(z_part + mu_part);
}

double contraction_rate(double gamma, double lambda2, std::int64_t a_max) {
    if (!(gamma > 0.0) || !(lambda2 > 0.0) || a_max < 1)
        throw std::invalid_argument("contraction_rate: arguments must be positive");
    const double a2 = 4.0 * static_cast<double>(a_max) * static_cast<double>(a_max);
    const double gl = gamma * lambda2;
    return gl / (a2 + 2.0 * (a2 + 1.0) * (a2 + 1.0) / gl + gl + 6.0);
}

double contraction_rate_singleton(std::int64_t a_max) {
    const double a = static_cast<double>(a_max);
    return 1.0 + 4.0 * a * a;
}

double max_id_settling_bound(double rate, double eta0) {
    if (!(rate > 0.0))
        throw std::invalid_argument("max_id_settling_bound: rate must be positive");
    if (!(eta0 > 0.0)) return 0.0;
    const double lg = std::log(4.0 * std::sqrt(2.0) * eta0);
    return lg > 0.0 ? lg / rate : 0.0;
}

double max_id_envelope(double t, double eta0, double rate) {
    return std::sqrt(2.0) * eta0 * std::exp(-rate * t);
}

MaxIdEquilibrium max_id_equilibrium(const std::vector<std::int64_t>& ids,
                                    std::int64_t a_max, const SpectralData& sd,
                                    double gamma, const Eigen::VectorXd& z0,
                                    const Eigen::VectorXd& mu0) {
    MaxIdEquilibrium eq;
    eq.z_star = z_star(a_max, static_cast<int>(ids.size()));
    eq.mu_proj_star = mu_proj_star(ids, a_max, sd, gamma);
    eq.rate = ids.size() == 1 ? contraction_rate_singleton(a_max)
                              : contraction_rate(gamma, sd.lambda2, a_max);
    eq.eta_norm0 = deviation_norm(z0, mu0, eq.z_star, eq.mu_proj_star, sd);
    eq.settle_bound = max_id_settling_bound(eq.rate, eq.eta_norm0);
    return eq;
}

Eigen::MatrixXd size_system_matrix(const Eigen::MatrixXd& laplacian,
                                   int leader_local, std::int64_t a_max) {
    const auto n = laplacian.rows();
    if (leader_local < 0 || leader_local >= n)
        throw std::invalid_argument("size_system_matrix: bad leader index");
    const double a = static_cast<double>(a_max);
    Eigen::MatrixXd m = a * a * a * laplacian;
    m(leader_local, leader_local) += 1.0;
    return m;
}

Eigen::VectorXd x_star(const Eigen::MatrixXd& laplacian, int leader_local,
                       std::int64_t a_max) {
    const Eigen::MatrixXd m = size_system_matrix(laplacian, leader_local, a_max);
    Eigen::LDLT<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericalError("x_star: factorization failed (disconnected component?)");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.rows());
    Eigen::VectorXd sol = solver.solve(ones);
    // Two rounds of iterative refinement: the system is stiff (condition
    // ~ a^3 * n) and the leader entry must hit n to ~1e-12.
    for (int round = 0; round < 2; ++round)
        sol += solver.solve(ones - m * sol);
    if (!sol.allFinite() ||
        (m * sol - ones).norm() > 1e-6 * static_cast<double>(m.rows()))
        throw NumericalError("x_star: singular size system");
    return sol;
}

double size_system_min_eigenvalue(const Eigen::MatrixXd& laplacian,
                                  int leader_local, std::int64_t a_max) {
    const Eigen::MatrixXd m = size_system_matrix(laplacian, leader_local, a_max);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericalError("size_system_min_eigenvalue: solver failed");
    return solver.eigenvalues()(0);
}

SizeBoundConstants size_bound_constants(double eta0, const Eigen::VectorXd& xs,
                                        std::int64_t a_max, int local_n,
                                        double w0, double t1) {
    if (!(eta0 >= 0.0) || !(w0 >= 0.0) || !(t1 >= 0.0))
        throw std::invalid_argument("size_bound_constants: inputs must be finite and nonnegative");
    const double n = static_cast<double>(local_n);
    const double a = static_cast<double>(a_max);
    const double bump = std::sqrt(2.0) * eta0 + a + 0.5;
    const double c1 = 1.0 + n * a * a * a + n * bump * bump * bump;
    const double c2 = c1 * xs.norm();
    const double c3 = -1.0 / (2.0 * n) + 2.0 * c1 + 2.0 * c2;
    const double q = c2 / c3;

    SizeBoundConstants out;
    out.log_c1 = std::log(c1);
    out.log_c2 = std::log(c2);
    out.log_c3 = std::log(c3);

    const double growth = c3 * t1;
    if (growth <= 700.0) {
        const double c4 = (w0 + q) * std::exp(growth) - q;
        out.log_c4 = c4 > 0.0 ? std::log(c4) : -kInf;
    } else {
        // (w0+q) e^{c3 t1} - q in log domain; the -q correction is negligible
        // at this magnitude but kept via log1p for exactness.
        out.log_c4 = std::log(w0 + q) + growth +
                     std::log1p(-q * std::exp(-growth) / (w0 + q));
    }

    out.log_c = 0.5 * (std::log(2.0) + out.log_c4) + t1 / (4.0 * n);
    out.c = std::exp(out.log_c); // saturates to +inf beyond double range

    if (std::isinf(out.c)) {
        out.settle_bound = kInf;
    } else if (out.c == 0.0) {
        out.settle_bound = 0.0;
    } else {
        const double t2 = 4.0 * n * (std::log(4.0) + out.log_c -
                                     std::log(2.0 - std::sqrt(2.0)));
        out.settle_bound = std::max(0.0, t2);
    }
    return out;
}

double size_envelope(double t, double c, int local_n) {
    return c * std::exp(-t / (4.0 * static_cast<double>(local_n))) +
           std::sqrt(2.0) / 4.0;
}

SizeEquilibrium size_equilibrium(const Eigen::MatrixXd& laplacian,
                                 int leader_local, std::int64_t a_max,
                                 const Eigen::VectorXd& x0, double eta0,
                                 double t1) {
    SizeEquilibrium eq;
    eq.x_star = x_star(laplacian, leader_local, a_max);
    eq.min_eigenvalue = size_system_min_eigenvalue(laplacian, leader_local, a_max);
    eq.leader_local = leader_local;
    const double w0 = 0.5 * (x0 - eq.x_star).squaredNorm();
    eq.constants = size_bound_constants(eta0, eq.x_star, a_max,
                                        static_cast<int>(laplacian.rows()), w0, t1);
    return eq;
}

double secant_slope(double y, double y_star) {
    if (y == y_star) return 0.0;
    const double top = std::max(y, 0.0) - std::max(y_star, 0.0);
    return top / (y - y_star);
}

Eigen::MatrixXd secant_slope_matrix(const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& w_star,
                                    const std::vector<std::int64_t>& ids) {
    const auto n = w.size();
    if (w_star.size() != n || static_cast<Eigen::Index>(ids.size()) != n)
        throw std::invalid_argument("secant_slope_matrix: size mismatch");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = static_cast<double>(ids[static_cast<std::size_t>(i)]);
        d(i, i) = 4.0 * a * a * secant_slope(a - w(i), a - w_star(i));
    }
    return d;
}

SecantCheckReport check_secant_decomposition(const Eigen::VectorXd& w,
                                             const Eigen::VectorXd& w_star,
                                             const std::vector<std::int64_t>& ids) {
    const Eigen::MatrixXd d = secant_slope_matrix(w, w_star, ids);
    const Eigen::VectorXd lhs =
        identifier_pull(w, ids) - identifier_pull(w_star, ids);
    const Eigen::VectorXd rhs = -d * (w - w_star);

    SecantCheckReport rep;
    const double scale = std::max({lhs.cwiseAbs().maxCoeff(),
                                   rhs.cwiseAbs().maxCoeff(), 1.0});
    rep.max_identity_err = (lhs - rhs).cwiseAbs().maxCoeff() / scale;
    rep.identity_ok = rep.max_identity_err <= 1e-12;

    rep.min_diag = d.diagonal().minCoeff();
    rep.max_diag = d.diagonal().maxCoeff();
    rep.psd_ok = rep.min_diag >= 0.0;

    const double a = static_cast<double>(max_id(ids));
    rep.norm_ok = rep.max_diag <= 4.0 * a * a * (1.0 + 1e-12);
    return rep;
}

} // namespace netsize
