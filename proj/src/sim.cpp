#include "netsize/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "netsize/errors.hpp"
#include "netsize/log.hpp"

namespace netsize {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct StepStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
};

class OdeSystem {
public:
    virtual ~OdeSystem() = default;
    virtual int dim() const = 0;
    /// Called with the step-start state before each attempted step; freezes
    /// discrete inputs and the stability cap. Returns true when the
    /// right-hand side is unchanged since the last call (last stage of the
    /// previous accepted step is then reusable).
    virtual bool begin_step(const Eigen::VectorXd& y) = 0;
    virtual double hard_cap() const = 0;
    virtual void eval(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const = 0;
};

class AdaptiveStepper {
public:
    AdaptiveStepper(OdeSystem& sys, StepControl ctl) : sys_(sys), ctl_(ctl) {
        const int d = sys.dim();
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_,
                        &yerr_})
            v->resize(d);
    }

    void reset() { have_k1_ = false; }

    /// One accepted step from `y` with persistent trial size h (shrunk on
    /// rejection, capped by max_step/stability/`limit`). A step clipped only
    /// by `limit` does not shrink the persistent size. Returns the size used.
    double single_step(Eigen::VectorXd& y, double& h, double t, double limit,
                       StepStats& stats) {
        if (!y.allFinite())
            throw SimulationError("non-finite state at t=" + std::to_string(t));
        if (!sys_.begin_step(y)) have_k1_ = false;
        const double cap = std::min(ctl_.max_step, sys_.hard_cap());
        if (!(h > 0.0)) h = cap;
        double h_nat = std::min(h, cap);
        double h_try = std::min(h_nat, limit);
        bool clipped = h_try < h_nat;
        for (;;) {
            if (h_try < 1e-14 * std::max(1.0, std::abs(t)))
                throw SimulationError("step size underflow at t=" +
                                      std::to_string(t));
            const double err = attempt(y, h_try);
            if (err <= 1.0) {
                y.swap(ynew_);
                k1_.swap(k7_);
                have_k1_ = true;
                ++stats.accepted;
                const double fac = std::clamp(
                    0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
                h = clipped ? h_nat : std::min(h_try * fac, cap);
                return h_try;
            }
            ++stats.rejected;
            const double fac =
                std::isfinite(err)
                    ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9)
                    : 0.1;
            h_try *= fac;
            clipped = false; // now error-limited, not boundary-limited
            h_nat = h_try;
        }
    }

    /// Advance y in place from t0 to t1.
    void advance(Eigen::VectorXd& y, double t0, double t1, double& h,
                 StepStats& stats) {
        double t = t0;
        const double eps = 1e-12 * std::max(1.0, std::abs(t1));
        while (t < t1 - eps) t += single_step(y, h, t, t1 - t, stats);
    }

private:
    double attempt(const Eigen::VectorXd& y, double h) {
        if (!have_k1_) {
            sys_.eval(y, k1_);
            have_k1_ = true;
        }
        ytmp_ = y + h * (kA21 * k1_);
        sys_.eval(ytmp_, k2_);
        ytmp_ = y + h * (kA31 * k1_ + kA32 * k2_);
        sys_.eval(ytmp_, k3_);
        ytmp_ = y + h * (kA41 * k1_ + kA42 * k2_ + kA43 * k3_);
        sys_.eval(ytmp_, k4_);
        ytmp_ = y + h * (kA51 * k1_ + kA52 * k2_ + kA53 * k3_ + kA54 * k4_);
        sys_.eval(ytmp_, k5_);
        ytmp_ = y + h * (kA61 * k1_ + kA62 * k2_ + kA63 * k3_ + kA64 * k4_ +
                         kA65 * k5_);
        sys_.eval(ytmp_, k6_);
        ynew_ = y + h * (kB1 * k1_ + kB3 * k3_ + kB4 * k4_ + kB5 * k5_ +
                         kB6 * k6_);
        if (!ynew_.allFinite()) return kInf;
        sys_.eval(ynew_, k7_);
        yerr_ = h * (kE1 * k1_ + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ +
                     kE6 * k6_ + kE7 * k7_);
        if (!yerr_.allFinite()) return kInf;

        double acc = 0.0;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            const double sc = ctl_.abs_tol +
                              ctl_.rel_tol * std::max(std::abs(y(j)),
                                                      std::abs(ynew_(j)));
            const double w = yerr_(j) / sc;
            acc += w * w;
        }
        const double err = std::sqrt(acc / static_cast<double>(y.size()));
        return std::isfinite(err) ? err : kInf;
    }

    OdeSystem& sys_;
    StepControl ctl_;
    bool have_k1_ = false;
    Eigen::VectorXd k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, yerr_;
};

int max_degree(const CompiledGraph& g) {
    std::size_t d = 0;
    for (const auto& nbrs : g.adj) d = std::max(d, nbrs.size());
    return static_cast<int>(d);
}

std::int64_t max_identifier(const CompiledGraph& g) {
    std::int64_t a = 1;
    for (auto id : g.ids) a = std::max(a, id);
    return a;
}

double stability_cap(std::int64_t a_max, int dmax, double gamma,
                     std::int64_t u_max) {
    const double a = static_cast<double>(a_max);
    const double u = static_cast<double>(u_max);
    const double d = static_cast<double>(dmax);
    return 0.5 / (2.0 * u * u * u * d + 4.0 * gamma * d + 4.0 * a * a + 1.0);
}

/// Full dynamics packed as [z; mu; x]; u frozen per step.
class FullSystem : public OdeSystem {
public:
    FullSystem(const CompiledGraph& g, Params p)
        : g_(g), p_(p), n_(g.size()), dmax_(max_degree(g)),
          a_max_(max_identifier(g)), u_(static_cast<std::size_t>(n_), 0) {
        s_.z.resize(n_);
        s_.mu.resize(n_);
        s_.x.resize(n_);
        ds_ = s_;
    }

    int dim() const override { return 3 * n_; }

    bool begin_step(const Eigen::VectorXd& y) override {
        std::int64_t u_abs_max = 0;
        bool same = have_u_;
        for (int i = 0; i < n_; ++i) {
            const double zi = y(i);
            if (!(std::abs(zi) < 1e15))
                throw SimulationError("state magnitude exploded (|z| >= 1e15)");
            const std::int64_t ui = round_nearest(zi);
            if (u_[static_cast<std::size_t>(i)] != ui) {
                u_[static_cast<std::size_t>(i)] = ui;
                same = false;
            }
            u_abs_max = std::max(u_abs_max, std::abs(ui));
        }
        have_u_ = true;
        cap_ = stability_cap(a_max_, dmax_, p_.gamma, u_abs_max);
        return same;
    }

    double hard_cap() const override { return cap_; }

    void eval(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const override {
        s_.z = y.segment(0, n_);
        s_.mu = y.segment(n_, n_);
        s_.x = y.segment(2 * n_, n_);
        rhs_frozen_into(s_, g_, p_, u_, ds_);
        dy.segment(0, n_) = ds_.z;
        dy.segment(n_, n_) = ds_.mu;
        dy.segment(2 * n_, n_) = ds_.x;
    }

    const std::vector<std::int64_t>& frozen_u() const { return u_; }

private:
    const CompiledGraph& g_;
    Params p_;
    int n_;
    int dmax_;
    std::int64_t a_max_;
    std::vector<std::int64_t> u_;
    bool have_u_ = false;
    double cap_ = kInf;
    mutable ProtocolState s_, ds_;
};

/// The (z, mu) subsystem alone, packed as [z; mu]; independent of x and of
/// the rounded estimates, so no per-step freezing and no u^3 stiffness.
class ZmuSystem : public OdeSystem {
public:
    ZmuSystem(const CompiledGraph& g, Params p)
        : g_(g), p_(p), n_(g.size()),
          cap_(stability_cap(max_identifier(g), max_degree(g), p.gamma, 0)) {}

    int dim() const override { return 2 * n_; }
    bool begin_step(const Eigen::VectorXd&) override { return true; }
    double hard_cap() const override { return cap_; }

    void eval(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const override {
        for (int i = 0; i < n_; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            const double a = static_cast<double>(g_.ids[si]);
            const double zi = y(i);
            const double gap = a - zi;
            const double pull = gap > 0.0 ? 4.0 * a * a * gap : 0.0;
            double zc = 0.0;
            double mc = 0.0;
            for (int j : g_.adj[si]) {
                zc += y(j) - zi;
                mc += y(n_ + j) - y(n_ + i);
            }
            dy(i) = -zi + pull + p_.gamma * (zc + mc);
            dy(n_ + i) = -p_.gamma * zc;
        }
    }

private:
    const CompiledGraph& g_;
    Params p_;
    int n_;
    double cap_;
};

} // namespace

double step_stability_cap(const CompiledGraph& g, double gamma,
                          const std::vector<std::int64_t>& u) {
    std::int64_t u_abs_max = 0;
    for (auto ui : u) u_abs_max = std::max(u_abs_max, std::abs(ui));
    return stability_cap(max_identifier(g), max_degree(g), gamma, u_abs_max);
}

StepOutcome step(const ProtocolState& s, const CompiledGraph& g,
                 const Params& p, double h, const StepControl& ctl) {
    const int n = g.size();
    if (s.size() != n || s.mu.size() != n || s.x.size() != n)
        throw std::invalid_argument("step: state/graph dimension mismatch");
    FullSystem sys(g, p);
    AdaptiveStepper stepper(sys, ctl);

    Eigen::VectorXd y(3 * n);
    y.segment(0, n) = s.z;
    y.segment(n, n) = s.mu;
    y.segment(2 * n, n) = s.x;

    StepStats stats;
    StepOutcome out;
    out.h_used = stepper.single_step(y, h, 0.0, kInf, stats);
    out.h_next = h;
    out.rejections = static_cast<int>(stats.rejected);
    out.state.z = y.segment(0, n);
    out.state.mu = y.segment(n, n);
    out.state.x = y.segment(2 * n, n);
    return out;
}

// ---------------------------------------------------------------------------
// ComponentSystem
// ---------------------------------------------------------------------------

ComponentSystem::ComponentSystem(CompiledGraph local, Eigen::MatrixXd laplacian,
                                 SpectralData sd, double gamma)
    : local_(std::move(local)), sd_(std::move(sd)), gamma_(gamma) {
    const int n = local_.size();
    if (sd_.laplacian.rows() != n || laplacian.rows() != n)
        throw std::invalid_argument("ComponentSystem: size mismatch");

    a_max_ = 0;
    for (int i = 0; i < n; ++i) {
        if (local_.ids[static_cast<std::size_t>(i)] > a_max_) {
            a_max_ = local_.ids[static_cast<std::size_t>(i)];
            leader_local_ = i;
        }
    }
    z_star_ = netsize::z_star(a_max_, n);
    piece_margin_ = static_cast<double>(a_max_) - z_star_;
    mu_proj_star_ = netsize::mu_proj_star(local_.ids, a_max_, sd_, gamma_);
    x_star_ = netsize::x_star(laplacian, leader_local_, a_max_);

    const Eigen::MatrixXd m =
        size_system_matrix(laplacian, leader_local_, a_max_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw NumericalError("ComponentSystem: size-system eigen solve failed");
    size_basis_ = es.eigenvectors();
    size_spectrum_ = es.eigenvalues();
    lambda_min_jl_ = size_spectrum_(0);

    // Affine (z, mu) system in the settled piece:
    //   dz = (-I - 4 a^2 e_l e_l' - gamma L) z - gamma L mu + 4 a^3 e_l
    //   dmu = gamma L z
    const double a = static_cast<double>(a_max_);
    zmu_matrix_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    zmu_matrix_.topLeftCorner(n, n) =
        -Eigen::MatrixXd::Identity(n, n) - gamma_ * laplacian;
    zmu_matrix_(leader_local_, leader_local_) -= 4.0 * a * a;
    zmu_matrix_.topRightCorner(n, n) = -gamma_ * laplacian;
    zmu_matrix_.bottomLeftCorner(n, n) = gamma_ * laplacian;

    zmu_equilibrium_.resize(2 * n);
    zmu_equilibrium_.segment(0, n) = Eigen::VectorXd::Constant(n, z_star_);
    zmu_equilibrium_.segment(n, n) = sd_.r_basis * mu_proj_star_;
}

double ComponentSystem::deviation(const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& mu) const {
    return deviation_norm(z, mu, z_star_, mu_proj_star_, sd_);
}

bool ComponentSystem::u_settled(const Eigen::VectorXd& z) const {
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (round_nearest(z(i)) != a_max_) return false;
    return true;
}

bool ComponentSystem::in_affine_piece(const Eigen::VectorXd& z) const {
    const double a = static_cast<double>(a_max_);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (i == leader_local_) {
            if (z(i) > a) return false;
        } else if (z(i) <
                   static_cast<double>(local_.ids[static_cast<std::size_t>(i)])) {
            return false;
        }
    }
    return true;
}

bool ComponentSystem::x_affine_admissible(const Eigen::VectorXd& z,
                                          const Eigen::VectorXd& mu) const {
    const double dev = deviation(z, mu);
    return std::sqrt(2.0) * dev < 0.99 * (0.5 - piece_margin_) && u_settled(z);
}

bool ComponentSystem::full_affine_admissible(const Eigen::VectorXd& z,
                                             const Eigen::VectorXd& mu) const {
    const double dev = deviation(z, mu);
    return std::sqrt(2.0) * dev < 0.99 * piece_margin_ && u_settled(z) &&
           in_affine_piece(z);
}

const Eigen::MatrixXd& ComponentSystem::x_propagator(double dt) const {
    auto it = x_cache_.find(dt);
    if (it == x_cache_.end()) {
        const Eigen::VectorXd decay = (-dt * size_spectrum_.array()).exp();
        it = x_cache_
                 .emplace(dt, size_basis_ * decay.asDiagonal() *
                                  size_basis_.transpose())
                 .first;
    }
    return it->second;
}

const Eigen::MatrixXd& ComponentSystem::zmu_propagator(double dt) const {
    auto it = zmu_cache_.find(dt);
    if (it == zmu_cache_.end())
        it = zmu_cache_.emplace(dt, (dt * zmu_matrix_).exp().eval()).first;
    return it->second;
}

void ComponentSystem::propagate_x(Eigen::VectorXd& x, double dt) const {
    x = x_star_ + x_propagator(dt) * (x - x_star_);
}

void ComponentSystem::propagate_zmu(Eigen::VectorXd& z, Eigen::VectorXd& mu,
                                    double dt) const {
    const int n = local_.size();
    Eigen::VectorXd w(2 * n);
    w.segment(0, n) = z;
    w.segment(n, n) = mu;
    w = zmu_equilibrium_ + zmu_propagator(dt) * (w - zmu_equilibrium_);
    z = w.segment(0, n);
    mu = w.segment(n, n);
}

ProtocolState affine_fast_path(const ProtocolState& local,
                               const ComponentSystem& sys, double dt) {
    if (!(dt >= 0.0))
        throw std::domain_error("affine_fast_path: dt must be nonnegative");
    if (!sys.full_affine_admissible(local.z, local.mu))
        throw std::domain_error(
            "affine_fast_path: state is not certified settled");
    ProtocolState out = local;
    if (dt > 0.0) {
        sys.propagate_zmu(out.z, out.mu, dt);
        sys.propagate_x(out.x, dt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Settling detection
// ---------------------------------------------------------------------------

SettlingTimes detect_settling(const std::vector<TrajectorySample>& samples,
                              double t_start, double t_end,
                              const ComponentView& c, std::int64_t a_max,
                              int local_n) {
    std::vector<const TrajectorySample*> in_window;
    for (const auto& s : samples)
        if (s.t >= t_start && s.t < t_end) in_window.push_back(&s);

    SettlingTimes out;
    if (in_window.empty()) return out;

    auto u_ok = [&](const TrajectorySample& s) {
        for (int m : c.members)
            if (s.agents[static_cast<std::size_t>(m)].u != a_max) return false;
        return true;
    };
    auto x_ok = [&](const TrajectorySample& s) {
        for (int m : c.members)
            if (s.agents[static_cast<std::size_t>(m)].x_rounded != local_n)
                return false;
        return true;
    };

    // Earliest sample from which the condition holds through the window end.
    auto settle_time = [&](auto&& cond) -> std::optional<double> {
        std::optional<double> t;
        for (auto it = in_window.rbegin(); it != in_window.rend(); ++it) {
            if (!cond(**it)) break;
            t = (*it)->t;
        }
        return t;
    };

    out.u_settle = settle_time(u_ok);
    out.x_settle = settle_time(x_ok);
    return out;
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

namespace {

enum class Mode { adaptive, x_affine, full_affine };

struct ComponentRuntime {
    ComponentView view;
    std::unique_ptr<ComponentSystem> sys;
    MaxIdEquilibrium eq;
    SizeBoundConstants cst;
    Mode mode = Mode::adaptive;
    bool x_entry_needs_certificate = false;
    std::unique_ptr<FullSystem> full_sys;
    std::unique_ptr<AdaptiveStepper> full_stepper;
    double h_full = 0.0;
    std::unique_ptr<ZmuSystem> zmu_sys;
    std::unique_ptr<AdaptiveStepper> zmu_stepper;
    double h_zmu = 0.0;
    Eigen::VectorXd z, mu, x; // local scratch
    long z_violations = 0;
    long x_violations = 0;
};

void gather(const ProtocolState& state, const ComponentView& c,
            ComponentRuntime& cr) {
    const int n = c.local_n;
    cr.z.resize(n);
    cr.mu.resize(n);
    cr.x.resize(n);
    for (int k = 0; k < n; ++k) {
        const int m = c.members[static_cast<std::size_t>(k)];
        cr.z(k) = state.z(m);
        cr.mu(k) = state.mu(m);
        cr.x(k) = state.x(m);
    }
}

void scatter(const ComponentRuntime& cr, const ComponentView& c,
             ProtocolState& state) {
    for (int k = 0; k < c.local_n; ++k) {
        const int m = c.members[static_cast<std::size_t>(k)];
        state.z(m) = cr.z(k);
        state.mu(m) = cr.mu(k);
        state.x(m) = cr.x(k);
    }
}

void advance_adaptive_full(ComponentRuntime& cr, double ta, double tb,
                           StepStats& stats) {
    const int n = cr.view.local_n;
    Eigen::VectorXd y(3 * n);
    y.segment(0, n) = cr.z;
    y.segment(n, n) = cr.mu;
    y.segment(2 * n, n) = cr.x;
    cr.full_stepper->advance(y, ta, tb, cr.h_full, stats);
    cr.z = y.segment(0, n);
    cr.mu = y.segment(n, n);
    cr.x = y.segment(2 * n, n);
}

void advance_component(ComponentRuntime& cr, double ta, double tb,
                       RunReport& totals, StepStats& stats) {
    const double dt = tb - ta;
    const int n = cr.view.local_n;
    switch (cr.mode) {
    case Mode::full_affine: {
        const Eigen::VectorXd z0 = cr.z, mu0 = cr.mu, x0 = cr.x;
        cr.sys->propagate_zmu(cr.z, cr.mu, dt);
        cr.sys->propagate_x(cr.x, dt);
        if (cr.sys->u_settled(cr.z) && cr.sys->in_affine_piece(cr.z)) {
            ++totals.affine_segments;
            return;
        }
        cr.z = z0;
        cr.mu = mu0;
        cr.x = x0;
        cr.mode = Mode::adaptive;
        cr.x_entry_needs_certificate = true;
        cr.full_stepper->reset();
        cr.h_full = 0.0;
        ++totals.affine_fallbacks;
        advance_adaptive_full(cr, ta, tb, stats);
        return;
    }
    case Mode::x_affine: {
        const Eigen::VectorXd z0 = cr.z, mu0 = cr.mu, x0 = cr.x;
        cr.sys->propagate_x(cr.x, dt);
        Eigen::VectorXd y(2 * n);
        y.segment(0, n) = cr.z;
        y.segment(n, n) = cr.mu;
        cr.zmu_stepper->advance(y, ta, tb, cr.h_zmu, stats);
        cr.z = y.segment(0, n);
        cr.mu = y.segment(n, n);
        if (cr.sys->u_settled(cr.z)) {
            ++totals.affine_segments;
            return;
        }
        cr.z = z0;
        cr.mu = mu0;
        cr.x = x0;
        cr.mode = Mode::adaptive;
        cr.x_entry_needs_certificate = true;
        cr.full_stepper->reset();
        cr.h_full = 0.0;
        ++totals.affine_fallbacks;
        advance_adaptive_full(cr, ta, tb, stats);
        return;
    }
    case Mode::adaptive:
        advance_adaptive_full(cr, ta, tb, stats);
        return;
    }
}

void update_mode(ComponentRuntime& cr, bool fast_path_enabled) {
    if (!fast_path_enabled) return;
    switch (cr.mode) {
    case Mode::adaptive:
        if (cr.sys->full_affine_admissible(cr.z, cr.mu)) {
            cr.mode = Mode::full_affine;
        } else if (cr.x_entry_needs_certificate
                       ? cr.sys->x_affine_admissible(cr.z, cr.mu)
                       : cr.sys->u_settled(cr.z)) {
            cr.mode = Mode::x_affine;
        }
        break;
    case Mode::x_affine:
        if (cr.sys->full_affine_admissible(cr.z, cr.mu))
            cr.mode = Mode::full_affine;
        break;
    case Mode::full_affine:
        break;
    }
}

} // namespace

ProtocolState initial_state(const Scenario& scenario) {
    const int n = static_cast<int>(scenario.agents.size());
    ProtocolState st = ProtocolState::zeros(n);
    if (scenario.init.mode == InitialState::Mode::seeded_random) {
        std::mt19937_64 rng(scenario.init.seed);
        std::uniform_real_distribution<double> dist(-scenario.init.range,
                                                    scenario.init.range);
        for (int i = 0; i < n; ++i) st.z(i) = dist(rng);
        for (int i = 0; i < n; ++i) st.mu(i) = dist(rng);
        for (int i = 0; i < n; ++i) st.x(i) = dist(rng);
    }
    return st;
}

SimResult integrate(const Scenario& scenario) {
    validate(scenario);

    const int n = static_cast<int>(scenario.agents.size());
    const Params params{scenario.gamma};
    const StepControl ctl{scenario.integrator.rel_tol,
                          scenario.integrator.abs_tol,
                          scenario.integrator.max_step};
    const bool fast_path = scenario.integrator.affine_fast_path;

    ProtocolState state = initial_state(scenario);
    NetworkGraph graph = initial_graph(scenario);

    const double interval = scenario.sample_interval;
    const auto sample_count =
        static_cast<std::size_t>(std::floor(scenario.horizon / interval + 1e-9)) + 1;
    std::vector<double> sample_times(sample_count);
    for (std::size_t k = 0; k < sample_count; ++k)
        sample_times[k] = static_cast<double>(k) * interval;

    SimResult result;
    std::size_t next_sample = 0;
    double t = 0.0;

    const auto near = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    };

    for (std::size_t w = 0; w <= scenario.events.size(); ++w) {
        const bool final_window = w == scenario.events.size();
        const double w_start = t;
        const double w_end =
            final_window ? scenario.horizon : scenario.events[w].time;

        // Per-window component contexts.
        const auto components = connected_components(graph);
        std::vector<ComponentRuntime> runtimes;
        runtimes.reserve(components.size());
        for (const auto& cv : components) {
            ComponentRuntime cr;
            cr.view = cv;
            CompiledGraph local = CompiledGraph::from(graph, cv);
            Eigen::MatrixXd lap = laplacian(graph, cv);
            SpectralData sd = spectral(lap);
            cr.sys = std::make_unique<ComponentSystem>(local, lap, sd,
                                                       scenario.gamma);
            gather(state, cv, cr);
            cr.eq = max_id_equilibrium(cr.sys->graph().ids, cv.a_max,
                                       cr.sys->spectral_data(), scenario.gamma,
                                       cr.z, cr.mu);
            const double w0 = 0.5 * (cr.x - cr.sys->x_star()).squaredNorm();
            cr.cst = size_bound_constants(cr.eq.eta_norm0, cr.sys->x_star(),
                                          cv.a_max, cv.local_n, w0,
                                          cr.eq.settle_bound);
            cr.full_sys = std::make_unique<FullSystem>(cr.sys->graph(), params);
            cr.full_stepper = std::make_unique<AdaptiveStepper>(*cr.full_sys, ctl);
            cr.zmu_sys = std::make_unique<ZmuSystem>(cr.sys->graph(), params);
            cr.zmu_stepper = std::make_unique<AdaptiveStepper>(*cr.zmu_sys, ctl);
            update_mode(cr, fast_path);
            runtimes.push_back(std::move(cr));
        }

        WindowReport wr;
        wr.t_start = w_start;
        wr.t_end = w_end;
        wr.mu_sum_start = state.mu.sum();

        StepStats stats;

        std::vector<int> component_of(static_cast<std::size_t>(n), -1);
        for (std::size_t ci = 0; ci < components.size(); ++ci)
            for (int m : components[ci].members)
                component_of[static_cast<std::size_t>(m)] = static_cast<int>(ci);

        const auto emit_sample = [&]() {
            TrajectorySample smp;
            smp.t = t;
            smp.agents.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                auto& a = smp.agents[static_cast<std::size_t>(i)];
                a.z = state.z(i);
                a.mu = state.mu(i);
                a.x = state.x(i);
                a.u = round_nearest(a.z);
                a.x_rounded = round_nearest(a.x);
                a.component_id = component_of[static_cast<std::size_t>(i)];
            }
            result.samples.push_back(std::move(smp));

            wr.mu_drift =
                std::max(wr.mu_drift, std::abs(state.mu.sum() - wr.mu_sum_start));

            // Envelope monitoring relative to the window start.
            const double dt = t - w_start;
            for (auto& cr : runtimes) {
                const double env_z =
                    max_id_envelope(dt, cr.eq.eta_norm0, cr.eq.rate) *
                        (1.0 + 1e-9) + 1e-9;
                for (int m : cr.view.members)
                    if (std::abs(state.z(m) - cr.eq.z_star) > env_z)
                        ++cr.z_violations;
                if (std::isfinite(cr.cst.c)) {
                    const double env_x =
                        size_envelope(dt, cr.cst.c, cr.view.local_n) *
                            (1.0 + 1e-9) + 1e-9;
                    for (int m : cr.view.members)
                        if (std::abs(state.x(m) -
                                     static_cast<double>(cr.view.local_n)) > env_x)
                            ++cr.x_violations;
                }
            }
        };

        // Sample exactly at the window start (always at t=0; at later
        // windows when the event time lies on the sample grid).
        while (next_sample < sample_times.size() &&
               near(sample_times[next_sample], w_start)) {
            emit_sample();
            ++next_sample;
        }

        while (t < w_end - 1e-9 * std::max(1.0, w_end)) {
            double tb = w_end;
            bool is_sample = false;
            if (next_sample < sample_times.size()) {
                const double ts = sample_times[next_sample];
                if (ts < w_end - 1e-9 * std::max(1.0, w_end) ||
                    (final_window && near(ts, w_end))) {
                    if (ts < tb || near(ts, w_end)) {
                        tb = std::min(ts, w_end);
                        is_sample = true;
                    }
                }
            }

            for (auto& cr : runtimes) {
                advance_component(cr, t, tb, result.report, stats);
                scatter(cr, cr.view, state);
            }
            t = tb;

            if (is_sample) {
                emit_sample();
                ++next_sample;
            }
            for (auto& cr : runtimes) update_mode(cr, fast_path);
        }

        // Settling detection over this window's samples.
        const double detect_end = final_window ? w_end + interval : w_end;
        for (std::size_t ci = 0; ci < runtimes.size(); ++ci) {
            auto& cr = runtimes[ci];
            const auto st = detect_settling(result.samples, w_start, detect_end,
                                            cr.view, cr.view.a_max,
                                            cr.view.local_n);
            ComponentWindowReport rep;
            rep.component_id = static_cast<int>(ci);
            rep.members = cr.view.members;
            rep.local_n = cr.view.local_n;
            rep.a_max = cr.view.a_max;
            rep.leader_ordinal = cr.view.leader_ordinal;
            rep.lambda2 = cr.sys->spectral_data().lambda2;
            rep.z_star = cr.eq.z_star;
            rep.eta_norm0 = cr.eq.eta_norm0;
            rep.rate = cr.eq.rate;
            rep.u_settle_bound = cr.eq.settle_bound;
            rep.lambda_min_jl = cr.sys->lambda_min_jl();
            rep.log_c = cr.cst.log_c;
            rep.c = cr.cst.c;
            rep.x_settle_bound = cr.cst.settle_bound;
            rep.u_settle = st.u_settle;
            rep.x_settle = st.x_settle;
            rep.z_envelope_violations = cr.z_violations;
            rep.x_envelope_violations = cr.x_violations;
            rep.x_envelope_checked = std::isfinite(cr.cst.c);
            wr.components.push_back(std::move(rep));
        }

        result.report.accepted_steps += stats.accepted;
        result.report.rejected_steps += stats.rejected;
        result.report.windows.push_back(std::move(wr));

        if (!final_window) {
            graph = apply_event(graph, scenario, scenario.events[w]);
            t = w_end;
        } else {
            t = w_end;
        }

        log::info("netsize: window %zu done at t=%.6g (steps: %llu accepted, %llu rejected)\n",
                  w, t,
                  static_cast<unsigned long long>(stats.accepted),
                  static_cast<unsigned long long>(stats.rejected));
    }

    return result;
}

} // namespace netsize
