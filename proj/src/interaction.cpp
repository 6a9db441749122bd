#include "ptinv/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "ptinv/errors.hpp"
#include "ptinv/quadrature.hpp"
#include "ptinv/weyl.hpp"

namespace ptinv {
namespace {

constexpr int kMaxWidenings = 80;

struct Shot {
    double phi_t;   // phi(t), phi(0) = 0, phi'(0) = 1
    double w_t;     // right-boundary solution at t
    State w_start;  // right-boundary solution at 0, same scale as w_t
};

Shot shoot(const Mesh& mesh, double lambda, std::size_t k_t) {
    const BackwardShot back = shoot_backward(mesh, lambda, k_t);
    return {shoot_forward(mesh, lambda, 0, State{0.0, 1.0}, k_t).y, back.at_record.y, back.at_start};
}

std::size_t snap(const Mesh& mesh, double t) {
    if (!(t >= 0.0) || !(t < mesh.hi()))
        throw ConfigError(fmt::format("interaction point t = {} must lie in [0, b) with b = {}", t, mesh.hi()));
    const std::size_t k = mesh.nearest_node(t);
    if (k >= mesh.intervals())
        throw ConfigError(fmt::format("interaction point t = {} snaps onto the truncation point b = {}", t, mesh.hi()));
    return k;
}

double residual_from(const Shot& s, double r) {
    if (std::fabs(s.w_start.dy) < 1e-12 * std::hypot(s.w_start.y, s.w_start.dy))
        throw PoleAtLambda("m_b vanishes here; the matching residual has a pole", 0.0);
    return (r * s.phi_t * s.w_t - s.w_start.y) / s.w_start.dy;
}

// phi(t) Psi(t) and 1/m_b on one shot.
double phi_psi(const Shot& s) { return s.phi_t * s.w_t / s.w_start.dy; }
double inv_m(const Shot& s) { return s.w_start.y / s.w_start.dy; }

}  // namespace

double matching_residual(const Mesh& mesh, double t, double r, double lambda) {
    const std::size_t k = snap(mesh, t);
    try {
        return residual_from(shoot(mesh, lambda, k), r);
    } catch (const PoleAtLambda&) {
        throw PoleAtLambda(fmt::format("m_b vanishes at lambda = {}; matching residual undefined", lambda), lambda);
    }
}

double matching_residual(const Potential& q, double t, double r, double lambda, double b, double h) {
    return matching_residual(Mesh(q, 0.0, b, h), t, r, lambda);
}

PerturbationSolver::PerturbationSolver(Potential q, SolverConfig cfg) : q_(std::move(q)), cfg_(std::move(cfg)) {
    base_ = first_eigenvalue(q_, cfg_);
    const HypothesisClass& hc = base_.hypothesis;
    r_cap_ = cfg_.has_auto_r_cap() ? 0.2 * (base_.lambda_1 - hc.floor_q0) : cfg_.r_cap;
    for (double y : base_.eigenfunction.ys) phi_max_sq_ = std::max(phi_max_sq_, y * y);
    search_floor_ = cfg_.has_auto_lambda_floor() ? hc.floor_q0 - 1.0 : cfg_.lambda_floor;

    const double b_lo = base_.b_used / cfg_.b_growth;
    const double floor = cfg_.has_auto_lambda_floor() ? default_lambda_floor(hc, b_lo) : cfg_.lambda_floor;
    Mesh lo_mesh(q_, 0.0, b_lo, cfg_.h);
    const double lambda_lo = eigen_on_mesh(lo_mesh, 1, floor, eigen_ceiling(hc, cfg_.eig_tol), cfg_.eig_tol * 1e-2);
    levels_.push_back(std::make_shared<const Level>(Level{std::move(lo_mesh), lambda_lo}));
    levels_.push_back(std::make_shared<const Level>(Level{Mesh(q_, 0.0, base_.b_used, cfg_.h), base_.lambda_1}));
}

PerturbationSolver::Root PerturbationSolver::root_on(const Level& level, double t, double r) const {
    const Mesh& mesh = level.mesh;
    const std::size_t k = snap(mesh, t);
    const auto g = [&](double lambda) {
        const Shot s = shoot(mesh, lambda, k);
        return (r * s.phi_t * s.w_t - s.w_start.y) / std::hypot(s.w_start.y, s.w_start.dy);
    };
    // Below the delta well alone, -r^2/4 under min q, nothing can be bound.
    const double floor = cfg_.has_auto_lambda_floor() ? search_floor_ - 0.25 * r * r : search_floor_;

    double hi = level.lambda_1;
    double g_hi = g(hi);
    if (!(g_hi > 0.0))
        throw BracketFailure(fmt::format(
            "matching function is not positive at lambda_1 = {} for (t, r) = ({}, {}); t may sit too far in the tail",
            hi, t, r));
    double width = std::max(5.0 * r * phi_max_sq_, 1e-12 * std::max(1.0, std::fabs(hi)));
    double lo = hi, g_lo = g_hi;
    for (int i = 0;; ++i, width *= 2.0) {
        lo = std::max(level.lambda_1 - width, floor);
        g_lo = g(lo);
        if (g_lo < 0.0) break;
        if (g_lo == 0.0) return {lo, k};
        if (lo <= floor) {
            const std::string msg = fmt::format(
                "no sign change of the matching function above the floor {} for (t, r) = ({}, {})", floor, t, r);
            if (cfg_.has_auto_lambda_floor()) throw BracketFailure(msg + "; r is likely beyond the small-coupling regime");
            throw NoEigenvalueBelowFloor(msg + "; the perturbed eigenvalue lies below lambda_floor");
        }
        if (i == kMaxWidenings) throw BracketFailure(fmt::format("bracket widening exhausted for (t, r) = ({}, {})", t, r));
        hi = lo;
        g_hi = g_lo;
    }
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        g, lo, hi, g_lo, g_hi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1), iters);
    return {0.5 * (a + b), k};
}

PerturbedEigen PerturbationSolver::assemble(const Level& level, const Root& root, double r) const {
    const Mesh& mesh = level.mesh;
    const std::size_t k = root.k_t, n = mesh.intervals();
    const double lambda = root.lambda;

    PerturbedEigen out;
    out.t = mesh.node(k);
    out.r = r;
    out.lambda_tr = lambda;
    out.b_used = mesh.hi();

    const SolutionTrace right = trace_on_mesh(mesh, lambda, k, n, Direction::Backward, State{0.0, -1.0}, true);
    if (k == 0) {
        out.phi0 = eigenfunction_on_mesh(mesh, lambda);
        out.dphi_left = out.dphi_right = out.phi0.dys.front();
        out.zero_count = count_sign_changes(out.phi0);
        return out;
    }
    const SolutionTrace left = trace_on_mesh(mesh, lambda, 0, k, Direction::Forward, State{0.0, 1.0}, false);
    const double phi_t = left.ys.back();
    const double c = phi_t / right.ys.front();

    const Shot s = shoot(mesh, lambda, k);
    out.c_factor = phi_t * s.w_start.dy / s.w_t;
    out.residual = residual_from(s, r);

    const double norm =
        std::sqrt(simpson_squared(left.ys, mesh.step()) + c * c * simpson_squared(right.ys, mesh.step()));
    SolutionTrace& tr = out.phi0;
    tr.lambda = lambda;
    tr.direction = Direction::Forward;
    tr.xs.resize(n + 1);
    tr.ys.resize(n + 1);
    tr.dys.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        tr.xs[i] = mesh.node(i);
        if (i <= k) {
            tr.ys[i] = left.ys[i] / norm;
            tr.dys[i] = left.dys[i] / norm;
        } else {
            tr.ys[i] = c * right.ys[i - k] / norm;
            tr.dys[i] = c * right.dys[i - k] / norm;
        }
    }
    tr.x0 = 0.0;
    tr.y0 = 0.0;
    tr.dy0 = 1.0 / norm;
    out.dphi_left = left.dys.back() / norm;
    out.dphi_right = c * right.dys.front() / norm;
    out.jump_residual = out.dphi_left - out.dphi_right - r * phi_t / norm;
    out.zero_count = count_sign_changes(tr);
    return out;
}

PerturbedEigen PerturbationSolver::solve(double t, double r) const {
    if (!(r >= 0.0)) throw ConfigError(fmt::format("coupling r = {} must be nonnegative", r));
    if (r > r_cap_ * (1.0 + 1e-12))
        throw BracketFailure(fmt::format("coupling r = {} exceeds r_cap = {} (t = {}); the first-branch continuation is "
                                         "only trusted for small couplings",
                                         r, r_cap_, t));
    const Level& top = *levels_.back();
    const std::size_t k = snap(top.mesh, t);
    if (r == 0.0 || k == 0) return assemble(top, Root{top.lambda_1, k}, r);

    const Root fine = root_on(top, t, r);
    const Root coarse = root_on(*levels_.front(), t, r);
    double change = std::fabs(fine.lambda - coarse.lambda);
    if (change < cfg_.eig_tol) return assemble(top, fine, r);

    // The perturbed problem needs a longer interval than the unperturbed one.
    const HypothesisClass& hc = base_.hypothesis;
    Root prev = fine;
    for (double b = top.mesh.hi() * cfg_.b_growth; b <= cfg_.b_max * (1.0 + 1e-12); b *= cfg_.b_growth) {
        const double floor = cfg_.has_auto_lambda_floor() ? default_lambda_floor(hc, b) : cfg_.lambda_floor;
        Mesh mesh(q_, 0.0, b, cfg_.h);
        const double l1 = eigen_on_mesh(mesh, 1, floor, eigen_ceiling(hc, cfg_.eig_tol), cfg_.eig_tol * 1e-2);
        const Level level{std::move(mesh), l1};
        const Root cur = root_on(level, t, r);
        change = std::fabs(cur.lambda - prev.lambda);
        if (change < cfg_.eig_tol) return assemble(level, cur, r);
        prev = cur;
    }
    throw NonConvergentTruncation(
        fmt::format("lambda(t, r) at (t, r) = ({}, {}) did not settle before b_max = {} (last change {})", t, r,
                    cfg_.b_max, change));
}

double PerturbationSolver::eigenvalue(double t, double r) const { return solve(t, r).lambda_tr; }

double PerturbationSolver::dlambda_dr(double t, double r) const {
    const double lambda = eigenvalue(t, r);
    const Mesh& m = mesh();
    const std::size_t k = snap(m, t);
    const double dl = default_dl(cfg_.eig_tol);
    const Shot s0 = shoot(m, lambda, k), sp = shoot(m, lambda + dl, k), sm = shoot(m, lambda - dl, k);
    const double u = (inv_m(sp) - inv_m(sm)) / (2.0 * dl);
    const double dpp = (phi_psi(sp) - phi_psi(sm)) / (2.0 * dl);
    const double den = u - r * dpp;
    if (!std::isfinite(den) || std::fabs(den) <= 1e-12 * (std::fabs(u) + std::fabs(r * dpp)))
        throw Error(fmt::format("derivative formula breaks down at (t, r) = ({}, {}): r |d(phi Psi)/d lambda| = {} "
                                "is not below |u| = {}; r is too large for the implicit-function step",
                                t, r, std::fabs(r * dpp), std::fabs(u)));
    return phi_psi(s0) / den;
}

PerturbedEigen lambda_tr(const Potential& q, double t, double r, const SolverConfig& cfg) {
    return PerturbationSolver(q, cfg).solve(t, r);
}

double dlambda_dr_formula(const Potential& q, double t, double r, const SolverConfig& cfg) {
    return PerturbationSolver(q, cfg).dlambda_dr(t, r);
}

double oracle_fd(const Potential& q, double t, double r, double b, double h) {
    if (!(b > 0.0) || !(h > 0.0)) throw ConfigError("oracle_fd needs b > 0 and h > 0");
    const Mesh mesh(q, 0.0, b, h);
    const std::size_t n = mesh.intervals();
    if (n < 3) throw ConfigError("oracle_fd needs at least two interior nodes");
    const double step = mesh.step();
    const double off = -1.0 / (step * step);

    std::vector<double> diag(n - 1);
    for (std::size_t i = 1; i < n; ++i) diag[i - 1] = 2.0 / (step * step) + mesh.q_node(i);
    const std::size_t k = mesh.nearest_node(t);
    if (k >= 1 && k < n) diag[k - 1] -= r / step;

    // Number of eigenvalues below x, from the pivots of T - x I = L D L^T.
    const auto count_below = [&](double x) {
        std::size_t count = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            d = diag[i] - x - (i == 0 ? 0.0 : off * off / d);
            if (d == 0.0) d = -std::numeric_limits<double>::min();
            if (d < 0.0) ++count;
        }
        return count;
    };

    double lo = *std::min_element(diag.begin(), diag.end()) - 2.0 * std::fabs(off);
    double hi = *std::min_element(diag.begin(), diag.end());
    for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (count_below(mid) >= 1 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ptinv
