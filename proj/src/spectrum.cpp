#include "ptinv/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "ptinv/errors.hpp"
#include "ptinv/quadrature.hpp"

namespace ptinv {
namespace {

constexpr int kMaxExpansions = 80;

// Value at 0 of the right-boundary solution, scaled to the unit circle.
double shot_residual(const Mesh& mesh, double lambda) {
    const State s = shoot_backward(mesh, lambda, 0).at_start;
    return s.y / std::hypot(s.y, s.dy);
}

double polish(const Mesh& mesh, double lo, double hi) {
    const double scale = std::max(1.0, std::fabs(0.5 * (lo + hi)));
    double pad = std::max(hi - lo, 1e-9 * scale);
    for (int i = 0; i < 12; ++i, pad *= 4.0) {
        const double a = lo - pad, b = hi + pad;
        const double fa = shot_residual(mesh, a), fb = shot_residual(mesh, b);
        if (fa == 0.0) return a;
        if (fb == 0.0) return b;
        if ((fa < 0.0) == (fb < 0.0)) continue;
        boost::uintmax_t iters = 200;
        const auto [r0, r1] = boost::math::tools::toms748_solve(
            [&](double l) { return shot_residual(mesh, l); }, a, b, fa, fb,
            boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1), iters);
        return 0.5 * (r0 + r1);
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double eigen_on_mesh(const Mesh& mesh, int n, double lambda_floor, std::optional<double> ceiling, double tol) {
    if (n < 1) throw ConfigError("eigenvalue index must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("eigenvalue tolerance must be positive");
    const double target = n * std::numbers::pi;
    const auto theta = [&](double l) { return prufer_theta(mesh, l); };

    double lo = lambda_floor;
    double step = 1.0;
    for (int i = 0; theta(lo) >= target; ++i, step *= 2.0) {
        if (i == kMaxExpansions) throw BracketFailure("could not place the eigenvalue search floor below the eigenvalue");
        lo -= step;
    }

    double hi;
    if (ceiling) {
        hi = *ceiling;
        if (theta(hi) <= target)
            throw NoEigenvalueBelowFloor(fmt::format(
                "no eigenvalue of index {} below the ceiling {} on [0, {}] (theta_end = {:.6f}, needed > {:.6f})", n, hi,
                mesh.hi(), theta(hi), target));
        if (hi <= lo) throw BracketFailure(fmt::format("search floor {} is not below the ceiling {}", lo, hi));
    } else {
        step = 1.0;
        hi = lo + step;
        for (int i = 0; theta(hi) <= target; ++i) {
            if (i == kMaxExpansions)
                throw NoEigenvalueBelowFloor(fmt::format("no eigenvalue of index {} found on [0, {}]", n, mesh.hi()));
            lo = hi;
            step *= 2.0;
            hi = lo + step;
        }
    }

    while (hi - lo > tol * std::max(1.0, std::fabs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (theta(mid) > target ? hi : lo) = mid;
    }
    return polish(mesh, lo, hi);
}

double eigen_truncated(const Potential& q, double b, int n, double h, double lambda_floor,
                       std::optional<double> ceiling, double tol) {
    if (!(b > 0.0)) throw ConfigError("truncation radius must be positive");
    return eigen_on_mesh(Mesh(q, 0.0, b, h), n, lambda_floor, ceiling, tol);
}

SolutionTrace eigenfunction_on_mesh(const Mesh& mesh, double lambda) {
    SolutionTrace tr =
        trace_on_mesh(mesh, lambda, 0, mesh.intervals(), Direction::Backward, State{0.0, -1.0}, true);
    double norm = std::sqrt(simpson_squared(tr.ys, mesh.step()));
    const auto peak = std::max_element(tr.ys.begin(), tr.ys.end(),
                                       [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    if (*peak < 0.0) norm = -norm;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        tr.ys[i] /= norm;
        tr.dys[i] /= norm;
    }
    tr.y0 = tr.ys.back();
    tr.dy0 = tr.dys.back();
    return tr;
}

double default_lambda_floor(const HypothesisClass& hc, double b) {
    // Dirichlet eigenvalues lie above min q; the extra margin only has to
    // keep the bracket strictly below.
    const double pb = std::numbers::pi / b;
    return hc.floor_q0 - std::max(1.0, pb * pb);
}

std::optional<double> eigen_ceiling(const HypothesisClass& hc, double eig_tol) {
    if (hc.variant == Hypothesis::H1_BoundedBelow) return hc.tail_floor - eig_tol;
    return std::nullopt;
}

EigenResult first_eigenvalue(const Potential& q, const SolverConfig& cfg) {
    cfg.validate();
    EigenResult out;
    out.hypothesis = classify(q, cfg);
    if (!out.hypothesis.is_h1())
        throw UnsupportedPotential(fmt::format("potential '{}' is outside the supported regime: {}", q.description(),
                                               out.hypothesis.tag));
    const double floor =
        cfg.has_auto_lambda_floor() ? default_lambda_floor(out.hypothesis, cfg.b) : cfg.lambda_floor;
    const auto ceiling = eigen_ceiling(out.hypothesis, cfg.eig_tol);

    double b = cfg.b;
    double prev = eigen_on_mesh(Mesh(q, 0.0, b, cfg.h), 1, floor, ceiling, cfg.eig_tol * 1e-2);
    out.iterations = 1;
    while (true) {
        const double next_b = b * cfg.b_growth;
        if (next_b > cfg.b_max * (1.0 + 1e-12))
            throw NonConvergentTruncation(fmt::format(
                "first eigenvalue did not settle before b_max = {} (last change {} at b = {})", cfg.b_max, out.delta, b));
        const Mesh mesh(q, 0.0, next_b, cfg.h);
        const double cur = eigen_on_mesh(mesh, 1, floor, ceiling, cfg.eig_tol * 1e-2);
        ++out.iterations;
        out.delta = std::fabs(cur - prev);
        b = next_b;
        if (out.delta < cfg.eig_tol) {
            out.lambda_1 = cur;
            out.b_used = b;
            out.converged = true;
            out.eigenfunction = eigenfunction_on_mesh(mesh, cur);
            return out;
        }
        prev = cur;
    }
}

double essential_floor(const Potential& q, const SolverConfig& cfg) {
    const HypothesisClass hc = classify(q, cfg);
    if (!hc.is_h1())
        throw UnsupportedPotential(fmt::format("no essential floor: {}", hc.tag));
    return hc.floor_q0;
}

}  // namespace ptinv
