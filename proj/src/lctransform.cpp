#include "ptinv/lctransform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ptinv/errors.hpp"
#include "ptinv/mesh.hpp"

namespace ptinv {

double WeightedProblem::P(double x) const {
    const double v = g(x);
    return v * v;
}

double WeightedProblem::W(double x) const { return P(x); }

double WeightedProblem::Q(double x) const {
    const double v = g(x);
    return v * (-g.second(x) + q(x) * v);
}

WeightedProblem transform(const Potential& q, const Potential& g, const SolverConfig& cfg, double beta) {
    if (!g.has_second_derivative())
        throw ConfigError("g has no second derivative (linear knot table); use a cubic or spline table");
    if (!(beta > 0.0 && beta <= std::numbers::pi)) throw ConfigError("beta must lie in (0, pi]");
    const std::size_t n = interval_count(cfg.b, cfg.h);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = cfg.b * static_cast<double>(i) / static_cast<double>(n);
        const double v = g(x);
        if (!(v > 0.0)) throw ConfigError(fmt::format("g must be positive on [0, b]; g({}) = {}", x, v));
    }
    return WeightedProblem{q, g, beta};
}

namespace {

// P, W, Q at the start, midpoint and end of every interval.
struct Table {
    double step;
    std::vector<std::array<double, 3>> P, W, Q;
};

Table tabulate(const WeightedProblem& wp, double b, double h) {
    if (!(b > 0.0) || !(h > 0.0)) throw ConfigError("weighted problem needs b > 0 and h > 0");
    const std::size_t n = interval_count(b, h);
    Table t;
    t.step = b / static_cast<double>(n);
    t.P.resize(n);
    t.W.resize(n);
    t.Q.resize(n);
    const double nudge = 64.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t k = 0; k < n; ++k) {
        const double a = t.step * static_cast<double>(k), c = k + 1 == n ? b : a + t.step;
        const std::array<double, 3> xs{a + nudge * std::max(1.0, a), 0.5 * (a + c), c - nudge * std::max(1.0, c)};
        for (int j = 0; j < 3; ++j) {
            t.P[k][j] = wp.P(xs[j]);
            t.W[k][j] = wp.W(xs[j]);
            t.Q[k][j] = wp.Q(xs[j]);
            if (!(t.P[k][j] > 0.0) || !std::isfinite(t.Q[k][j]))
                throw ConfigError(fmt::format("weighted coefficients invalid near x = {}", xs[j]));
        }
    }
    return t;
}

double theta_end(const Table& t, double lambda) {
    const double h = t.step;
    const auto rhs = [lambda](double th, double p, double w, double q) {
        const double c = std::cos(th), s = std::sin(th);
        return c * c / p + (lambda * w - q) * s * s;
    };
    double th = 0.0;
    for (std::size_t k = 0; k < t.P.size(); ++k) {
        const auto &P = t.P[k], &W = t.W[k], &Q = t.Q[k];
        const double k1 = rhs(th, P[0], W[0], Q[0]);
        const double k2 = rhs(th + 0.5 * h * k1, P[1], W[1], Q[1]);
        const double k3 = rhs(th + 0.5 * h * k2, P[1], W[1], Q[1]);
        const double k4 = rhs(th + h * k3, P[2], W[2], Q[2]);
        th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return th;
}

// End angle of the n-th eigenfunction for the boundary angle beta.
double target_angle(double beta, int n) {
    double a = std::fmod(std::numbers::pi / 2.0 - beta, std::numbers::pi);
    if (a <= 1e-15) a += std::numbers::pi;
    return (n - 1) * std::numbers::pi + a;
}

}  // namespace

double weighted_theta(const WeightedProblem& wp, double lambda, double b, double h) {
    return theta_end(tabulate(wp, b, h), lambda);
}

double weighted_eigen(const WeightedProblem& wp, double b, double h, int n, double tol) {
    if (n < 1) throw ConfigError("eigenvalue index must be >= 1");
    const Table table = tabulate(wp, b, h);
    const double target = target_angle(wp.beta, n);
    double lo = -1.0, hi = 1.0, step = 1.0;
    for (int i = 0; theta_end(table, lo) >= target; ++i, step *= 2.0) {
        if (i == 80) throw BracketFailure("weighted eigenvalue search floor could not be placed");
        lo -= step;
    }
    step = 1.0;
    for (int i = 0; theta_end(table, hi) <= target; ++i, step *= 2.0) {
        if (i == 80) throw NoEigenvalueBelowFloor(fmt::format("no weighted eigenvalue of index {} found", n));
        hi += step;
    }
    while (hi - lo > tol * std::max(1.0, std::fabs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (theta_end(table, mid) > target ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

WeightedTrace propagate_weighted(const WeightedProblem& wp, double lambda, double b, double h, double z0,
                                 double pdz0) {
    const Table t = tabulate(wp, b, h);
    const double s = t.step;
    WeightedTrace out;
    const std::size_t n = t.P.size();
    out.xs.resize(n + 1);
    out.zs.resize(n + 1);
    out.pdzs.resize(n + 1);
    double z = z0, v = pdz0;
    out.xs[0] = 0.0;
    out.zs[0] = z;
    out.pdzs[0] = v;
    for (std::size_t k = 0; k < n; ++k) {
        const auto &P = t.P[k], &W = t.W[k], &Q = t.Q[k];
        const auto f = [&](int j, double zz, double vv) {
            return std::array<double, 2>{vv / P[j], (Q[j] - lambda * W[j]) * zz};
        };
        const auto k1 = f(0, z, v);
        const auto k2 = f(1, z + 0.5 * s * k1[0], v + 0.5 * s * k1[1]);
        const auto k3 = f(1, z + 0.5 * s * k2[0], v + 0.5 * s * k2[1]);
        const auto k4 = f(2, z + s * k3[0], v + s * k3[1]);
        z += s / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        v += s / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        if (!std::isfinite(z) || !std::isfinite(v) || std::fabs(z) > 1e300)
            throw NumericalOverflow(fmt::format("weighted solution overflowed near x = {}", s * (k + 1)), s * k);
        out.xs[k + 1] = k + 1 == n ? b : s * static_cast<double>(k + 1);
        out.zs[k + 1] = z;
        out.pdzs[k + 1] = v;
    }
    return out;
}

void write_coefficients_csv(std::ostream& os, const WeightedProblem& wp, double b, double h) {
    const std::size_t n = interval_count(b, h);
    os << "x,P,Q,W\n";
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = b * static_cast<double>(i) / static_cast<double>(n);
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", x, wp.P(x), wp.Q(x), wp.W(x));
    }
}

}  // namespace ptinv
