#include "ptinv/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ptinv/errors.hpp"

namespace ptinv {
namespace {

constexpr double kOverflow = 1e300;
constexpr double kRescaleAbove = 1e150;
constexpr int kRescaleExponent = -500;

}  // namespace

double SolutionTrace::value_at(double x) const {
    if (xs.empty()) throw ConfigError("empty trace");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double s = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + s * (ys[i + 1] - ys[i]);
}

SolutionTrace trace_on_mesh(const Mesh& mesh, double lambda, std::size_t k_from, std::size_t k_to,
                            Direction direction, State init, bool renormalize) {
    if (k_to <= k_from) throw ConfigError("trace needs at least two nodes");
    const std::size_t count = k_to - k_from + 1;
    SolutionTrace tr;
    tr.lambda = lambda;
    tr.direction = direction;
    tr.xs.resize(count);
    tr.ys.resize(count);
    tr.dys.resize(count);
    for (std::size_t i = 0; i < count; ++i) tr.xs[i] = mesh.node(k_from + i);

    const auto store = [&](std::size_t k, State s) {
        tr.ys[k - k_from] = s.y;
        tr.dys[k - k_from] = s.dy;
    };
    const auto guard = [&](std::size_t k, std::size_t filled_lo, std::size_t filled_hi, State& s) {
        const double mag = std::fabs(s.y) + std::fabs(s.dy);
        if (renormalize && mag > kRescaleAbove) {
            s = {std::ldexp(s.y, kRescaleExponent), std::ldexp(s.dy, kRescaleExponent)};
            for (std::size_t j = filled_lo; j <= filled_hi; ++j) {
                tr.ys[j - k_from] = std::ldexp(tr.ys[j - k_from], kRescaleExponent);
                tr.dys[j - k_from] = std::ldexp(tr.dys[j - k_from], kRescaleExponent);
            }
        } else if (!std::isfinite(mag) || mag > kOverflow) {
            throw NumericalOverflow(
                fmt::format("solution overflowed near x = {} (lambda = {}); last finite point x = {}. "
                            "Restart with a renormalized integration or a smaller interval",
                            mesh.node(k), lambda, mesh.node(direction == Direction::Forward ? k - 1 : k + 1)),
                mesh.node(direction == Direction::Forward ? k - 1 : k + 1));
        }
    };

    State s = init;
    if (direction == Direction::Forward) {
        tr.x0 = mesh.node(k_from);
        store(k_from, s);
        for (std::size_t k = k_from; k < k_to; ++k) {
            s = rk4_forward(mesh, k, lambda, s);
            guard(k + 1, k_from, k, s);
            store(k + 1, s);
        }
    } else {
        tr.x0 = mesh.node(k_to);
        store(k_to, s);
        for (std::size_t k = k_to; k-- > k_from;) {
            s = rk4_backward(mesh, k, lambda, s);
            guard(k, k + 1, k_to, s);
            store(k, s);
        }
    }
    // Record the initial data as integrated (after any rescaling).
    const std::size_t start = direction == Direction::Forward ? 0 : count - 1;
    tr.y0 = tr.ys[start];
    tr.dy0 = tr.dys[start];
    return tr;
}

SolutionTrace propagate(const Potential& q, double lambda, double x0, double x1, double y0, double dy0, double h) {
    if (x0 == x1) throw ConfigError("propagate needs x0 != x1");
    if (!(h > 0.0)) throw ConfigError("propagate needs h > 0");
    const bool forward = x1 > x0;
    const Mesh mesh(q, std::min(x0, x1), std::max(x0, x1), h);
    SolutionTrace tr = trace_on_mesh(mesh, lambda, 0, mesh.intervals(), forward ? Direction::Forward : Direction::Backward,
                                     State{y0, dy0}, false);
    tr.x0 = x0;
    return tr;
}

int zeros_from_theta(double theta_end) {
    if (theta_end <= 0.0) return 0;
    // Zeros are crossings of k*pi; one landing on the endpoint is excluded.
    const double turns = theta_end / std::numbers::pi;
    return static_cast<int>(std::ceil(turns - 1e-9)) - 1;
}

PruferSummary prufer_count(const Potential& q, double lambda, double b, double h) {
    if (!(b > 0.0)) throw ConfigError("prufer_count needs b > 0");
    const Mesh mesh(q, 0.0, b, h);
    PruferSummary out;
    out.theta_end = prufer_theta(mesh, lambda);
    out.zero_count = zeros_from_theta(out.theta_end);
    return out;
}

WronskianResult wronskian(const SolutionTrace& a, const SolutionTrace& b) {
    std::size_t i = 0, j = 0;
    bool first = true;
    WronskianResult out;
    while (i < a.size() && j < b.size()) {
        const double xa = a.xs[i], xb = b.xs[j];
        const double tol = 1e-9 * std::max(1.0, std::max(std::fabs(xa), std::fabs(xb)));
        if (std::fabs(xa - xb) <= tol) {
            const double w = a.ys[i] * b.dys[j] - b.ys[j] * a.dys[i];
            if (first) {
                out.value = w;
                first = false;
            } else {
                out.max_drift = std::max(out.max_drift, std::fabs(w - out.value));
            }
            ++i;
            ++j;
        } else if (xa < xb) {
            ++i;
        } else {
            ++j;
        }
    }
    if (first) throw ConfigError("wronskian: traces share no grid points");
    return out;
}

int count_sign_changes(const SolutionTrace& trace) {
    int changes = 0;
    int last_sign = 0;
    // Skip the endpoints, where Dirichlet data vanish.
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        const double y = trace.ys[i];
        const int sign = y > 0 ? 1 : (y < 0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++changes;
        last_sign = sign;
    }
    return changes;
}

}  // namespace ptinv
