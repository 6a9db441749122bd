#include "ptinv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ptinv/errors.hpp"

namespace ptinv {
namespace {

constexpr double kRescaleAbove = 1e150;
constexpr int kRescaleExponent = -500;

double nudge(double x) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x)); }

}  // namespace

std::size_t interval_count(double span, double h) {
    const double ratio = std::fabs(span) / h;
    const double rounded = std::round(ratio);
    const double n = std::fabs(ratio - rounded) <= 1e-6 * std::max(1.0, ratio) ? rounded : std::ceil(ratio);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

Mesh::Mesh(const Potential& q, double lo, double hi, double h) : lo_(lo), hi_(hi) {
    if (!(hi > lo)) throw ConfigError(fmt::format("mesh needs lo < hi, got [{}, {}]", lo, hi));
    if (!(h > 0.0)) throw ConfigError("mesh step must be positive");
    const std::size_t n = interval_count(hi - lo, h);
    step_ = (hi - lo) / static_cast<double>(n);
    q_start_.resize(n);
    q_mid_.resize(n);
    q_end_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = node(k), c = node(k + 1);
        q_start_[k] = q(a + nudge(a));
        q_mid_[k] = q(0.5 * (a + c));
        q_end_[k] = q(c - nudge(c));
        if (!std::isfinite(q_start_[k]) || !std::isfinite(q_mid_[k]) || !std::isfinite(q_end_[k]))
            throw ConfigError(fmt::format("potential is not finite near x = {}", a));
    }
}

std::size_t Mesh::nearest_node(double x) const {
    const double k = std::round((x - lo_) / step_);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(intervals())));
}

double Mesh::q_node(std::size_t k) const noexcept {
    if (k == 0) return q_start_[0];
    if (k == intervals()) return q_end_[k - 1];
    return 0.5 * (q_end_[k - 1] + q_start_[k]);
}

namespace {

inline State rk4(double s, double a0, double am, double a1, State st) noexcept {
    const double hs = 0.5 * s;
    const double k1y = st.dy, k1p = a0 * st.y;
    const double y2 = st.y + hs * k1y, p2 = st.dy + hs * k1p;
    const double k2y = p2, k2p = am * y2;
    const double y3 = st.y + hs * k2y, p3 = st.dy + hs * k2p;
    const double k3y = p3, k3p = am * y3;
    const double y4 = st.y + s * k3y, p4 = st.dy + s * k3p;
    const double k4y = p4, k4p = a1 * y4;
    return {st.y + s / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            st.dy + s / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)};
}

}  // namespace

State rk4_forward(const Mesh& mesh, std::size_t k, double lambda, State s) noexcept {
    return rk4(mesh.step(), mesh.q_start(k) - lambda, mesh.q_mid(k) - lambda, mesh.q_end(k) - lambda, s);
}

State rk4_backward(const Mesh& mesh, std::size_t k, double lambda, State s) noexcept {
    return rk4(-mesh.step(), mesh.q_end(k) - lambda, mesh.q_mid(k) - lambda, mesh.q_start(k) - lambda, s);
}

State shoot_forward(const Mesh& mesh, double lambda, std::size_t k_from, State init, std::size_t k_to) noexcept {
    State s = init;
    for (std::size_t k = k_from; k < k_to; ++k) s = rk4_forward(mesh, k, lambda, s);
    return s;
}

BackwardShot shoot_backward(const Mesh& mesh, double lambda, std::size_t k_record) noexcept {
    const std::size_t n = mesh.intervals();
    State s{0.0, -1.0};
    BackwardShot out{s, s};
    bool recorded = k_record == n;
    for (std::size_t k = n; k-- > 0;) {
        s = rk4_backward(mesh, k, lambda, s);
        if (std::fabs(s.y) + std::fabs(s.dy) > kRescaleAbove) {
            s = {std::ldexp(s.y, kRescaleExponent), std::ldexp(s.dy, kRescaleExponent)};
            if (recorded)
                out.at_record = {std::ldexp(out.at_record.y, kRescaleExponent),
                                 std::ldexp(out.at_record.dy, kRescaleExponent)};
        }
        if (k == k_record) {
            out.at_record = s;
            recorded = true;
        }
    }
    out.at_start = s;
    return out;
}

double prufer_theta(const Mesh& mesh, double lambda) noexcept {
    const auto rhs = [lambda](double theta, double q) {
        const double c = std::cos(theta), s = std::sin(theta);
        return c * c + (lambda - q) * s * s;
    };
    const double h = mesh.step();
    double theta = 0.0;
    for (std::size_t k = 0; k < mesh.intervals(); ++k) {
        const double qa = mesh.q_start(k), qm = mesh.q_mid(k), qb = mesh.q_end(k);
        const double k1 = rhs(theta, qa);
        const double k2 = rhs(theta + 0.5 * h * k1, qm);
        const double k3 = rhs(theta + 0.5 * h * k2, qm);
        const double k4 = rhs(theta + h * k3, qb);
        theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return theta;
}

}  // namespace ptinv
