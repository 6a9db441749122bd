#pragma once

#include <cstddef>
#include <vector>

#include "ptinv/potential.hpp"

namespace ptinv {

/// Uniform grid x_k = lo + k*step on [lo, hi] with q tabulated for the
/// classical RK4 stages of every interval. The interval endpoints use the
/// one-sided limits of q from inside the interval, so a jump of q located at
/// a node costs no accuracy.
class Mesh {
public:
    Mesh(const Potential& q, double lo, double hi, double h);

    std::size_t intervals() const noexcept { return q_start_.size(); }
    double step() const noexcept { return step_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double node(std::size_t k) const noexcept { return k == intervals() ? hi_ : lo_ + static_cast<double>(k) * step_; }
    std::size_t nearest_node(double x) const;

    double q_start(std::size_t k) const noexcept { return q_start_[k]; }  // q(x_k + 0)
    double q_mid(std::size_t k) const noexcept { return q_mid_[k]; }
    double q_end(std::size_t k) const noexcept { return q_end_[k]; }      // q(x_{k+1} - 0)
    /// Mean of the one-sided limits at node k.
    double q_node(std::size_t k) const noexcept;

private:
    double lo_, hi_, step_;
    std::vector<double> q_start_, q_mid_, q_end_;
};

/// Number of uniform intervals of size close to h covering a span.
std::size_t interval_count(double span, double h);

struct State {
    double y;
    double dy;
};

/// One classical RK4 step of y'' = (q - lambda) y across interval k,
/// from x_k to x_{k+1} (forward) or from x_{k+1} to x_k (backward).
State rk4_forward(const Mesh& mesh, std::size_t k, double lambda, State s) noexcept;
State rk4_backward(const Mesh& mesh, std::size_t k, double lambda, State s) noexcept;

/// Plain forward integration from node k_from to node k_to (k_to >= k_from).
State shoot_forward(const Mesh& mesh, double lambda, std::size_t k_from, State init, std::size_t k_to) noexcept;

/// Backward integration from the right end with w(hi)=0, w'(hi)=-1, recording
/// the state at node k_record and returning the state at node 0. Magnitudes are
/// rescaled by powers of two when they pass 1e150, so only ratios between the
/// two returned states are meaningful.
struct BackwardShot {
    State at_record;
    State at_start;
};
BackwardShot shoot_backward(const Mesh& mesh, double lambda, std::size_t k_record) noexcept;

/// Prüfer angle at the right end for theta(lo) = 0, integrated with RK4 on the
/// mesh: theta' = cos^2 theta + (lambda - q) sin^2 theta.
double prufer_theta(const Mesh& mesh, double lambda) noexcept;

}  // namespace ptinv
