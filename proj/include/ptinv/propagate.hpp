#pragma once

#include <cstddef>
#include <vector>

#include "ptinv/mesh.hpp"
#include "ptinv/potential.hpp"

namespace ptinv {

enum class Direction { Forward, Backward };

/// Grid samples of a solution of -y'' + q y = lambda y. `xs` is always
/// increasing; `direction` records how the solution was integrated and
/// (x0, y0, dy0) the initial data it reproduces.
struct SolutionTrace {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> dys;
    double lambda = 0.0;
    Direction direction = Direction::Forward;
    double x0 = 0.0;
    double y0 = 0.0;
    double dy0 = 0.0;

    std::size_t size() const noexcept { return xs.size(); }
    /// Linear interpolation of y between grid points (exact at nodes).
    double value_at(double x) const;
};

/// Integrate the initial value problem from x0 to x1 (either direction) with
/// fixed-step RK4. Throws NumericalOverflow when |y| or |y'| leaves 1e300.
SolutionTrace propagate(const Potential& q, double lambda, double x0, double x1, double y0, double dy0, double h);

/// Trace on mesh nodes [k_from, k_to], started at k_start (either end) with
/// `init`. With `renormalize` the whole trace is rescaled by powers of two
/// whenever the running magnitude passes 1e150; otherwise overflow throws.
SolutionTrace trace_on_mesh(const Mesh& mesh, double lambda, std::size_t k_from, std::size_t k_to,
                            Direction direction, State init, bool renormalize);

struct PruferSummary {
    double theta_end = 0.0;
    int zero_count = 0;  // zeros in the open interval (0, b)
};

PruferSummary prufer_count(const Potential& q, double lambda, double b, double h);
/// Zero count for an angle reached from theta = 0; a zero sitting exactly on
/// the right endpoint is not interior.
int zeros_from_theta(double theta_end);

struct WronskianResult {
    double value = 0.0;      // a*b' - b*a' at the left shared point
    double max_drift = 0.0;  // max deviation of W across the shared points
};

WronskianResult wronskian(const SolutionTrace& a, const SolutionTrace& b);

/// Sign changes of y over the interior nodes (exact zeros count once).
int count_sign_changes(const SolutionTrace& trace);

}  // namespace ptinv
