#pragma once

#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include "ptinv/config.hpp"
#include "ptinv/potential.hpp"

namespace ptinv {

/// -(P z')' + Q z = lambda W z obtained from -y'' + q y = lambda y by y = g z:
/// P = W = g^2 and Q = g (-g'' + q g). The truncated right boundary is
/// z(b) sin(beta) - P z'(b) cos(beta) = 0, so beta = pi/2 is Dirichlet and
/// beta = pi is Neumann.
struct WeightedProblem {
    Potential q;
    Potential g;
    double beta = std::numbers::pi / 2.0;

    double P(double x) const;
    double W(double x) const;
    double Q(double x) const;
};

WeightedProblem transform(const Potential& q, const Potential& g, const SolverConfig& cfg,
                          double beta = std::numbers::pi / 2.0);

/// First (or n-th) eigenvalue of the truncated weighted problem on [0, b] by
/// weighted Prüfer shooting, theta' = cos^2/P + (lambda W - Q) sin^2.
double weighted_eigen(const WeightedProblem& wp, double b, double h, int n = 1, double tol = 1e-12);

/// Prüfer angle at b for theta(0) = 0.
double weighted_theta(const WeightedProblem& wp, double lambda, double b, double h);

/// Samples of z and P z' for the weighted initial value problem.
struct WeightedTrace {
    std::vector<double> xs, zs, pdzs;
};
WeightedTrace propagate_weighted(const WeightedProblem& wp, double lambda, double b, double h, double z0, double pdz0);

/// x,P,Q,W rows on a uniform grid of [0, b].
void write_coefficients_csv(std::ostream& os, const WeightedProblem& wp, double b, double h);

}  // namespace ptinv
