#pragma once

#include <optional>

#include "ptinv/classify.hpp"
#include "ptinv/config.hpp"
#include "ptinv/mesh.hpp"
#include "ptinv/potential.hpp"
#include "ptinv/propagate.hpp"

namespace ptinv {

struct EigenResult {
    double lambda_1 = 0.0;
    double b_used = 0.0;
    int iterations = 0;
    bool converged = false;
    double delta = 0.0;          // |lambda(b_used) - lambda(b_used / growth)|
    SolutionTrace eigenfunction; // positive, unit L2 norm on [0, b_used]
    HypothesisClass hypothesis;
};

/// n-th Dirichlet eigenvalue on the mesh interval. The Prüfer angle brackets
/// it (bisection to `tol`), then the root of the normalized value at 0 of the
/// right-boundary solution fixes it to rounding on this mesh. Without a
/// ceiling the upper bracket expands geometrically.
double eigen_on_mesh(const Mesh& mesh, int n, double lambda_floor, std::optional<double> ceiling, double tol);

double eigen_truncated(const Potential& q, double b, int n, double h, double lambda_floor,
                       std::optional<double> ceiling = std::nullopt, double tol = 1e-10);

/// Unit-norm, positive-oriented eigenfunction at an eigenvalue of the mesh problem.
SolutionTrace eigenfunction_on_mesh(const Mesh& mesh, double lambda);

/// Search floor used when the configuration leaves it automatic.
double default_lambda_floor(const HypothesisClass& hc, double b);

/// Ceiling below which a bound state counts (nullopt: none, confining case).
std::optional<double> eigen_ceiling(const HypothesisClass& hc, double eig_tol);

/// Lowest eigenvalue with b-escalation: b grows by cfg.b_growth until two
/// successive truncations agree within cfg.eig_tol.
EigenResult first_eigenvalue(const Potential& q, const SolverConfig& cfg);

double essential_floor(const Potential& q, const SolverConfig& cfg);

}  // namespace ptinv
