#pragma once

#include <memory>
#include <vector>

#include "ptinv/config.hpp"
#include "ptinv/mesh.hpp"
#include "ptinv/potential.hpp"
#include "ptinv/propagate.hpp"
#include "ptinv/spectrum.hpp"

namespace ptinv {

/// First eigenpair of -y'' + q y - r delta(x - t) y = lambda y, y(0) = 0,
/// truncated at b. `phi0` is continuous with a derivative jump at t; its
/// `dys` entry at t holds the left derivative.
struct PerturbedEigen {
    double t = 0.0;          // snapped to the integration grid
    double r = 0.0;
    double lambda_tr = 0.0;
    double b_used = 0.0;
    SolutionTrace phi0;      // unit L2 norm, positive
    double c_factor = 0.0;   // phi(t) / Psi(t) before normalization
    double dphi_left = 0.0;  // normalized phi0'(t - 0)
    double dphi_right = 0.0; // normalized phi0'(t + 0)
    double jump_residual = 0.0;  // phi0'(t-) - phi0'(t+) - r phi0(t)
    double residual = 0.0;       // matching residual at lambda_tr
    int zero_count = 0;          // sign changes of phi0 on the interior
};

/// F = r phi(t) Psi(t) - 1/m_b at lambda. PoleAtLambda where m_b vanishes.
double matching_residual(const Potential& q, double t, double r, double lambda, double b, double h);
double matching_residual(const Mesh& mesh, double t, double r, double lambda);

/// Solves perturbed problems for one potential and configuration. The
/// unperturbed eigenpair and the meshes at b_used and b_used / growth are
/// computed once; the object is immutable afterwards and may be shared by
/// worker threads.
class PerturbationSolver {
public:
    PerturbationSolver(Potential q, SolverConfig cfg);

    const EigenResult& unperturbed() const noexcept { return base_; }
    double lambda_1() const noexcept { return base_.lambda_1; }
    double r_cap() const noexcept { return r_cap_; }
    const SolverConfig& config() const noexcept { return cfg_; }
    const Potential& potential() const noexcept { return q_; }
    const Mesh& mesh() const noexcept { return levels_.back()->mesh; }

    /// Largest root of the matching equation below lambda_1. r = 0 or t = 0
    /// returns lambda_1 itself.
    PerturbedEigen solve(double t, double r) const;
    double eigenvalue(double t, double r) const;

    /// d lambda / d r by the implicit-function formula at (t, r).
    double dlambda_dr(double t, double r) const;

private:
    struct Level {
        Mesh mesh;
        double lambda_1;
    };
    struct Root {
        double lambda;
        std::size_t k_t;
    };

    Root root_on(const Level& level, double t, double r) const;
    PerturbedEigen assemble(const Level& level, const Root& root, double r) const;

    Potential q_;
    SolverConfig cfg_;
    EigenResult base_;
    double r_cap_ = 0.0;
    double phi_max_sq_ = 0.0;
    double search_floor_ = 0.0;
    std::vector<std::shared_ptr<const Level>> levels_;  // b_used / growth, b_used
};

PerturbedEigen lambda_tr(const Potential& q, double t, double r, const SolverConfig& cfg);
double dlambda_dr_formula(const Potential& q, double t, double r, const SolverConfig& cfg);

/// Smallest eigenvalue of the Dirichlet finite-difference operator on [0, b]
/// with -r/h added at the node nearest t, by Sturm-sequence bisection.
double oracle_fd(const Potential& q, double t, double r, double b, double h);

}  // namespace ptinv
