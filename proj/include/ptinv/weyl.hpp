#pragma once

#include "ptinv/mesh.hpp"
#include "ptinv/potential.hpp"
#include "ptinv/propagate.hpp"

namespace ptinv {

/// Truncated Weyl data at one lambda. The Weyl solution chi is the solution
/// vanishing at x = b, normalized so chi(0) = 1; then chi'(0) = m_b(lambda) and
/// chi = psi + m_b phi for the fundamental pair phi(0)=0, phi'(0)=1 and
/// psi(0)=1, psi'(0)=0.
struct WeylEval {
    double lambda = 0.0;
    double b = 0.0;
    double m = 0.0;
    SolutionTrace chi;
    SolutionTrace psi_weyl;         // chi / m
    double m_prime_integral = 0.0;  // integral of chi^2 over [0, b]
    double u_value = 0.0;           // -integral of psi_weyl^2 over [0, b]
};

/// m_b(lambda). Throws PoleAtLambda when lambda is numerically a Dirichlet
/// eigenvalue of [0, b] (|chi-generating solution at 0| < 1e-12 of its max).
double m_truncated(const Potential& q, double lambda, double b, double h);
double m_truncated(const Mesh& mesh, double lambda);

WeylEval psi_weyl(const Potential& q, double lambda, double b, double h);
WeylEval psi_weyl(const Mesh& mesh, double lambda);

/// 1/m_b(lambda); smooth through the poles of m_b. Throws PoleAtLambda where
/// m_b vanishes.
double inverse_m(const Mesh& mesh, double lambda);

/// Central difference of 1/m_b with half-width dl.
double u_of_lambda(const Potential& q, double lambda, double b, double h, double dl);
double u_of_lambda(const Mesh& mesh, double lambda, double dl);

/// Default difference half-width for u and other lambda derivatives.
double default_dl(double eig_tol);

}  // namespace ptinv
