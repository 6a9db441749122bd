#include "ptinv/weyl.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ptinv/errors.hpp"
#include "ptinv/quadrature.hpp"

namespace ptinv {
namespace {

constexpr double kPoleTol = 1e-12;

// Solution with w(b) = 0, w'(b) = -1, renormalized as needed.
SolutionTrace right_solution(const Mesh& mesh, double lambda) {
    return trace_on_mesh(mesh, lambda, 0, mesh.intervals(), Direction::Backward, State{0.0, -1.0}, true);
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

void check_not_eigenvalue(const SolutionTrace& w, double lambda, double b) {
    if (std::fabs(w.ys.front()) < kPoleTol * max_abs(w.ys))
        throw PoleAtLambda(fmt::format("lambda = {} is numerically a Dirichlet eigenvalue of [0, {}]: m_b has a pole",
                                       lambda, b),
                           lambda);
}

}  // namespace

double m_truncated(const Mesh& mesh, double lambda) {
    const SolutionTrace w = right_solution(mesh, lambda);
    check_not_eigenvalue(w, lambda, mesh.hi());
    return w.dys.front() / w.ys.front();
}

double m_truncated(const Potential& q, double lambda, double b, double h) {
    return m_truncated(Mesh(q, 0.0, b, h), lambda);
}

WeylEval psi_weyl(const Mesh& mesh, double lambda) {
    const SolutionTrace w = right_solution(mesh, lambda);
    check_not_eigenvalue(w, lambda, mesh.hi());
    const double w0 = w.ys.front(), dw0 = w.dys.front();
    if (std::fabs(dw0) < kPoleTol * max_abs(w.dys))
        throw PoleAtLambda(fmt::format("m_b vanishes at lambda = {}; Psi = chi/m is undefined", lambda), lambda);

    WeylEval out;
    out.lambda = lambda;
    out.b = mesh.hi();
    out.m = dw0 / w0;
    out.chi = w;
    out.psi_weyl = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out.chi.ys[i] = w.ys[i] / w0;
        out.chi.dys[i] = w.dys[i] / w0;
        out.psi_weyl.ys[i] = w.ys[i] / dw0;
        out.psi_weyl.dys[i] = w.dys[i] / dw0;
    }
    out.chi.y0 = out.chi.ys.back();
    out.chi.dy0 = out.chi.dys.back();
    out.psi_weyl.y0 = out.psi_weyl.ys.back();
    out.psi_weyl.dy0 = out.psi_weyl.dys.back();
    out.m_prime_integral = simpson_squared(out.chi.ys, mesh.step());
    out.u_value = -simpson_squared(out.psi_weyl.ys, mesh.step());
    return out;
}

WeylEval psi_weyl(const Potential& q, double lambda, double b, double h) {
    return psi_weyl(Mesh(q, 0.0, b, h), lambda);
}

double inverse_m(const Mesh& mesh, double lambda) {
    const BackwardShot shot = shoot_backward(mesh, lambda, 0);
    const State s = shot.at_start;
    if (std::fabs(s.dy) < kPoleTol * (std::fabs(s.y) + std::fabs(s.dy)))
        throw PoleAtLambda(fmt::format("m_b vanishes at lambda = {}; 1/m_b has a pole", lambda), lambda);
    return s.y / s.dy;
}

double u_of_lambda(const Mesh& mesh, double lambda, double dl) {
    if (!(dl > 0.0)) throw ConfigError("u_of_lambda needs dl > 0");
    return (inverse_m(mesh, lambda + dl) - inverse_m(mesh, lambda - dl)) / (2.0 * dl);
}

double u_of_lambda(const Potential& q, double lambda, double b, double h, double dl) {
    return u_of_lambda(Mesh(q, 0.0, b, h), lambda, dl);
}

double default_dl(double eig_tol) { return std::max(1e-5, 10.0 * eig_tol); }

}  // namespace ptinv
