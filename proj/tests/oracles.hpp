#pragma once

// Closed-form and independently computed reference values.

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/airy.hpp>

namespace oracle {

// Half-line harmonic oscillator q = x^2 with Dirichlet data: odd Hermite
// functions, lambda_n = 4n - 1.
inline double harmonic_eigenvalue(int n) { return 4.0 * n - 1.0; }

// Normalized ground state 2 pi^{-1/4} x exp(-x^2 / 2).
inline double harmonic_phi0(double x) {
    return 2.0 * std::pow(std::numbers::pi, -0.25) * x * std::exp(-0.5 * x * x);
}

inline double harmonic_slope(double t) {
    const double p = harmonic_phi0(t);
    return -p * p;
}

// q = x: eigenfunction Ai(x - lambda), lambda_1 = -a_1.
inline double airy_lambda1() { return -boost::math::airy_ai_zero<double>(1); }

// Finite well q = -depth on [0, 1), 0 beyond: k cot k = -sqrt(depth - k^2),
// lambda = k^2 - depth. Plain bisection on k in (pi/2, sqrt(depth)).
inline double finite_well_lambda1(double depth = 5.0) {
    const auto f = [depth](double k) { return k / std::tan(k) + std::sqrt(depth - k * k); };
    double lo = std::numbers::pi / 2 + 1e-12, hi = std::sqrt(depth) - 1e-15;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    const double k = 0.5 * (lo + hi);
    return k * k - depth;
}

}  // namespace oracle
