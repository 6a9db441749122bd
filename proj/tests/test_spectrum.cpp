#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ptinv/errors.hpp"
#include "ptinv/interaction.hpp"
#include "ptinv/quadrature.hpp"
#include "ptinv/spectrum.hpp"

using namespace ptinv;

TEST_CASE("oracles") {
    CHECK(oracle::airy_lambda1() == doctest::Approx(2.3381074104597670).epsilon(1e-15));
    const double lw = oracle::finite_well_lambda1();
    const double k = std::sqrt(lw + 5.0);
    CHECK(k / std::tan(k) == doctest::Approx(-std::sqrt(5.0 - k * k)).epsilon(1e-12));
}

TEST_CASE("eigen_truncated: harmonic levels") {
    const auto q = parse_potential("x^2");
    CHECK(eigen_truncated(q, 8.0, 1, 1e-3, -1.0) == doctest::Approx(oracle::harmonic_eigenvalue(1)).epsilon(1e-12));
    CHECK(std::fabs(eigen_truncated(q, 8.0, 1, 1e-3, -1.0) - 3.0) <= 1e-6);
    CHECK(std::fabs(eigen_truncated(q, 8.0, 2, 1e-3, -1.0) - 7.0) <= 1e-6);
    CHECK(std::fabs(eigen_truncated(q, 8.0, 3, 1e-3, -1.0) - 11.0) <= 1e-6);
}

TEST_CASE("eigen_truncated: Airy") {
    CHECK(std::fabs(eigen_truncated(parse_potential("x"), 12.0, 1, 1e-3, -1.0) - oracle::airy_lambda1()) <= 1e-6);
}

TEST_CASE("eigen_truncated respects a ceiling") {
    CHECK_THROWS_AS(eigen_truncated(parse_potential("0"), 8.0, 1, 1e-3, -1.0, -1e-9), NoEigenvalueBelowFloor);
    CHECK_THROWS_AS(eigen_truncated(parse_potential("x^2"), 8.0, 1, 1e-3, -1.0, 2.5), NoEigenvalueBelowFloor);
}

TEST_CASE("eigen_truncated lowers a floor placed above the eigenvalue") {
    CHECK(eigen_truncated(parse_potential("x^2"), 8.0, 1, 1e-3, 5.0) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("eigenvalues are ordered") {
    const auto q = parse_potential("x + sin(3*x)");
    double prev = -1e300;
    for (int n = 1; n <= 5; ++n) {
        const double l = eigen_truncated(q, 10.0, n, 1e-3, -5.0);
        CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("first_eigenvalue: harmonic") {
    const auto res = first_eigenvalue(parse_potential("x^2"), SolverConfig{});
    CHECK(res.converged);
    CHECK(std::fabs(res.lambda_1 - 3.0) <= 1e-6);
    CHECK(res.delta < 1e-9);
    CHECK(count_sign_changes(res.eigenfunction) == 0);
    CHECK(std::fabs(res.eigenfunction.ys.front()) <= 1e-9);
    CHECK(simpson_squared(res.eigenfunction.ys, res.eigenfunction.xs[1]) == doctest::Approx(1.0).epsilon(1e-12));
    // Matches the closed form eigenfunction.
    for (double x : {0.5, 1.0, 2.0})
        CHECK(res.eigenfunction.value_at(x) == doctest::Approx(oracle::harmonic_phi0(x)).epsilon(1e-8));
}

TEST_CASE("first_eigenvalue: finite well") {
    const auto res = first_eigenvalue(parse_potential("-5*[x<1]"), SolverConfig{});
    CHECK(res.converged);
    CHECK(std::fabs(res.lambda_1 - oracle::finite_well_lambda1()) <= 1e-6);
    CHECK(count_sign_changes(res.eigenfunction) == 0);
}

TEST_CASE("first_eigenvalue: free half-line has no bound state") {
    CHECK_THROWS_AS(first_eigenvalue(parse_potential("0"), SolverConfig{}), NoEigenvalueBelowFloor);
    // A shallow well with no bound state below the tail floor either.
    CHECK_THROWS_AS(first_eigenvalue(parse_potential("-1*[x<1]"), SolverConfig{}), NoEigenvalueBelowFloor);
}

TEST_CASE("first_eigenvalue: unsupported potentials") {
    CHECK_THROWS_AS(first_eigenvalue(parse_potential("-x^4"), SolverConfig{}), UnsupportedPotential);
}

TEST_CASE("first_eigenvalue: hard cap on b") {
    SolverConfig cfg;
    cfg.b_max = 8.0;
    CHECK_THROWS_AS(first_eigenvalue(parse_potential("x^2"), cfg), NonConvergentTruncation);
}

TEST_CASE("truncation is monotone for confining q") {
    const auto q = parse_potential("x");
    double prev = 1e300;
    for (double b : {4.0, 6.0, 8.0, 12.0, 16.0}) {
        const double l = eigen_truncated(q, b, 1, 1e-3, -1.0);
        CHECK(l <= prev + 1e-12);
        prev = l;
    }
    CHECK(std::fabs(eigen_truncated(q, 24.0, 1, 1e-3, -1.0) - eigen_truncated(q, 12.0, 1, 1e-3, -1.0)) <= 1e-9);
    const auto res = first_eigenvalue(q, SolverConfig{});
    CHECK(res.delta <= SolverConfig{}.eig_tol);
}

TEST_CASE("finite-difference oracle agrees with the first eigenvalue") {
    for (const char* text : {"x^2", "x", "-5*[x<1]"}) {
        const auto q = parse_potential(text);
        const auto res = first_eigenvalue(q, SolverConfig{});
        CHECK(std::fabs(oracle_fd(q, 1.0, 0.0, 12.0, 1e-3) - res.lambda_1) <= std::max(1e-4, 10 * 1e-6));
    }
}

TEST_CASE("essential_floor") {
    CHECK(essential_floor(parse_potential("x^2"), SolverConfig{}) == 0.0);
    CHECK(essential_floor(parse_potential("-5*[x<1]"), SolverConfig{}) == -5.0);
    CHECK(essential_floor(parse_potential("1+exp(-x)"), SolverConfig{}) == doctest::Approx(1.0).epsilon(1e-12));
}
