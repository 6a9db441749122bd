#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ptinv/errors.hpp"
#include "ptinv/potential.hpp"
#include "ptinv/propagate.hpp"
#include "ptinv/quadrature.hpp"
#include "ptinv/weyl.hpp"

using namespace ptinv;
constexpr double pi = std::numbers::pi;

TEST_CASE("free equation, lambda = 1: sine") {
    const auto tr = propagate(parse_potential("0"), 1.0, 0.0, pi, 0.0, 1.0, 1e-3);
    CHECK(tr.value_at(pi / 2) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::fabs(tr.ys.back()) < 1e-8);
    CHECK(tr.xs.front() == 0.0);
    CHECK(tr.ys.front() == 0.0);
    CHECK(tr.dys.front() == 1.0);
}

TEST_CASE("free equation, lambda = -1: sinh") {
    const auto tr = propagate(parse_potential("0"), -1.0, 0.0, 1.0, 0.0, 1.0, 1e-3);
    CHECK(tr.ys.back() == doctest::Approx(std::sinh(1.0)).epsilon(1e-10));
    CHECK(tr.ys.back() == doctest::Approx(1.1752012).epsilon(1e-7));
}

TEST_CASE("harmonic ground state shape") {
    const auto tr = propagate(parse_potential("x^2"), 3.0, 0.0, 4.0, 0.0, 1.0, 1e-3);
    const double expected = (4.0 * std::exp(-8.0)) / (1.0 * std::exp(-0.5));
    CHECK(tr.ys.back() / tr.value_at(1.0) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("backward integration reproduces its initial data") {
    const auto tr = propagate(parse_potential("x"), 0.5, 3.0, 0.0, 0.0, -1.0, 1e-3);
    CHECK(tr.direction == Direction::Backward);
    CHECK(tr.xs.front() == 0.0);
    CHECK(tr.xs.back() == 3.0);
    CHECK(tr.ys.back() == 0.0);
    CHECK(tr.dys.back() == -1.0);
    CHECK(tr.x0 == 3.0);
}

TEST_CASE("invalid propagate arguments") {
    CHECK_THROWS_AS(propagate(parse_potential("0"), 1.0, 1.0, 1.0, 0.0, 1.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(propagate(parse_potential("0"), 1.0, 0.0, 1.0, 0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("overflow reports the last finite point") {
    try {
        propagate(parse_potential("x^2"), 0.0, 0.0, 40.0, 0.0, 1.0, 1e-2);
        FAIL("expected overflow");
    } catch (const NumericalOverflow& e) {
        CHECK(e.last_finite_x() > 30.0);
        CHECK(e.last_finite_x() < 40.0);
        CHECK(std::string(e.what()).find("renormalized") != std::string::npos);
    }
}

TEST_CASE("global error is fourth order") {
    const auto q = parse_potential("0");
    double prev = 0;
    for (double h : {0.1, 0.05, 0.025}) {
        const auto tr = propagate(q, 1.0, 0.0, pi, 0.0, 1.0, h);
        double err = 0;
        for (std::size_t i = 0; i < tr.size(); ++i) err = std::max(err, std::fabs(tr.ys[i] - std::sin(tr.xs[i])));
        if (prev > 0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.1));
        prev = err;
    }
}

TEST_CASE("jump of q at a node keeps fourth order") {
    // Finite well, lambda below zero: exact solution is piecewise sin / exp.
    const auto q = parse_potential("-5*[x<1]");
    const double lambda = -1.0, k = 2.0, kappa = 1.0;
    const auto exact = [&](double x) {
        if (x <= 1.0) return std::sin(k * x) / k;
        const double y1 = std::sin(k) / k, d1 = std::cos(k);
        return y1 * std::cosh(kappa * (x - 1)) + d1 / kappa * std::sinh(kappa * (x - 1));
    };
    double prev = 0;
    for (double h : {0.1, 0.05, 0.025}) {
        const auto tr = propagate(q, lambda, 0.0, 2.0, 0.0, 1.0, h);
        const double err = std::fabs(tr.ys.back() - exact(2.0));
        if (prev > 0) CHECK(prev / err > 12.0);
        prev = err;
    }
}

TEST_CASE("prufer_count examples") {
    const auto free = prufer_count(parse_potential("0"), 1.0, pi, 1e-3);
    CHECK(free.theta_end == doctest::Approx(pi).epsilon(1e-8));
    CHECK(free.zero_count == 0);
    const auto q = parse_potential("x^2");
    CHECK(prufer_count(q, 3.0, 8.0, 1e-3).zero_count == 0);
    CHECK(prufer_count(q, 7.0, 8.0, 1e-3).zero_count == 1);
    // Between the third and fourth eigenvalues.
    CHECK(prufer_count(q, 11.5, 8.0, 1e-3).zero_count == 3);
}

TEST_CASE("prufer angle increases with lambda") {
    const auto q = parse_potential("x");
    double prev = -1e300;
    int prev_count = -1;
    for (int i = 0; i <= 40; ++i) {
        const auto s = prufer_count(q, -2.0 + 0.5 * i, 10.0, 1e-2);
        CHECK(s.theta_end > prev);
        CHECK(s.zero_count >= prev_count);
        prev = s.theta_end;
        prev_count = s.zero_count;
    }
}

TEST_CASE("wronskian of the fundamental pair") {
    const auto q = parse_potential("x^2");
    const auto phi = propagate(q, 2.0, 0.0, 4.0, 0.0, 1.0, 1e-3);
    const auto psi = propagate(q, 2.0, 0.0, 4.0, 1.0, 0.0, 1e-3);
    const auto w = wronskian(psi, phi);
    CHECK(w.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(wronskian(phi, psi).value == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(w.max_drift <= 1e-8);
    const auto same = wronskian(phi, phi);
    CHECK(same.value == 0.0);
    CHECK(same.max_drift == 0.0);
}

TEST_CASE("wronskian drift shrinks at fourth order") {
    const auto q = parse_potential("x^2");
    double prev = 0;
    for (double h : {0.04, 0.02, 0.01}) {
        const auto phi = propagate(q, 2.0, 0.0, 4.0, 0.0, 1.0, h);
        const auto psi = propagate(q, 2.0, 0.0, 4.0, 1.0, 0.0, h);
        const double drift = wronskian(psi, phi).max_drift;
        if (prev > 0) CHECK(prev / drift >= 8.0);
        prev = drift;
    }
}

TEST_CASE("wronskian of chi and phi is one") {
    const auto q = parse_potential("x");
    const auto ev = psi_weyl(q, 0.0, 10.0, 1e-3);
    const auto phi = propagate(q, 0.0, 0.0, 10.0, 0.0, 1.0, 1e-3);
    const auto w = wronskian(ev.chi, phi);
    CHECK(w.value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(w.max_drift <= 1e-6);
}

TEST_CASE("disjoint traces have no wronskian") {
    const auto q = parse_potential("0");
    const auto a = propagate(q, 1.0, 0.0, 1.0, 0.0, 1.0, 0.1);
    const auto b = propagate(q, 1.0, 2.0, 3.0, 0.0, 1.0, 0.1);
    CHECK_THROWS_AS(wronskian(a, b), ConfigError);
}

TEST_CASE("simpson quadrature") {
    for (int n : {1, 2, 3, 7, 8, 100, 101}) {
        std::vector<double> v(n + 1);
        const double h = 1.0 / n;
        for (int i = 0; i <= n; ++i) v[i] = std::pow(i * h, 2);
        CHECK(simpson(v, h) == doctest::Approx(1.0 / 3.0).epsilon(n == 1 ? 0.6 : 1e-12));
    }
}
