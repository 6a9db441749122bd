#include <doctest.h>

#include <cmath>

#include "ptinv/errors.hpp"
#include "ptinv/mesh.hpp"
#include "ptinv/potential.hpp"
#include "ptinv/propagate.hpp"
#include "ptinv/weyl.hpp"

using namespace ptinv;

namespace {

// m_b from the forward pair: chi(b) = psi(b) + m phi(b) = 0.
double forward_m(const Potential& q, double lambda, double b, double h) {
    const auto phi = propagate(q, lambda, 0.0, b, 0.0, 1.0, h);
    const auto psi = propagate(q, lambda, 0.0, b, 1.0, 0.0, h);
    return -psi.ys.back() / phi.ys.back();
}

}  // namespace

TEST_CASE("m_b for the free half-line") {
    const auto q = parse_potential("0");
    CHECK(std::fabs(m_truncated(q, -1.0, 20.0, 1e-3) + 1.0) <= 1e-8);
    CHECK(m_truncated(q, -4.0, 20.0, 1e-3) == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("backward m_b agrees with the forward formula") {
    const auto q = parse_potential("x^2");
    for (double lambda : {-3.0, 0.0, 2.0, 2.9})
        CHECK(m_truncated(q, lambda, 4.0, 1e-3) == doctest::Approx(forward_m(q, lambda, 4.0, 1e-3)).epsilon(1e-9));
}

TEST_CASE("m_b vanishes at the Neumann eigenvalue") {
    CHECK_THROWS_AS(psi_weyl(parse_potential("x^2"), 1.0, 8.0, 1e-3), PoleAtLambda);
}

TEST_CASE("m_b has a pole at the harmonic eigenvalue") {
    CHECK_THROWS_AS(m_truncated(parse_potential("x^2"), 3.0, 8.0, 1e-3), PoleAtLambda);
    try {
        m_truncated(parse_potential("x^2"), 3.0, 8.0, 1e-3);
    } catch (const PoleAtLambda& e) {
        CHECK(e.lambda() == 3.0);
    }
}

TEST_CASE("psi_weyl on the free half-line") {
    const auto ev = psi_weyl(parse_potential("0"), -1.0, 20.0, 1e-3);
    CHECK(ev.m == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(ev.m_prime_integral == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(ev.u_value == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(ev.chi.value_at(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("psi_weyl normalization") {
    for (const char* text : {"x^2", "x", "-5*[x<1]"}) {
        const auto ev = psi_weyl(parse_potential(text), -0.5 - 1.0, 8.0, 1e-3);
        CHECK(ev.chi.ys.front() == 1.0);
        CHECK(ev.chi.dys.front() == doctest::Approx(ev.m).epsilon(1e-14));
        CHECK(ev.psi_weyl.ys.front() == doctest::Approx(1.0 / ev.m).epsilon(1e-14));
        for (std::size_t i = 0; i < ev.chi.size(); i += 500)
            CHECK(ev.psi_weyl.ys[i] == doctest::Approx(ev.chi.ys[i] / ev.m).epsilon(1e-13));
    }
}

TEST_CASE("u(lambda) for the free half-line") {
    const auto q = parse_potential("0");
    const double dl = default_dl(1e-9);
    CHECK(dl == 1e-5);
    CHECK(u_of_lambda(q, -1.0, 20.0, 1e-3, dl) == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(u_of_lambda(q, -4.0, 20.0, 1e-3, dl) == doctest::Approx(-0.0625).epsilon(1e-8));
}

TEST_CASE("u identity on the harmonic oracle") {
    const auto q = parse_potential("x^2");
    const auto ev = psi_weyl(q, 2.0, 8.0, 1e-3);
    const double u = u_of_lambda(q, 2.0, 8.0, 1e-3, 1e-5);
    CHECK(std::fabs(u - ev.u_value) <= 1e-4);
    CHECK(std::fabs(u - ev.u_value) <= 1e-4 * std::fabs(u));
}

TEST_CASE("m' identity on the harmonic oracle") {
    const Mesh mesh(parse_potential("x^2"), 0.0, 8.0, 1e-3);
    const double dl = 1e-5;
    const double fd = (m_truncated(mesh, 2.0 + dl) - m_truncated(mesh, 2.0 - dl)) / (2 * dl);
    const auto ev = psi_weyl(mesh, 2.0);
    CHECK(std::fabs(fd - ev.m_prime_integral) <= 1e-4 * ev.m_prime_integral);
}

TEST_CASE("m_b increases below the first eigenvalue") {
    const Mesh mesh(parse_potential("x^2"), 0.0, 8.0, 1e-3);
    double prev = -1e300;
    for (int i = 0; i < 20; ++i) {
        const double m = m_truncated(mesh, -5.0 + 7.9 * i / 19.0);
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("W[chi, phi] = 1 along the interval") {
    const auto q = parse_potential("x^2");
    const auto ev = psi_weyl(q, 2.0, 8.0, 1e-3);
    const auto phi = propagate(q, 2.0, 0.0, 8.0, 0.0, 1.0, 1e-3);
    const auto w = wronskian(ev.chi, phi);
    CHECK(w.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.max_drift <= 1e-6);
}
