#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "ptinv/errors.hpp"
#include "ptinv/interaction.hpp"
#include "ptinv/inverse.hpp"
#include "ptinv/io.hpp"

using namespace ptinv;

namespace {

// lambda(t, r) = 3 - phi0(t)^2 r, exact to first order in r.
SampleTable injected_table(const std::vector<double>& ts, const std::vector<double>& rs) {
    SampleTable tab;
    for (double t : ts) {
        tab.entries.push_back({t, 0.0, 3.0});
        for (double r : rs) tab.entries.push_back({t, r, 3.0 + oracle::harmonic_slope(t) * r});
    }
    tab.meta = "test";
    tab.index();
    return tab;
}

double max_error(const ReconstructionResult& res, const Potential& q) {
    double err = 0;
    for (std::size_t i = 0; i < res.xs.size(); ++i) err = std::max(err, std::fabs(res.qhat[i] - q(res.xs[i])));
    return err;
}

SolverConfig with_grid(double lo, double hi, double step) {
    SolverConfig cfg;
    cfg.t_grid = SolverConfig::uniform_grid(lo, hi, step);
    return cfg;
}

}  // namespace

TEST_CASE("sample: layout and invariants") {
    SolverConfig cfg;
    cfg.t_grid = {0.5, 1.0, 1.5};
    const auto tab = sample(parse_potential("x^2"), cfg);
    REQUIRE(tab.entries.size() == 12);
    CHECK(tab.r_ladder == std::vector<double>{0.0, 0.01, 0.02, 0.04});
    for (std::size_t ti = 0; ti < 3; ++ti) {
        CHECK(tab.at(ti, 0) == *tab.lambda_1);
        CHECK(std::fabs(tab.at(ti, 0) - 3.0) <= 1e-6);
        for (std::size_t ri = 1; ri < 4; ++ri) CHECK(tab.at(ti, ri) < tab.at(ti, ri - 1));
    }
    CHECK(tab.meta["generator"] == "ptinv sample");
}

TEST_CASE("sample: worker count does not change the table") {
    SolverConfig cfg;
    cfg.t_grid = {0.5, 1.0, 1.5, 2.0};
    const auto a = sample(parse_potential("x"), cfg, 1);
    const auto b = sample(parse_potential("x"), cfg, 3);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].lambda == b.entries[i].lambda);
}

TEST_CASE("sample: empty grid") {
    SolverConfig cfg;
    cfg.t_grid = {};
    CHECK_THROWS_AS(sample(parse_potential("x^2"), cfg), ConfigError);
}

TEST_CASE("slope at zero on sampled data") {
    SolverConfig cfg;
    cfg.t_grid = {0.0, 1.0};
    const auto tab = sample(parse_potential("x^2"), cfg);
    const auto rep = slope_at_zero(tab, cfg);
    REQUIRE(rep.slopes.size() == 2);
    CHECK(rep.slopes[0].s == 0.0);
    CHECK(std::fabs(rep.slopes[1].s - (-0.830215)) <= 2e-3);
    // The ladder fit beats the single smallest rung.
    const double exact = oracle::harmonic_slope(1.0);
    CHECK(std::fabs(rep.slopes[1].s - exact) < std::fabs(rep.slopes[1].baseline - exact));
}

TEST_CASE("formula in isolation: injected slope table") {
    const auto cfg = with_grid(0.1, 3.5, 0.05);
    const auto res = reconstruct(injected_table(cfg.t_grid, {0.01, 0.02, 0.04}), cfg);
    CHECK(res.lambda_1 == 3.0);
    CHECK(max_error(res, parse_potential("x^2")) <= 1e-4);
    CHECK(res.normalization <= 1.0 + 1e-6);
    CHECK(res.clamp_count == 0);
}

TEST_CASE("formula in isolation: stencil error shrinks at fourth order") {
    const auto q = parse_potential("x^2");
    double prev = 0;
    for (double step : {0.04, 0.02, 0.01}) {
        const auto cfg = with_grid(0.1, 3.5, step);
        std::vector<double> slopes;
        for (double t : cfg.t_grid) slopes.push_back(oracle::harmonic_slope(t));
        const double err = max_error(reconstruct_from_slopes(cfg.t_grid, slopes, 3.0, cfg), q);
        if (prev > 0) CHECK(prev / err > 10.0);
        if (step == 0.01) CHECK(err <= 1e-6);
        prev = err;
    }
}

TEST_CASE("positive slope is inconsistent") {
    auto cfg = with_grid(0.1, 1.0, 0.1);
    SampleTable tab;
    for (double t : cfg.t_grid) {
        tab.entries.push_back({t, 0.0, 3.0});
        for (double r : {0.01, 0.02}) tab.entries.push_back({t, r, 3.0 - 1e-3 * r});
    }
    tab.index();
    CHECK_NOTHROW(slope_at_zero(tab, cfg));
    // Breaking lambda <= lambda_1 at one point.
    tab.entries[4].lambda = 3.01;
    CHECK_THROWS_AS(slope_at_zero(tab, cfg), InconsistentTable);
}

TEST_CASE("slightly positive slopes within tolerance are clamped") {
    auto cfg = with_grid(0.1, 1.0, 0.1);
    SampleTable tab;
    for (double t : cfg.t_grid) {
        tab.entries.push_back({t, 0.0, 3.0});
        for (double r : {0.01, 0.02}) tab.entries.push_back({t, r, 3.0 - 1e-3 * r});
    }
    // Curvature dominating the first-order term tilts the fitted slope upward.
    tab.entries[1].lambda = 3.0 - 1e-9;
    tab.entries[2].lambda = 3.0 - 1e-9 - 5e-9;
    tab.index();
    cfg.slope_tol = 1e-3;
    const auto rep = slope_at_zero(tab, cfg);
    CHECK(rep.slopes[0].s == 0.0);
    CHECK(rep.slopes[0].clamped);
    CHECK(rep.clamp_count == 1);
}

TEST_CASE("incomplete grid is inconsistent") {
    SampleTable tab;
    tab.entries = {{0.1, 0.0, 3.0}, {0.1, 0.01, 2.99}, {0.2, 0.0, 3.0}};
    CHECK_THROWS_AS(tab.index(), InconsistentTable);
}

TEST_CASE("short grid leaves an empty window") {
    const auto cfg = with_grid(0.5, 0.8, 0.05);
    const auto tab = injected_table(cfg.t_grid, {0.01, 0.02});
    CHECK_THROWS_AS(reconstruct(tab, cfg), WindowEmpty);
}

TEST_CASE("roundtrip: harmonic and linear potentials") {
    for (const char* text : {"x^2", "x"}) {
        const auto rep = roundtrip(parse_potential(text), SolverConfig{});
        CHECK(rep.max_error <= 5e-2);
        CHECK(rep.mean_error <= rep.max_error);
        CHECK(rep.excluded.empty());
        CHECK(rep.result.window.first >= 0.1);
        CHECK(rep.result.window.second <= 3.5);
        CHECK(rep.points > 20);
        CHECK(rep.result.normalization <= 1.0 + 1e-6);
    }
}

TEST_CASE("roundtrip: finite well excludes the jump") {
    auto cfg = with_grid(0.1, 3.0, 0.05);
    const auto rep = roundtrip(parse_potential("-5*[x<1]"), cfg);
    REQUIRE(rep.excluded.size() == 1);
    CHECK(rep.excluded[0].first == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(rep.excluded[0].second == doctest::Approx(1.1).epsilon(1e-3));
    CHECK(rep.max_error <= 5e-2);
}

TEST_CASE("find_jumps") {
    const auto j = find_jumps(parse_potential("-5*[x<1] + 2*[x<2.5]"), 0.0, 3.0);
    REQUIRE(j.size() == 2);
    CHECK(j[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(j[1] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(find_jumps(parse_potential("x^2"), 0.0, 3.0).empty());
}

TEST_CASE("different potentials give different eigenvalue functions") {
    SolverConfig cfg;
    cfg.t_grid = {0.5, 1.0, 2.0};
    const auto a = sample(parse_potential("x^2"), cfg);
    const auto b = sample(parse_potential("x^2 + 0.3*exp(-4*(x-1)^2)"), cfg);
    double diff = 0;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i].r > 0) diff = std::max(diff, std::fabs((a.entries[i].lambda - a.lambda_1.value()) -
                                                                 (b.entries[i].lambda - b.lambda_1.value())));
    CHECK(diff > 1e-6);
}

TEST_CASE("refining the r ladder improves the slope") {
    const auto q = parse_potential("x^2");
    const double exact = oracle::harmonic_slope(1.0);
    double prev = 1e300;
    for (double scale : {4.0, 2.0, 1.0}) {
        SolverConfig cfg;
        cfg.t_grid = {1.0};
        cfg.r_ladder = {0.04 * scale, 0.02 * scale, 0.01 * scale};
        const double err = std::fabs(slope_at_zero(sample(q, cfg), cfg).slopes[0].s - exact);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("fit residuals are small on smooth data") {
    const auto rep = roundtrip(parse_potential("x^2"), SolverConfig{});
    for (double r : rep.result.fit_residuals) CHECK(r <= 1e-6);
}

TEST_CASE("smoothing tames noisy slopes") {
    const auto cfg0 = with_grid(0.1, 3.5, 0.05);
    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 1e-6);
    std::vector<double> slopes;
    for (double t : cfg0.t_grid) slopes.push_back(oracle::harmonic_slope(t) + noise(rng));
    const auto q = parse_potential("x^2");
    const auto raw = reconstruct_from_slopes(cfg0.t_grid, slopes, 3.0, cfg0);
    auto cfg1 = cfg0;
    cfg1.smooth = true;
    const auto smooth = reconstruct_from_slopes(cfg0.t_grid, slopes, 3.0, cfg1);
    CHECK(smooth.smoothed);
    // Compare on the common window.
    double e_raw = 0, e_smooth = 0;
    for (std::size_t i = 0; i < smooth.xs.size(); ++i) {
        const double x = smooth.xs[i];
        if (x < 0.5 || x > 2.5) continue;
        e_smooth = std::max(e_smooth, std::fabs(smooth.qhat[i] - q(x)));
    }
    for (std::size_t i = 0; i < raw.xs.size(); ++i) {
        const double x = raw.xs[i];
        if (x < 0.5 || x > 2.5) continue;
        e_raw = std::max(e_raw, std::fabs(raw.qhat[i] - q(x)));
    }
    CHECK(e_smooth < e_raw);
}

TEST_CASE("sample table CSV roundtrip") {
    SolverConfig cfg;
    cfg.t_grid = {0.5, 1.0};
    const auto tab = sample(parse_potential("x^2"), cfg);
    const auto dir = std::filesystem::temp_directory_path() / "ptinv_test_io";
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "samples.csv").string();
    write_sample_files(tab, csv, (dir / "samples.json").string());
    const auto back = read_sample_table(csv);
    REQUIRE(back.entries.size() == tab.entries.size());
    for (std::size_t i = 0; i < tab.entries.size(); ++i) CHECK(back.entries[i].lambda == tab.entries[i].lambda);
    CHECK(back.lambda_1 == tab.lambda_1);
    std::filesystem::remove(dir / "samples.json");
    CHECK(read_sample_table(csv).meta == "external");
    std::filesystem::remove_all(dir);
}
