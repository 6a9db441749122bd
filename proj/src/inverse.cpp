#include "ptinv/inverse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "ptinv/errors.hpp"
#include "ptinv/interaction.hpp"
#include "ptinv/quadrature.hpp"

namespace ptinv {
namespace {

constexpr std::size_t kMargin = 4;  // two widths of the 5-point stencil

[[noreturn]] void rethrow_annotated(const std::exception_ptr& err, const std::string& where) {
    try {
        std::rethrow_exception(err);
    } catch (const NoEigenvalueBelowFloor& e) {
        throw NoEigenvalueBelowFloor(where + e.what());
    } catch (const BracketFailure& e) {
        throw BracketFailure(where + e.what());
    } catch (const PoleAtLambda& e) {
        throw PoleAtLambda(where + e.what(), e.lambda());
    } catch (const NumericalOverflow& e) {
        throw NumericalOverflow(where + e.what(), e.last_finite_x());
    } catch (const NonConvergentTruncation& e) {
        throw NonConvergentTruncation(where + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const Error& e) {
        throw Error(where + e.what());
    }
}

bool is_uniform(const std::vector<double>& ts) {
    if (ts.size() < 2) return false;
    const double step = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (std::fabs(ts[i] - ts[i - 1] - step) > 1e-6 * step) return false;
    return true;
}

// Whittaker smoother: argmin |y - f|^2 + penalty |D2 y / step^2|^2.
std::vector<double> smooth_values(const std::vector<double>& f, double step, double penalty) {
    const auto n = static_cast<Eigen::Index>(f.size());
    const double w = penalty / std::pow(step, 4);
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
    for (Eigen::Index i = 0; i + 2 < n; ++i) {
        const double c[3] = {1.0, -2.0, 1.0};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) trips.emplace_back(i + a, i + b, w * c[a] * c[b]);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw Error("smoothing system could not be factorized");
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(f.data(), n);
    const Eigen::VectorXd y = solver.solve(rhs);
    return {y.data(), y.data() + n};
}

}  // namespace

void SampleTable::index() {
    std::sort(entries.begin(), entries.end(),
              [](const SampleEntry& a, const SampleEntry& b) { return a.t != b.t ? a.t < b.t : a.r < b.r; });
    t_grid.clear();
    r_ladder.clear();
    for (const auto& e : entries) {
        if (t_grid.empty() || t_grid.back() != e.t) t_grid.push_back(e.t);
        r_ladder.push_back(e.r);
    }
    std::sort(r_ladder.begin(), r_ladder.end());
    r_ladder.erase(std::unique(r_ladder.begin(), r_ladder.end()), r_ladder.end());
    if (entries.empty()) throw InconsistentTable("sample table is empty");
    if (entries.size() != t_grid.size() * r_ladder.size())
        throw InconsistentTable(fmt::format("sample table is not a full grid: {} entries for {} t values x {} r values",
                                            entries.size(), t_grid.size(), r_ladder.size()));
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        for (std::size_t j = 0; j < r_ladder.size(); ++j) {
            const SampleEntry& e = entries[i * r_ladder.size() + j];
            if (e.t != t_grid[i] || e.r != r_ladder[j])
                throw InconsistentTable(fmt::format("sample table misses (t, r) = ({}, {})", t_grid[i], r_ladder[j]));
        }
}

SampleTable sample(const Potential& q, const SolverConfig& cfg, unsigned workers) {
    cfg.validate();
    if (cfg.t_grid.empty()) throw ConfigError("invalid config: t_grid is empty");
    if (cfg.r_ladder.empty()) throw ConfigError("invalid config: r_ladder is empty");
    const PerturbationSolver solver(q, cfg);

    SampleTable table;
    table.t_grid = cfg.t_grid;
    table.r_ladder = {0.0};
    table.r_ladder.insert(table.r_ladder.end(), cfg.r_ladder.rbegin(), cfg.r_ladder.rend());
    const std::size_t nr = table.r_ladder.size(), total = table.t_grid.size() * nr;

    std::vector<double> values(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) {
            try {
                values[i] = solver.eigenvalue(table.t_grid[i / nr], table.r_ladder[i % nr]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < total; ++i)
        if (errors[i])
            rethrow_annotated(errors[i], fmt::format("at (t, r) = ({}, {}): ", table.t_grid[i / nr], table.r_ladder[i % nr]));

    table.entries.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
        table.entries.push_back({table.t_grid[i / nr], table.r_ladder[i % nr], values[i]});
    table.lambda_1 = solver.lambda_1();
    table.meta = {{"generator", "ptinv sample"},
                  {"potential", q.description()},
                  {"config", cfg},
                  {"lambda_1", solver.lambda_1()},
                  {"b_used", solver.unperturbed().b_used},
                  {"r_cap", solver.r_cap()},
                  {"hypothesis", to_string(solver.unperturbed().hypothesis.variant)}};
    return table;
}

SlopeReport slope_at_zero(const SampleTable& table, const SolverConfig& cfg) {
    const std::size_t nr = table.r_ladder.size();
    if (table.entries.size() != table.t_grid.size() * nr || table.entries.empty())
        throw InconsistentTable("sample table is not a full grid");
    const bool has_zero = table.r_ladder.front() == 0.0;
    const std::size_t first = has_zero ? 1 : 0;
    if (nr - first < 1) throw InconsistentTable("sample table has no positive coupling constants");

    SlopeReport out;
    if (has_zero) {
        const double ref = table.at(0, 0);
        double lo = ref, hi = ref, sum = 0.0;
        for (std::size_t i = 0; i < table.t_grid.size(); ++i) {
            const double v = table.at(i, 0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v - ref;
        }
        if (hi - lo >= cfg.eig_tol)
            throw InconsistentTable(fmt::format(
                "r = 0 entries spread by {} (>= eig_tol {}); they must all equal lambda_1", hi - lo, cfg.eig_tol));
        out.lambda_1 = ref + sum / static_cast<double>(table.t_grid.size());
    } else if (table.lambda_1) {
        out.lambda_1 = *table.lambda_1;
    } else {
        throw InconsistentTable("sample table has neither an r = 0 row nor lambda_1 metadata");
    }

    const double tol = cfg.eig_tol;
    const double r_max = table.r_ladder.back();
    for (std::size_t i = 0; i < table.t_grid.size(); ++i) {
        const double t = table.t_grid[i];
        for (std::size_t j = first; j < nr; ++j) {
            const double v = table.at(i, j);
            if (!std::isfinite(v)) throw InconsistentTable(fmt::format("lambda at (t, r) = ({}, {}) is not finite", t, table.r_ladder[j]));
            if (v > out.lambda_1 + tol)
                throw InconsistentTable(fmt::format("lambda({}, {}) = {} exceeds lambda_1 = {}; perturbed first "
                                                    "eigenvalues cannot lie above the unperturbed one",
                                                    t, table.r_ladder[j], v, out.lambda_1));
            if (j > first && v > table.at(i, j - 1) + tol)
                throw InconsistentTable(fmt::format("lambda(t = {}, r) increases between r = {} and r = {}", t,
                                                    table.r_ladder[j - 1], table.r_ladder[j]));
        }

        // Least squares for d = s r + c r^2 in the scaled variable rho = r / r_max.
        double s22 = 0, s23 = 0, s24 = 0, b1 = 0, b2 = 0;
        for (std::size_t j = first; j < nr; ++j) {
            const double rho = table.r_ladder[j] / r_max, d = table.at(i, j) - out.lambda_1;
            s22 += rho * rho;
            s23 += rho * rho * rho;
            s24 += rho * rho * rho * rho;
            b1 += rho * d;
            b2 += rho * rho * d;
        }
        SlopeEstimate est{};
        est.t = t;
        est.baseline = (table.at(i, first) - out.lambda_1) / table.r_ladder[first];
        if (nr - first >= 2) {
            const double det = s22 * s24 - s23 * s23;
            const double a = (b1 * s24 - b2 * s23) / det, c = (s22 * b2 - s23 * b1) / det;
            est.s = a / r_max;
            double res = 0.0;
            for (std::size_t j = first; j < nr; ++j) {
                const double rho = table.r_ladder[j] / r_max;
                const double e = table.at(i, j) - out.lambda_1 - a * rho - c * rho * rho;
                res += e * e;
            }
            est.fit_residual = std::sqrt(res);
        } else {
            est.s = est.baseline;
        }
        if (est.s > cfg.slope_tol)
            throw InconsistentTable(fmt::format("slope d lambda / d r at t = {} is {} > 0; the first eigenvalue function "
                                                "must decrease in r",
                                                t, est.s));
        if (est.s > 0.0) {
            est.s = 0.0;
            est.clamped = true;
            ++out.clamp_count;
        }
        out.slopes.push_back(est);
    }
    return out;
}

ReconstructionResult reconstruct_from_slopes(const std::vector<double>& ts, const std::vector<double>& slopes,
                                             double lambda_1, const SolverConfig& cfg) {
    if (ts.size() != slopes.size()) throw ConfigError("t grid and slope list differ in length");
    if (ts.size() < 2 * kMargin + 1)
        throw WindowEmpty(fmt::format("{} t points leave nothing after the {}-point margins", ts.size(), kMargin));
    if (!is_uniform(ts)) throw ConfigError("reconstruction needs a uniform t grid");
    const std::size_t n = ts.size();
    const double step = (ts.back() - ts.front()) / static_cast<double>(n - 1);

    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::sqrt(std::max(0.0, -slopes[i]));
    if (cfg.smooth) phi = smooth_values(phi, step, cfg.smooth_penalty);

    const double phi_max = *std::max_element(phi.begin(), phi.end());
    const double floor = cfg.phi_floor_rel * phi_max;
    const std::size_t lo_idx = kMargin, hi_idx = n - 1 - kMargin;
    std::size_t peak = lo_idx;
    for (std::size_t i = lo_idx; i <= hi_idx; ++i)
        if (phi[i] > phi[peak]) peak = i;
    if (!(phi_max > 0.0) || phi[peak] < floor)
        throw WindowEmpty("no t point inside the stencil margins has phi0 above the floor");
    std::size_t a = peak, b = peak;
    while (a > lo_idx && phi[a - 1] >= floor) --a;
    while (b < hi_idx && phi[b + 1] >= floor) ++b;

    ReconstructionResult out;
    out.lambda_1 = lambda_1;
    out.window = {ts[a], ts[b]};
    out.smoothed = cfg.smooth;
    out.smooth_penalty = cfg.smooth ? cfg.smooth_penalty : 0.0;
    const double h2 = 12.0 * step * step;
    for (std::size_t i = a; i <= b; ++i) {
        const double d2 = (-phi[i - 2] + 16.0 * phi[i - 1] - 30.0 * phi[i] + 16.0 * phi[i + 1] - phi[i + 2]) / h2;
        const double qh = d2 / phi[i] + lambda_1;
        if (!std::isfinite(qh)) throw WindowEmpty(fmt::format("reconstructed q is not finite at x = {}", ts[i]));
        out.xs.push_back(ts[i]);
        out.phi0.push_back(phi[i]);
        out.qhat.push_back(qh);
    }
    out.normalization = out.phi0.size() >= 2 ? simpson_squared(out.phi0, step) : 0.0;
    return out;
}

ReconstructionResult reconstruct(const SampleTable& table, const SolverConfig& cfg) {
    const SlopeReport rep = slope_at_zero(table, cfg);
    std::vector<double> ts, ss;
    for (const auto& e : rep.slopes) {
        ts.push_back(e.t);
        ss.push_back(e.s);
    }
    ReconstructionResult out = reconstruct_from_slopes(ts, ss, rep.lambda_1, cfg);
    out.clamp_count = rep.clamp_count;
    const auto first = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), out.xs.front()) - ts.begin());
    for (std::size_t i = 0; i < out.xs.size(); ++i) out.fit_residuals.push_back(rep.slopes[first + i].fit_residual);
    return out;
}

std::vector<double> find_jumps(const Potential& q, double lo, double hi) {
    std::vector<double> jumps;
    constexpr double kStep = 1e-4;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / kStep));
    if (n < 3) return jumps;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = lo + (hi - lo) * static_cast<double>(i) / n, x1 = lo + (hi - lo) * static_cast<double>(i + 1) / n;
        d[i] = std::fabs(q(x1) - q(x0));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double nb = std::max(i > 0 ? d[i - 1] : 0.0, i + 1 < n ? d[i + 1] : 0.0);
        if (d[i] > 1e-3 && d[i] > 100.0 * nb) {
            double a = lo + (hi - lo) * static_cast<double>(i) / n, b = lo + (hi - lo) * static_cast<double>(i + 1) / n;
            const double qa = q(a), qb = q(b);
            for (int k = 0; k < 60; ++k) {
                const double m = 0.5 * (a + b);
                (std::fabs(q(m) - qa) < std::fabs(q(m) - qb) ? a : b) = m;
            }
            jumps.push_back(0.5 * (a + b));
        }
    }
    return jumps;
}

RoundtripReport roundtrip(const Potential& q, const SolverConfig& cfg, unsigned workers) {
    RoundtripReport rep;
    rep.table = sample(q, cfg, workers);
    rep.result = reconstruct(rep.table, cfg);
    const auto& xs = rep.result.xs;
    for (double x : xs) rep.qtrue.push_back(q(x));
    for (double j : find_jumps(q, rep.result.window.first, rep.result.window.second))
        rep.excluded.emplace_back(j - 0.1, j + 0.1);

    double near_max = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double err = std::fabs(rep.result.qhat[i] - rep.qtrue[i]);
        const bool excluded = std::any_of(rep.excluded.begin(), rep.excluded.end(),
                                          [&](const auto& iv) { return xs[i] >= iv.first && xs[i] <= iv.second; });
        if (excluded) {
            near_max = std::max(near_max, err);
            continue;
        }
        rep.max_error = std::max(rep.max_error, err);
        sum += err;
        ++rep.points;
    }
    rep.mean_error = rep.points ? sum / static_cast<double>(rep.points) : 0.0;
    rep.jump_overshoot = !rep.excluded.empty() && near_max > rep.max_error;
    return rep;
}

}  // namespace ptinv
