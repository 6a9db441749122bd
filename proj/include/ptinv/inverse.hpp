#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptinv/config.hpp"
#include "ptinv/potential.hpp"

namespace ptinv {

struct SampleEntry {
    double t;
    double r;
    double lambda;
};

/// Observed first eigenvalue function on a (t, r) grid. Entries are ordered by
/// t, then by r ascending; r_ladder here is ascending and starts with 0 when
/// the r = 0 row is present.
struct SampleTable {
    std::vector<SampleEntry> entries;
    std::vector<double> t_grid;
    std::vector<double> r_ladder;
    std::optional<double> lambda_1;  // metadata; used when there is no r = 0 row
    nlohmann::json meta;             // generating configuration, or "external"

    double at(std::size_t ti, std::size_t ri) const { return entries[ti * r_ladder.size() + ri].lambda; }
    /// Rebuild t_grid / r_ladder from the entries and sort them. Throws
    /// InconsistentTable when the grid is not full.
    void index();
};

/// Fill t_grid x ({0} U r_ladder) with lambda(t, r). Work is spread over
/// `workers` threads; the output order does not depend on it.
SampleTable sample(const Potential& q, const SolverConfig& cfg, unsigned workers = 1);

struct SlopeEstimate {
    double t;
    double s;         // d lambda / d r at r = 0, after clamping
    double baseline;  // single-rung estimate at the smallest r
    double fit_residual;
    bool clamped;
};

struct SlopeReport {
    std::vector<SlopeEstimate> slopes;
    double lambda_1;
    int clamp_count = 0;
};

/// Checks the table invariants (InconsistentTable on violation) and fits
/// lambda = lambda_1 + s r + c r^2 per t.
SlopeReport slope_at_zero(const SampleTable& table, const SolverConfig& cfg);

struct ReconstructionResult {
    std::vector<double> xs;
    std::vector<double> phi0;
    std::vector<double> qhat;
    std::pair<double, double> window{0.0, 0.0};
    double lambda_1 = 0.0;

    // Diagnostics.
    std::vector<double> fit_residuals;  // per window point
    int clamp_count = 0;
    bool smoothed = false;
    double smooth_penalty = 0.0;
    double normalization = 0.0;  // integral of phi0^2 over the window
};

ReconstructionResult reconstruct(const SampleTable& table, const SolverConfig& cfg);
/// Reconstruction from slopes on a uniform t grid (bypasses the table).
ReconstructionResult reconstruct_from_slopes(const std::vector<double>& ts, const std::vector<double>& slopes,
                                             double lambda_1, const SolverConfig& cfg);

struct RoundtripReport {
    SampleTable table;
    ReconstructionResult result;
    std::vector<double> qtrue;                         // on result.xs
    std::vector<std::pair<double, double>> excluded;   // neighborhoods of jumps of q
    bool jump_overshoot = false;  // error near a jump exceeds the error elsewhere
    double max_error = 0.0;
    double mean_error = 0.0;
    std::size_t points = 0;
};

RoundtripReport roundtrip(const Potential& q, const SolverConfig& cfg, unsigned workers = 1);

/// Jump locations of q in [lo, hi] found by a fine scan.
std::vector<double> find_jumps(const Potential& q, double lo, double hi);

}  // namespace ptinv
