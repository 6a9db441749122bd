#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ptinv {

/// Numerical controls shared by every solver stage.
struct SolverConfig {
    double b = 8.0;          // initial truncation radius
    double h = 1e-3;         // integration step
    double eig_tol = 1e-9;   // eigenvalue tolerance (also b-escalation criterion)
    double b_growth = 2.0;   // escalation factor for b
    double b_max = 128.0;    // hard cap on escalated b
    std::vector<double> t_grid = uniform_grid(0.1, 3.5, 0.05);  // interaction positions, increasing
    std::vector<double> r_ladder = {0.04, 0.02, 0.01};  // coupling constants, decreasing
    double r_cap = 0.0;      // <= 0: derived from lambda_1 and the floor estimate
    double lambda_floor = -1e300;  // <= -1e299: derived from the potential minimum

    // Reconstruction controls.
    double slope_tol = 1e-6;       // positive slopes up to this are clamped to 0
    double phi_floor_rel = 1e-3;   // window keeps phi0 >= phi_floor_rel * max phi0
    bool smooth = false;           // penalized smoothing of phi0 before differencing
    double smooth_penalty = 1e-6;  // roughness weight of the smoother

    bool has_auto_r_cap() const { return r_cap <= 0.0; }
    bool has_auto_lambda_floor() const { return lambda_floor <= -1e299; }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
    /// Uniform grid t_min, t_min + step, ... up to t_max (inclusive within 1e-9 step).
    static std::vector<double> uniform_grid(double t_min, double t_max, double step);
};

void to_json(nlohmann::json& j, const SolverConfig& cfg);
void from_json(const nlohmann::json& j, SolverConfig& cfg);

/// Stable 64-bit FNV-1a digest of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const SolverConfig& cfg);

}  // namespace ptinv
