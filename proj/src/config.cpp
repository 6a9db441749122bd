#include "ptinv/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "ptinv/errors.hpp"

namespace ptinv {

void SolverConfig::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError(fmt::format("h must be positive, got {}", h));
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError(fmt::format("b must be positive, got {}", b));
    if (!(eig_tol > 0.0)) throw ConfigError(fmt::format("eig_tol must be positive, got {}", eig_tol));
    if (!(b_growth > 1.0)) throw ConfigError(fmt::format("b_growth must exceed 1, got {}", b_growth));
    if (b_max < b) throw ConfigError(fmt::format("b_max ({}) below b ({})", b_max, b));
    if (h >= b) throw ConfigError("h must be smaller than b");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0) throw ConfigError(fmt::format("t_grid entry {} is negative", t_grid[i]));
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ConfigError("t_grid must be strictly increasing");
    }
    if (!t_grid.empty() && !(b > t_grid.back()))
        throw ConfigError(fmt::format("b ({}) must exceed max(t_grid) ({})", b, t_grid.back()));
    for (std::size_t i = 0; i < r_ladder.size(); ++i) {
        if (!(r_ladder[i] > 0.0)) throw ConfigError(fmt::format("r_ladder entry {} is not positive", r_ladder[i]));
        if (i > 0 && !(r_ladder[i] < r_ladder[i - 1]))
            throw ConfigError("r_ladder must be strictly decreasing");
    }
    if (!has_auto_r_cap() && !r_ladder.empty() && r_ladder.front() > r_cap)
        throw ConfigError(fmt::format("max(r_ladder) = {} exceeds r_cap = {}", r_ladder.front(), r_cap));
    if (!(phi_floor_rel > 0.0 && phi_floor_rel < 1.0)) throw ConfigError("phi_floor_rel must lie in (0,1)");
    if (!(slope_tol >= 0.0)) throw ConfigError("slope_tol must be non-negative");
    if (!(smooth_penalty > 0.0)) throw ConfigError("smooth_penalty must be positive");
}

std::vector<double> SolverConfig::uniform_grid(double t_min, double t_max, double step) {
    if (!(step > 0.0)) throw ConfigError("t-step must be positive");
    if (t_max < t_min) throw ConfigError("t-max below t-min");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9));
    grid.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(t_min + static_cast<double>(i) * step);
    return grid;
}

void to_json(nlohmann::json& j, const SolverConfig& cfg) {
    j = nlohmann::json{{"b", cfg.b},
                       {"h", cfg.h},
                       {"eig_tol", cfg.eig_tol},
                       {"b_growth", cfg.b_growth},
                       {"b_max", cfg.b_max},
                       {"t_grid", cfg.t_grid},
                       {"r_ladder", cfg.r_ladder},
                       {"r_cap", cfg.r_cap},
                       {"lambda_floor", cfg.lambda_floor},
                       {"slope_tol", cfg.slope_tol},
                       {"phi_floor_rel", cfg.phi_floor_rel},
                       {"smooth", cfg.smooth},
                       {"smooth_penalty", cfg.smooth_penalty}};
}

void from_json(const nlohmann::json& j, SolverConfig& cfg) {
    const auto take = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    take("b", cfg.b);
    take("h", cfg.h);
    take("eig_tol", cfg.eig_tol);
    take("b_growth", cfg.b_growth);
    take("b_max", cfg.b_max);
    take("t_grid", cfg.t_grid);
    take("r_ladder", cfg.r_ladder);
    take("r_cap", cfg.r_cap);
    take("lambda_floor", cfg.lambda_floor);
    take("slope_tol", cfg.slope_tol);
    take("phi_floor_rel", cfg.phi_floor_rel);
    take("smooth", cfg.smooth);
    take("smooth_penalty", cfg.smooth_penalty);
}

std::string config_hash(const SolverConfig& cfg) {
    const std::string text = nlohmann::json(cfg).dump();
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return fmt::format("{:016x}", hash);
}

}  // namespace ptinv
