#pragma once

#include <optional>
#include <string>

#include "ptinv/config.hpp"
#include "ptinv/potential.hpp"

namespace ptinv {

enum class Hypothesis {
    H1_Confining,     // bounded below and q -> +inf
    H1_BoundedBelow,  // bounded below; only eigenvalues under the essential floor count
    H2_LimitCircle,   // handled through a user-supplied positive g
    Unsupported,
};

std::string to_string(Hypothesis h);

/// Grid-heuristic endpoint classification. `floor_q0` is the infimum of q over
/// the probe grid (the q0 of the essential-spectrum bound). `tail_floor` is the
/// infimum over the tail scan [b, 4b] only, used as the threshold below which
/// an eigenvalue is a genuine bound state.
struct HypothesisClass {
    Hypothesis variant = Hypothesis::Unsupported;
    double floor_q0 = 0.0;
    double tail_floor = 0.0;
    std::string tag;
    bool heuristic = true;

    bool is_h1() const {
        return variant == Hypothesis::H1_Confining || variant == Hypothesis::H1_BoundedBelow;
    }
};

HypothesisClass classify(const Potential& q, const SolverConfig& cfg,
                         const std::optional<Potential>& g = std::nullopt);

}  // namespace ptinv
