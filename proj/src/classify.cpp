#include "ptinv/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ptinv {

std::string to_string(Hypothesis h) {
    switch (h) {
        case Hypothesis::H1_Confining: return "H1_Confining";
        case Hypothesis::H1_BoundedBelow: return "H1_BoundedBelow";
        case Hypothesis::H2_LimitCircle: return "H2_LimitCircle";
        case Hypothesis::Unsupported: return "Unsupported";
    }
    return "Unsupported";
}

namespace {

constexpr std::size_t kTailSamples = 256;

}  // namespace

HypothesisClass classify(const Potential& q, const SolverConfig& cfg, const std::optional<Potential>& g) {
    HypothesisClass out;
    const double b = cfg.b;
    const auto n = static_cast<std::size_t>(std::ceil(b / cfg.h));

    double core_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = std::min(b, static_cast<double>(i) * cfg.h);
        const double v = q(x);
        if (!std::isfinite(v)) {
            out.tag = fmt::format("q is not finite at x = {}", x);
            return out;
        }
        core_min = std::min(core_min, v);
    }
    double tail_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= kTailSamples; ++i) {
        const double x = b + 3.0 * b * static_cast<double>(i) / kTailSamples;
        const double v = q(x);
        if (!std::isfinite(v)) {
            out.tag = fmt::format("q is not finite at tail point x = {}", x);
            return out;
        }
        tail_min = std::min(tail_min, v);
    }

    const double q_b = q(b), q_2b = q(2.0 * b), q_4b = q(4.0 * b);
    // A decrease over [2b,4b] at least as large as over [b,2b] does not level
    // off: the minimum keeps diverging as b grows.
    const double drop_near = q_b - q_2b, drop_far = q_2b - q_4b;
    const bool diverging_down = drop_near > 0.0 && drop_far >= drop_near * (1.0 - 1e-9);

    if (diverging_down) {
        if (g) {
            for (std::size_t i = 0; i <= n; ++i) {
                const double x = std::min(b, static_cast<double>(i) * cfg.h);
                if (!((*g)(x) > 0.0)) {
                    out.tag = fmt::format("g is not positive at x = {}", x);
                    return out;
                }
            }
            out.variant = Hypothesis::H2_LimitCircle;
            out.floor_q0 = std::min(core_min, tail_min);
            out.tail_floor = tail_min;
            out.tag = "q unbounded below on the probe grid; positive g supplied";
            return out;
        }
        out.tag = fmt::format("q unbounded below on the probe grid (q({})={}, q({})={}, q({})={}); "
                              "no eigenvalue below an essential floor can be guaranteed",
                              b, q_b, 2 * b, q_2b, 4 * b, q_4b);
        return out;
    }

    out.floor_q0 = std::min(core_min, tail_min);
    out.tail_floor = tail_min;
    const double scale = std::max(1.0, std::fabs(out.floor_q0));
    const bool rising_tail = q_2b > q_b && q_4b > q_2b;
    if (rising_tail && q_b >= out.floor_q0 + 10.0 * scale) {
        out.variant = Hypothesis::H1_Confining;
        out.tag = fmt::format("bounded below by {}; q({}) = {} is past the confinement threshold", out.floor_q0, b, q_b);
    } else {
        out.variant = Hypothesis::H1_BoundedBelow;
        out.tag = fmt::format("bounded below by {}; bound states must lie below the tail floor {}", out.floor_q0,
                              out.tail_floor);
    }
    return out;
}

}  // namespace ptinv
