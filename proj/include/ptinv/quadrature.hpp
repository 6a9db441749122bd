#pragma once

#include <span>

namespace ptinv {

/// Composite Simpson rule for samples on a uniform grid of spacing `step`.
/// An odd interval count closes with the 3/8 rule on the last three intervals.
double simpson(std::span<const double> values, double step);

/// Same rule applied to the squares of the samples.
double simpson_squared(std::span<const double> values, double step);

}  // namespace ptinv
