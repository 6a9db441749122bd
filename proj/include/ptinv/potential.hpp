#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptinv/expression.hpp"

namespace ptinv {

enum class Interpolation {
    Linear,
    MonotoneCubic,  // Fritsch-Carlson, shape preserving
    CubicSpline,    // C2 spline, end slopes from one-sided 4-point stencils
};

/// A real coefficient function on [0, domain_hint], given either as an
/// expression in x or as a knot table. Immutable and cheap to copy.
class Potential {
public:
    class Impl;

    static Potential analytic(std::string_view expression);
    static Potential tabulated(std::vector<double> xs, std::vector<double> qs,
                               Interpolation rule = Interpolation::MonotoneCubic);

    double operator()(double x) const;
    /// First and second derivative. Throws ConfigError for a linear table
    /// (no second derivative) when `second` is called.
    double first(double x) const;
    double second(double x) const;
    bool has_second_derivative() const;

    /// Right endpoint of reliable definition; +inf for expressions.
    double domain_hint() const;
    /// Human-readable description, the source expression for analytic form.
    const std::string& description() const;

private:
    explicit Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Parse a textual potential: an expression in x, or "table:<path>[:linear|:cubic|:spline]"
/// naming a CSV file with columns x,q. A bare path ending in .csv is also read
/// as a table.
Potential parse_potential(std::string_view description);

/// Read an x,q knot table (header line required).
Potential read_potential_table(const std::string& path, Interpolation rule);

}  // namespace ptinv
