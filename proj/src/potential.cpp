#include "ptinv/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ptinv/errors.hpp"

namespace ptinv {

class Potential::Impl {
public:
    virtual ~Impl() = default;
    virtual double value(double x) const = 0;
    virtual double first(double x) const = 0;
    virtual double second(double x) const = 0;
    virtual bool has_second() const = 0;
    virtual double domain_hint() const = 0;
    std::string description;
};

namespace {

class AnalyticImpl final : public Potential::Impl {
public:
    explicit AnalyticImpl(expr::Expression e)
        : f_(e), d1_(e.derivative()), d2_(d1_.derivative()) {
        description = f_.source();
    }
    double value(double x) const override { return f_(x); }
    double first(double x) const override { return d1_(x); }
    double second(double x) const override { return d2_(x); }
    bool has_second() const override { return true; }
    double domain_hint() const override { return std::numeric_limits<double>::infinity(); }

private:
    expr::Expression f_;
    expr::Expression d1_;
    expr::Expression d2_;
};

// Derivative at xs[0] of the interpolating polynomial through the first
// min(4, n) knots.
double one_sided_slope(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t m = std::min<std::size_t>(4, xs.size());
    double slope = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        // d/dx of the Lagrange basis l_j at x0
        double dl = 0.0;
        if (j == 0) {
            for (std::size_t k = 1; k < m; ++k) dl += 1.0 / (xs[0] - xs[k]);
        } else {
            double prod = 1.0 / (xs[j] - xs[0]);
            for (std::size_t k = 1; k < m; ++k)
                if (k != j) prod *= (xs[0] - xs[k]) / (xs[j] - xs[k]);
            dl = prod;
        }
        slope += ys[j] * dl;
    }
    return slope;
}

class TableImpl final : public Potential::Impl {
public:
    TableImpl(std::vector<double> xs, std::vector<double> ys, Interpolation rule)
        : xs_(std::move(xs)), ys_(std::move(ys)), rule_(rule) {
        if (xs_.size() != ys_.size()) throw ParseError("knot table: x and q columns differ in length");
        if (xs_.size() < 2) throw ParseError("knot table needs at least two knots");
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
                throw ParseError(fmt::format("knot table: non-real value at row {}", i));
            if (i > 0 && !(xs_[i] > xs_[i - 1]))
                throw ParseError(fmt::format("knot table: abscissae not strictly increasing at row {}", i));
        }
        if (rule_ == Interpolation::MonotoneCubic) fritsch_carlson();
        if (rule_ == Interpolation::CubicSpline) clamped_spline();
        static constexpr const char* names[] = {"linear", "monotone cubic", "cubic spline"};
        description = fmt::format("table[{} knots, {}]", xs_.size(), names[static_cast<int>(rule_)]);
    }

    double value(double x) const override { return eval(x, 0); }
    double first(double x) const override { return eval(x, 1); }
    double second(double x) const override {
        if (rule_ == Interpolation::Linear)
            throw ConfigError("linear knot table has no second derivative; use spline interpolation");
        return eval(x, 2);
    }
    bool has_second() const override { return rule_ != Interpolation::Linear; }
    double domain_hint() const override { return xs_.back(); }

private:
    void fritsch_carlson() {
        const std::size_t n = xs_.size();
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = xs_[i + 1] - xs_[i];
            delta[i] = (ys_[i + 1] - ys_[i]) / h[i];
        }
        slopes_.assign(n, 0.0);
        slopes_[0] = delta[0];
        slopes_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) continue;
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }

    void clamped_spline() {
        const std::size_t n = xs_.size();
        slopes_.assign(n, 0.0);
        std::vector<double> rx(xs_.rbegin(), xs_.rend()), ry(ys_.rbegin(), ys_.rend());
        slopes_[0] = one_sided_slope(xs_, ys_);
        slopes_[n - 1] = one_sided_slope(rx, ry);
        if (n == 2) return;
        // Tridiagonal system for interior slopes (C2 continuity), Thomas algorithm.
        const std::size_t m = n - 2;
        std::vector<double> a(m), b(m), c(m), d(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            const double h0 = xs_[i] - xs_[i - 1];
            const double h1 = xs_[i + 1] - xs_[i];
            const double d0 = (ys_[i] - ys_[i - 1]) / h0;
            const double d1 = (ys_[i + 1] - ys_[i]) / h1;
            a[k] = h1;
            b[k] = 2.0 * (h0 + h1);
            c[k] = h0;
            d[k] = 3.0 * (h1 * d0 + h0 * d1);
        }
        d[0] -= a[0] * slopes_[0];
        d[m - 1] -= c[m - 1] * slopes_[n - 1];
        for (std::size_t k = 1; k < m; ++k) {
            const double w = a[k] / b[k - 1];
            b[k] -= w * c[k - 1];
            d[k] -= w * d[k - 1];
        }
        slopes_[m] = d[m - 1] / b[m - 1];
        for (std::size_t k = m - 1; k-- > 0;) slopes_[k + 1] = (d[k] - c[k] * slopes_[k + 2]) / b[k];
    }

    double eval(double x, int order) const {
        if (x <= xs_.front()) return order == 0 ? ys_.front() : 0.0;
        if (x >= xs_.back()) return order == 0 ? ys_.back() : 0.0;
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
        const double h = xs_[i + 1] - xs_[i];
        const double s = (x - xs_[i]) / h;
        const double y0 = ys_[i], y1 = ys_[i + 1];
        if (rule_ == Interpolation::Linear) {
            if (order == 0) return y0 + s * (y1 - y0);
            return order == 1 ? (y1 - y0) / h : 0.0;
        }
        const double d0 = slopes_[i], d1 = slopes_[i + 1];
        const double s2 = s * s, s3 = s2 * s;
        switch (order) {
            case 0:
                return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
                       (s3 - s2) * h * d1;
            case 1:
                return ((6 * s2 - 6 * s) * y0 + (-6 * s2 + 6 * s) * y1) / h + (3 * s2 - 4 * s + 1) * d0 +
                       (3 * s2 - 2 * s) * d1;
            default:
                return ((12 * s - 6) * y0 + (-12 * s + 6) * y1) / (h * h) +
                       ((6 * s - 4) * d0 + (6 * s - 2) * d1) / h;
        }
    }

    std::vector<double> xs_;
    std::vector<double> ys_;
    Interpolation rule_;
    std::vector<double> slopes_;
};

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

Potential Potential::analytic(std::string_view expression) {
    return Potential(std::make_shared<AnalyticImpl>(expr::Expression::parse(expression)));
}

Potential Potential::tabulated(std::vector<double> xs, std::vector<double> qs, Interpolation rule) {
    return Potential(std::make_shared<TableImpl>(std::move(xs), std::move(qs), rule));
}

double Potential::operator()(double x) const { return impl_->value(x); }
double Potential::first(double x) const { return impl_->first(x); }
double Potential::second(double x) const { return impl_->second(x); }
bool Potential::has_second_derivative() const { return impl_->has_second(); }
double Potential::domain_hint() const { return impl_->domain_hint(); }
const std::string& Potential::description() const { return impl_->description; }

Potential read_potential_table(const std::string& path, Interpolation rule) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open knot table '{}'", path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(fmt::format("knot table '{}' is empty", path));
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
    }
    const auto col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError(fmt::format("knot table '{}' lacks column '{}'", path, name));
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cx = col("x"), cq = col("q");
    std::vector<double> xs, qs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() <= std::max(cx, cq))
            throw ParseError(fmt::format("knot table '{}': short row {}", path, row));
        try {
            xs.push_back(std::stod(cells[cx]));
            qs.push_back(std::stod(cells[cq]));
        } catch (const std::exception&) {
            throw ParseError(fmt::format("knot table '{}': non-numeric value at row {}", path, row));
        }
    }
    return Potential::tabulated(std::move(xs), std::move(qs), rule);
}

Potential parse_potential(std::string_view description) {
    std::string text = trim(std::string(description));
    if (text.empty()) throw ParseError("empty potential description");
    Interpolation rule = Interpolation::MonotoneCubic;
    std::string path;
    if (text.rfind("table:", 0) == 0) {
        path = text.substr(6);
        const auto colon = path.rfind(':');
        if (colon != std::string::npos) {
            const std::string suffix = path.substr(colon + 1);
            if (suffix == "linear") rule = Interpolation::Linear;
            else if (suffix == "cubic") rule = Interpolation::MonotoneCubic;
            else if (suffix == "spline") rule = Interpolation::CubicSpline;
            if (suffix == "linear" || suffix == "cubic" || suffix == "spline") path.resize(colon);
        }
    } else if (text.size() > 4 && text.substr(text.size() - 4) == ".csv") {
        path = text;
    }
    if (!path.empty()) return read_potential_table(path, rule);
    return Potential::analytic(text);
}

}  // namespace ptinv
