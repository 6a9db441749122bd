#include "ptinv/quadrature.hpp"

#include <vector>

#include "ptinv/errors.hpp"

namespace ptinv {

double simpson(std::span<const double> f, double step) {
    if (f.size() < 2) throw ConfigError("simpson needs at least two samples");
    const std::size_t n = f.size() - 1;  // intervals
    if (n == 1) return 0.5 * step * (f[0] + f[1]);
    const std::size_t even = n % 2 == 0 ? n : n - 3;
    double sum = 0.0;
    if (even > 0) {
        double acc = f[0] + f[even];
        for (std::size_t i = 1; i < even; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
        sum = acc * step / 3.0;
    }
    if (even != n) sum += 3.0 * step / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
    return sum;
}

double simpson_squared(std::span<const double> values, double step) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
    return simpson(sq, step);
}

}  // namespace ptinv
