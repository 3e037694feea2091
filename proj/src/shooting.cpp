#include "cavityflow/shooting.hpp"

#include <cmath>
#include <functional>

namespace cavityflow {

namespace {

double sph_bessel_deriv(int l, double x) {
    return std::sph_bessel(static_cast<unsigned>(l - 1), x) -
           (l + 1.0) / x * std::sph_bessel(static_cast<unsigned>(l), x);
}

double characteristic(Family family, int l, double nu, double zeta, double x) {
    const double j = std::sph_bessel(static_cast<unsigned>(l), x);
    const double jp = sph_bessel_deriv(l, x);
    if (family == Family::Toroidal) return nu * x * jp + (zeta - nu) * j;
    // Poloidal combination of f = A j_l(x r) + B r^l with f(1) = 0 and the
    // slip condition on g = f' + f/r; x = 0 is a double root of the raw
    // determinant (the two solutions coincide there), hence the x^2 division
    // by callers when scanning near the origin.
    return (zeta - 2.0 * nu) * x * jp + (nu * (2.0 * l - x * x) - zeta * l) * j;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a < 1e-15 * std::max(1.0, std::abs(a))) break;
    }
    return 0.5 * (a + b);
}

} // namespace

double shooting_oracle(Family family, int l, const FluidParams& params, int k) {
    params.validate();
    if (l < 1) throw ConfigError("shooting_oracle: l must be >= 1");
    if (k < 1) throw ConfigError("shooting_oracle: k must be >= 1");

    const double scale = std::max({1.0, params.nu, params.zeta});
    auto g = [&](double x) {
        return characteristic(family, l, params.nu, params.zeta, x) / (scale * x * x);
    };

    const double x_hi = (k + l + 3) * M_PI + 5.0;
    const double dx = 0.01;
    int found = 0;
    double prev_x = 0.2;
    double prev_g = g(prev_x);
    for (double x = prev_x + dx; x <= x_hi; x += dx) {
        const double cur = g(x);
        if ((prev_g < 0.0) != (cur < 0.0)) {
            ++found;
            if (found == k) {
                const double root = bisect(g, prev_x, x);
                return params.nu * root * root;
            }
        }
        prev_x = x;
        prev_g = cur;
    }
    throw NumericalError("shooting_oracle: failed to bracket the requested root");
}

} // namespace cavityflow
