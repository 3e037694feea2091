#include "cavityflow/polynomial.hpp"

namespace cavityflow {

namespace {

// Coefficient recurrences evaluated once per (family, j); degrees stay small.
Poly1 legendre_shifted(int j) {
    // P_j(2s - 1): three-term recurrence directly in the shifted variable.
    Poly1 t({-1.0, 2.0}); // 2s - 1
    Poly1 pm1 = Poly1::constant(1.0);
    if (j == 0) return pm1;
    Poly1 p = t;
    for (int n = 1; n < j; ++n) {
        // (n+1) P_{n+1} = (2n+1) t P_n - n P_{n-1}
        Poly1 next = (t * p * static_cast<double>(2 * n + 1) - pm1 * static_cast<double>(n)) *
                     (1.0 / static_cast<double>(n + 1));
        pm1 = p;
        p = next;
    }
    return p;
}

Poly1 chebyshev_shifted(int j) {
    Poly1 t({-1.0, 2.0});
    Poly1 pm1 = Poly1::constant(1.0);
    if (j == 0) return pm1;
    Poly1 p = t;
    for (int n = 1; n < j; ++n) {
        Poly1 next = t * p * 2.0 - pm1;
        pm1 = p;
        p = next;
    }
    return p;
}

} // namespace

Poly1 radial_polynomial(RadialFamily family, int j) {
    if (j < 0) throw ConfigError("radial polynomial index must be nonnegative");
    switch (family) {
        case RadialFamily::ShiftedLegendre: return legendre_shifted(j);
        case RadialFamily::ShiftedChebyshev: return chebyshev_shifted(j);
        case RadialFamily::Monomial: {
            std::vector<double> c(static_cast<std::size_t>(j) + 1, 0.0);
            c.back() = 1.0;
            return Poly1(std::move(c));
        }
    }
    throw ConfigError("unknown radial family");
}

const char* radial_family_name(RadialFamily family) {
    switch (family) {
        case RadialFamily::ShiftedLegendre: return "legendre";
        case RadialFamily::ShiftedChebyshev: return "chebyshev";
        case RadialFamily::Monomial: return "monomial";
    }
    return "?";
}

RadialFamily radial_family_from_name(const std::string& name) {
    if (name == "legendre") return RadialFamily::ShiftedLegendre;
    if (name == "chebyshev") return RadialFamily::ShiftedChebyshev;
    if (name == "monomial") return RadialFamily::Monomial;
    throw ConfigError("unknown radial family '" + name + "' (expected legendre|chebyshev|monomial)");
}

} // namespace cavityflow
