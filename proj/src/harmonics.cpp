#include "cavityflow/harmonics.hpp"

#include <cmath>

namespace cavityflow {

namespace {

// pi_l^m(t) = P_l^m(t) / (1-t^2)^{m/2} without the Condon-Shortley factor;
// a polynomial of degree l-m with the parity of l-m.
std::vector<double> assoc_legendre_reduced(int l, int m) {
    double dd = 1.0;
    for (int i = 1; i < 2 * m; i += 2) dd *= static_cast<double>(i);
    std::vector<double> pmm{dd};
    if (l == m) return pmm;
    std::vector<double> pm1{0.0, (2 * m + 1) * dd}; // (2m+1) t pi_m^m
    if (l == m + 1) return pm1;
    for (int ll = m + 2; ll <= l; ++ll) {
        std::vector<double> cur(static_cast<std::size_t>(ll - m) + 1, 0.0);
        const double a = static_cast<double>(2 * ll - 1) / static_cast<double>(ll - m);
        const double b = static_cast<double>(ll - 1 + m) / static_cast<double>(ll - m);
        for (std::size_t i = 0; i < pm1.size(); ++i) cur[i + 1] += a * pm1[i];
        for (std::size_t i = 0; i < pmm.size(); ++i) cur[i] -= b * pmm[i];
        pmm = std::move(pm1);
        pm1 = std::move(cur);
    }
    return pm1;
}

// Re/Im of (x + i y)^m as polynomials in (x, y).
Poly3 sectoral(int m, bool cosine) {
    Poly3 out;
    for (int t = 0; t <= m; ++t) {
        const bool even = (t % 2 == 0);
        if (cosine != even) continue;
        double c = 1.0;
        for (int i = 0; i < t; ++i) c *= static_cast<double>(m - i) / static_cast<double>(i + 1);
        const int half = cosine ? t / 2 : (t - 1) / 2;
        if (half % 2 == 1) c = -c;
        Poly3 term = Poly3::constant(c);
        for (int i = 0; i < m - t; ++i) term = term * Poly3::variable(0);
        for (int i = 0; i < t; ++i) term = term * Poly3::variable(1);
        out += term;
    }
    return out;
}

} // namespace

SolidHarmonic real_solid_harmonic(int l, int m) {
    if (l < 0 || std::abs(m) > l) throw ConfigError("solid harmonic requires 0 <= |m| <= l");
    const int am = std::abs(m);

    double ratio = 1.0; // (l-|m|)! / (l+|m|)!
    for (int i = l - am + 1; i <= l + am; ++i) ratio /= static_cast<double>(i);
    double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI) * ratio);
    if (m != 0) norm *= std::sqrt(2.0);

    const std::vector<double> pi = assoc_legendre_reduced(l, am);
    const Poly3 trig = (am == 0) ? Poly3::constant(1.0) : sectoral(am, m > 0);
    const Poly3 r2 = Poly3::variable(0) * Poly3::variable(0) +
                     Poly3::variable(1) * Poly3::variable(1) +
                     Poly3::variable(2) * Poly3::variable(2);

    // r^l Y_lm = N * trig_m(x,y) * sum_k c_k z^k (x^2+y^2+z^2)^{(l-|m|-k)/2}
    Poly3 radial;
    for (std::size_t k = 0; k < pi.size(); ++k) {
        if (pi[k] == 0.0) continue;
        const int p = l - am - static_cast<int>(k);
        Poly3 term = Poly3::constant(pi[k]);
        for (std::size_t i = 0; i < k; ++i) term = term * Poly3::variable(2);
        for (int i = 0; i < p / 2; ++i) term = term * r2;
        radial += term;
    }

    SolidHarmonic sh;
    sh.l = l;
    sh.m = m;
    sh.value = (trig * radial) * norm;
    for (int a = 0; a < 3; ++a) sh.grad[a] = sh.value.derivative(a);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) sh.hess[a][b] = sh.grad[a].derivative(b);
    return sh;
}

} // namespace cavityflow
