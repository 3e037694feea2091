#pragma once

#include "cavityflow/types.hpp"

#include <array>
#include <map>
#include <vector>

namespace cavityflow {

/// Dense univariate polynomial, coefficients in ascending powers.
class Poly1 {
public:
    Poly1() = default;
    explicit Poly1(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly1 constant(double v) { return Poly1({v}); }

    double eval(double s) const {
        double r = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * s + *it;
        return r;
    }

    Poly1 derivative() const {
        if (c_.size() <= 1) return Poly1();
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Poly1(std::move(d));
    }

    int degree() const { return c_.empty() ? 0 : static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }

    Poly1 operator*(const Poly1& o) const {
        if (c_.empty() || o.c_.empty()) return Poly1();
        std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
        return Poly1(std::move(r));
    }

    Poly1 operator+(const Poly1& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
        return Poly1(std::move(r));
    }

    Poly1 operator-(const Poly1& o) const {
        std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
        return Poly1(std::move(r));
    }

    Poly1 operator*(double a) const {
        std::vector<double> r = c_;
        for (double& v : r) v *= a;
        return Poly1(std::move(r));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

/// Polynomial family for radial profiles q_j(s), s = r^2 on [0,1].
enum class RadialFamily { ShiftedLegendre, ShiftedChebyshev, Monomial };

/// q_j of the requested family. Legendre/Chebyshev are shifted to [0,1];
/// any family spanning the same space yields the same eigenvalues.
Poly1 radial_polynomial(RadialFamily family, int j);

const char* radial_family_name(RadialFamily family);
RadialFamily radial_family_from_name(const std::string& name);

/// Sparse trivariate polynomial in (x,y,z); exponent triple -> coefficient.
class Poly3 {
public:
    using Key = std::array<int, 3>;

    Poly3() = default;

    static Poly3 constant(double v) {
        Poly3 p;
        if (v != 0.0) p.terms_[{0, 0, 0}] = v;
        return p;
    }
    static Poly3 variable(int axis) {
        Poly3 p;
        Key k{0, 0, 0};
        k[axis] = 1;
        p.terms_[k] = 1.0;
        return p;
    }

    Poly3& operator+=(const Poly3& o) {
        for (const auto& [k, v] : o.terms_) add_term(k, v);
        return *this;
    }
    Poly3 operator+(const Poly3& o) const {
        Poly3 r = *this;
        r += o;
        return r;
    }
    Poly3 operator*(const Poly3& o) const {
        Poly3 r;
        for (const auto& [k1, v1] : terms_)
            for (const auto& [k2, v2] : o.terms_)
                r.add_term({k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]}, v1 * v2);
        return r;
    }
    Poly3 operator*(double a) const {
        Poly3 r;
        if (a == 0.0) return r;
        for (const auto& [k, v] : terms_) r.terms_[k] = v * a;
        return r;
    }

    Poly3 derivative(int axis) const {
        Poly3 r;
        for (const auto& [k, v] : terms_) {
            if (k[axis] == 0) continue;
            Key kk = k;
            const double c = v * static_cast<double>(kk[axis]);
            kk[axis] -= 1;
            r.add_term(kk, c);
        }
        return r;
    }

    double eval(const Vec3& x) const {
        double r = 0.0;
        for (const auto& [k, v] : terms_)
            r += v * ipow(x.x(), k[0]) * ipow(x.y(), k[1]) * ipow(x.z(), k[2]);
        return r;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [k, v] : terms_) d = std::max(d, k[0] + k[1] + k[2]);
        return d;
    }

    bool empty() const { return terms_.empty(); }
    const std::map<Key, double>& terms() const { return terms_; }

private:
    static double ipow(double b, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }
    void add_term(const Key& k, double v) {
        auto [it, inserted] = terms_.try_emplace(k, v);
        if (!inserted) {
            it->second += v;
            if (it->second == 0.0) terms_.erase(it);
        }
    }
    std::map<Key, double> terms_;
};

} // namespace cavityflow
