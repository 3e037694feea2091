#pragma once

#include "cavityflow/harmonics.hpp"
#include "cavityflow/quadrature.hpp"

#include <memory>
#include <vector>

namespace cavityflow {

/// Trial-field family. Toroidal fields curl(x g Y_lm) are tangential everywhere;
/// poloidal fields curl curl(x h Y_lm) get a (1-r^2) radial factor so their
/// normal trace vanishes on the sphere. Both are exactly divergence-free.
enum class Family { Toroidal, Poloidal };

struct FamilySet {
    bool toroidal = true;
    bool poloidal = true;

    bool empty() const { return !toroidal && !poloidal; }
    bool has(Family f) const { return f == Family::Toroidal ? toroidal : poloidal; }
    static FamilySet both() { return {true, true}; }
    static FamilySet only(Family f) {
        return f == Family::Toroidal ? FamilySet{true, false} : FamilySet{false, true};
    }
};

struct BasisFunction {
    Family family = Family::Toroidal;
    int degree_l = 1;   // spherical-harmonic degree, >= 1
    int order_m = 0;    // in [-l, l]
    int radial_j = 0;   // radial polynomial index, >= 0
};

/// Divergence-free, impermeable trial fields in the unit ball with cached
/// values, gradients and boundary traces on a shared quadrature grid.
///
/// Cached layouts (column = basis function):
///   values:    (3 * n_volume)  x n  -- components fastest
///   gradients: (9 * n_volume)  x n  -- d_j v_i at offset 9p + 3j + i
///   traces:    (3 * n_surface) x n
class BasisSet {
public:
    BasisSet(std::vector<BasisFunction> functions, QuadratureGrid grid, RadialFamily radial);

    std::size_t size() const { return functions_.size(); }
    const std::vector<BasisFunction>& functions() const { return functions_; }
    const QuadratureGrid& grid() const { return grid_; }
    RadialFamily radial_family() const { return radial_; }
    int l_max() const { return l_max_; }
    int n_rad() const { return n_rad_; }

    const Eigen::MatrixXd& values() const { return values_; }
    const Eigen::MatrixXd& gradients() const { return gradients_; }
    const Eigen::MatrixXd& traces() const { return traces_; }

    /// Direct pointwise evaluation (no cache); used by tests to validate the cache.
    Vec3 evaluate(std::size_t i, const Vec3& x) const;
    Mat3 evaluate_gradient(std::size_t i, const Vec3& x) const;

    /// Indices of the (family, l, m) block, ordered by radial index.
    std::vector<int> block(Family family, int l, int m) const;

private:
    struct Profile {
        Poly1 u, du, ddu; // radial profile in s = r^2 and derivatives
    };
    const Profile& profile(const BasisFunction& f) const;

    std::vector<BasisFunction> functions_;
    QuadratureGrid grid_;
    RadialFamily radial_;
    int l_max_ = 0;
    int n_rad_ = 0;
    std::vector<SolidHarmonic> harmonics_; // indexed by harmonic_index(l, m)
    std::vector<Profile> profiles_;        // [toroidal j..][poloidal j..]
    Eigen::MatrixXd values_, gradients_, traces_;

    int harmonic_index(int l, int m) const { return (l - 1) * (l - 1) + 2 * (l - 1) + (m + l); }
    void evaluate_cache();
};

/// Build the full trial family for l = 1..l_max, m = -l..l, j = 0..n_rad-1.
BasisSet build_basis(int l_max, int n_rad, FamilySet families,
                     RadialFamily radial = RadialFamily::ShiftedLegendre);

} // namespace cavityflow
