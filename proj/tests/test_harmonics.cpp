#include "cavityflow/harmonics.hpp"
#include "cavityflow/quadrature.hpp"
#include "cavityflow/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cavityflow;

TEST_CASE("low-degree solid harmonics match closed forms") {
    const Vec3 x(0.3, -0.5, 0.7);
    const SolidHarmonic y10 = real_solid_harmonic(1, 0);
    CHECK(y10.value.eval(x) == doctest::Approx(std::sqrt(3.0 / (4.0 * M_PI)) * x.z()));

    const SolidHarmonic y11 = real_solid_harmonic(1, 1);
    CHECK(y11.value.eval(x) == doctest::Approx(std::sqrt(3.0 / (4.0 * M_PI)) * x.x()));

    const SolidHarmonic y1m1 = real_solid_harmonic(1, -1);
    CHECK(y1m1.value.eval(x) == doctest::Approx(std::sqrt(3.0 / (4.0 * M_PI)) * x.y()));

    // r^2 Y_20 = sqrt(5/16pi) (2z^2 - x^2 - y^2)
    const SolidHarmonic y20 = real_solid_harmonic(2, 0);
    CHECK(y20.value.eval(x) ==
          doctest::Approx(std::sqrt(5.0 / (16.0 * M_PI)) *
                          (2 * x.z() * x.z() - x.x() * x.x() - x.y() * x.y())));
}

TEST_CASE("solid harmonics are orthonormal on the sphere") {
    const QuadratureGrid grid = make_grid(4, 4);
    for (int l1 = 1; l1 <= 4; ++l1) {
        for (int m1 = -l1; m1 <= l1; ++m1) {
            const SolidHarmonic a = real_solid_harmonic(l1, m1);
            // against itself and a couple of cross pairs
            double self = 0.0;
            for (Eigen::Index p = 0; p < grid.n_surface(); ++p)
                self += grid.surface_weights(p) *
                        std::pow(a.value.eval(grid.surface_nodes.row(p)), 2);
            CHECK(self == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    const SolidHarmonic a = real_solid_harmonic(3, 2);
    const SolidHarmonic b = real_solid_harmonic(3, -2);
    const SolidHarmonic c = real_solid_harmonic(2, 2);
    double ab = 0.0, ac = 0.0;
    for (Eigen::Index p = 0; p < grid.n_surface(); ++p) {
        const Vec3 x = grid.surface_nodes.row(p);
        ab += grid.surface_weights(p) * a.value.eval(x) * b.value.eval(x);
        ac += grid.surface_weights(p) * a.value.eval(x) * c.value.eval(x);
    }
    CHECK(std::abs(ab) < 1e-13);
    CHECK(std::abs(ac) < 1e-13);
}

TEST_CASE("solid harmonics are harmonic polynomials") {
    SplitMix64 rng(11);
    for (int l = 1; l <= 5; ++l) {
        for (int m : {-l, 0, l - 1}) {
            const SolidHarmonic sh = real_solid_harmonic(l, m);
            for (int trial = 0; trial < 5; ++trial) {
                const Vec3 x(rng.next_symmetric(), rng.next_symmetric(), rng.next_symmetric());
                const double lap =
                    sh.hess[0][0].eval(x) + sh.hess[1][1].eval(x) + sh.hess[2][2].eval(x);
                CHECK(std::abs(lap) < 1e-12);
            }
        }
    }
}

TEST_CASE("degree and argument validation") {
    CHECK(real_solid_harmonic(3, 3).value.total_degree() == 3);
    CHECK_THROWS_AS(real_solid_harmonic(2, 3), ConfigError);
}
