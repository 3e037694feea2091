#include "cavityflow/quadrature.hpp"

#include <cmath>

namespace cavityflow {

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
    nodes.resize(n);
    weights.resize(n);
    // Newton iteration from the Chebyshev-angle initial guess; symmetric pairs.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes(i) = -x;
        nodes(n - 1 - i) = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights(i) = w;
        weights(n - 1 - i) = w;
    }
    if (n == 1) { nodes(0) = 0.0; weights(0) = 2.0; }
}

QuadratureGrid make_grid(int l_max, int max_poly_degree) {
    if (l_max < 1) throw ConfigError("make_grid: l_max must be >= 1");
    if (max_poly_degree < 1) throw ConfigError("make_grid: max_poly_degree must be >= 1");
    const int surface_degree = 3 * (l_max + 1) + 2;
    const int n_theta = surface_degree / 2 + 1;          // 2*n_theta - 1 >= surface_degree
    const int n_phi = surface_degree + 1;
    const int n_rad = (max_poly_degree + 2) / 2 + 2;     // exact through r^{max_poly_degree + 2}
    if (n_theta > 2048 || n_rad > 2048)
        throw ConfigError("make_grid: requested exactness beyond supported rule size");

    Eigen::VectorXd zt, wt;
    gauss_legendre(n_theta, zt, wt);

    QuadratureGrid g;
    g.volume_degree = max_poly_degree;
    g.surface_degree = surface_degree;

    const Eigen::Index n_surf = static_cast<Eigen::Index>(n_theta) * n_phi;
    g.surface_nodes.resize(n_surf, 3);
    g.surface_weights.resize(n_surf);
    Eigen::Index s = 0;
    for (int i = 0; i < n_theta; ++i) {
        const double z = zt(i);
        const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * M_PI * j / n_phi;
            g.surface_nodes(s, 0) = st * std::cos(phi);
            g.surface_nodes(s, 1) = st * std::sin(phi);
            g.surface_nodes(s, 2) = z;
            g.surface_weights(s) = wt(i) * (2.0 * M_PI / n_phi);
            ++s;
        }
    }

    Eigen::VectorXd xr, wr;
    gauss_legendre(n_rad, xr, wr);

    g.volume_nodes.resize(n_surf * n_rad, 3);
    g.volume_weights.resize(n_surf * n_rad);
    Eigen::Index v = 0;
    for (int i = 0; i < n_rad; ++i) {
        const double r = 0.5 * (xr(i) + 1.0);
        const double w = 0.5 * wr(i) * r * r;
        for (Eigen::Index k = 0; k < n_surf; ++k) {
            g.volume_nodes.row(v) = r * g.surface_nodes.row(k);
            g.volume_weights(v) = w * g.surface_weights(k);
            ++v;
        }
    }
    return g;
}

Mat3 fluid_inertia(const QuadratureGrid& grid) {
    Mat3 out = Mat3::Zero();
    for (Eigen::Index p = 0; p < grid.n_volume(); ++p) {
        const Vec3 x = grid.volume_nodes.row(p);
        out += grid.volume_weights(p) * (x.squaredNorm() * Mat3::Identity() - x * x.transpose());
    }
    return out;
}

} // namespace cavityflow
