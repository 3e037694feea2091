#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace cavityflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Invalid parameters, malformed configuration, unphysical inputs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Eigensolver breakdown, step-size underflow, NaN states, non-SPD pencils.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature exactness or cached-data problems during form assembly.
struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Cross-product matrix: hat(v) * w == v x w.
inline Mat3 hat(const Vec3& v) {
    Mat3 h;
    h << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return h;
}

} // namespace cavityflow
