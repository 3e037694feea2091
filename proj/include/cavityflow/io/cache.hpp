#pragma once

#include "cavityflow/coupling.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cavityflow {

/// FNV-1a 64-bit over the canonical parameter string.
std::uint64_t fnv1a64(const std::string& s);

/// Everything simulate/stability need without re-running the eigensolve.
/// Arrays round-trip bit-exactly (explicit little-endian float64 payload).
struct CachePayload {
    static constexpr int kFormatVersion = 1;

    std::string key;               // canonical parameter string
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd coeffs;        // basis x modes
    Eigen::MatrixXd moments;       // modes x 3
    std::array<Eigen::MatrixXd, 3> cross_gram;
    std::vector<double> convection; // packed rank-3, r + n k + n^2 l
    Vec3 solid_lambda = Vec3::Zero();
    Vec3 inertia_total = Vec3::Zero();
    bool inertia_raw = false;

    std::uint64_t hash() const { return fnv1a64(key); }

    /// Rebuild B, D and the factorization from the stored arrays.
    CouplingTensors tensors() const;
};

CachePayload make_payload(const std::string& key, const ModeSet& modes,
                          const CouplingTensors& tensors);

std::string cache_file_name(std::uint64_t hash);

void cache_store(const std::string& path, const CachePayload& payload);

/// Throws ConfigError naming the failed check (version, hash, dims, payload size).
CachePayload cache_load(const std::string& path);

} // namespace cavityflow
