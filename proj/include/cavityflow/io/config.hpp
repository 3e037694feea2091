#pragma once

#include "cavityflow/basis.hpp"
#include "cavityflow/coupling.hpp"
#include "cavityflow/dynamics.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cavityflow {

/// Flat `section.key = value` text; '#' starts a comment. Typed getters mark
/// keys consumed so unknown keys can be rejected after parsing.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key);
    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<double> get_doubles(const std::string& key, int expected_count = -1);

    /// Throws naming the first key that was never consumed (typo protection).
    void reject_unknown_keys() const;

private:
    std::string raw(const std::string& key);
    std::string origin_;
    std::unordered_map<std::string, std::string> values_;
    std::vector<std::string> order_; // declaration order for stable diagnostics
    std::unordered_set<std::string> consumed_;
};

struct InitialSpec {
    // RigidOnly also freezes the fluid during integration (the reduction),
    // while Zero starts the fully coupled system from c = 0.
    enum class Kind { Zero, RigidOnly, SingleMode, Random, List };
    Kind kind = Kind::Zero;
    int mode_index = 0;          // SingleMode
    double amplitude = 0.0;      // SingleMode / Random
    std::uint64_t seed = 0;      // Random
    std::vector<double> list;    // List
    Vec3 a0 = Vec3::Zero();
    std::optional<double> rescale_momentum; // scale a0 so that |I a0| matches

    Eigen::VectorXd coefficients(int n_modes) const;
    Vec3 body_velocity(const InertiaSpec& inertia) const;
};

struct BasisParams {
    int l_max = 1;
    int n_rad = 1;
    FamilySet families = FamilySet::both();
    RadialFamily radial = RadialFamily::ShiftedLegendre;

    int count() const {
        const int per_family = l_max * (l_max + 2) * n_rad;
        return ((families.toroidal ? 1 : 0) + (families.poloidal ? 1 : 0)) * per_family;
    }
};

struct AtlasSpec {
    std::vector<Vec3> solid_lambdas;
    std::vector<double> zetas;
};

/// Fully validated run configuration; construction fails with the offending
/// key path before any computation starts.
struct RunConfig {
    BasisParams basis;
    FluidParams fluid;
    InertiaSpec inertia;
    int n_modes = 1;
    IntegratorConfig integrator;
    InitialSpec initial;
    double sample_interval = 0.5;
    std::string csv_path; // empty = CLI must supply --out
    double stability_momentum = 1.0;
    AtlasSpec atlas;

    static RunConfig load(const std::string& path, std::optional<std::uint64_t> seed_override = {});
    static RunConfig from_text(const std::string& text,
                               std::optional<std::uint64_t> seed_override = {});

    /// Canonical parameter string hashed into the cache key.
    std::string cache_key() const;
};

} // namespace cavityflow
