#include "cavityflow/io/config.hpp"

#include "cavityflow/rng.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cavityflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
}

} // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

KeyValueFile KeyValueFile::parse_string(const std::string& text, const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.values_[key] = value;
        kv.order_.push_back(key);
    }
    return kv;
}

std::string KeyValueFile::raw(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    consumed_.insert(key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key) { return raw(key); }
std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) {
    return has(key) ? raw(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) { return parse_double(key, raw(key)); }
double KeyValueFile::get_double(const std::string& key, double fallback) {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueFile::get_int(const std::string& key) {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config key '" + key + "': expected an integer");
    return i;
}
int KeyValueFile::get_int(const std::string& key, int fallback) {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer");
    }
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string s = raw(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config key '" + key + "': expected true/false");
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key, int expected_count) {
    const std::vector<std::string> toks = split_ws(raw(key));
    std::vector<double> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(parse_double(key, t));
    if (expected_count >= 0 && static_cast<int>(out.size()) != expected_count)
        throw ConfigError("config key '" + key + "': expected " + std::to_string(expected_count) +
                          " numbers, got " + std::to_string(out.size()));
    return out;
}

void KeyValueFile::reject_unknown_keys() const {
    for (const auto& key : order_)
        if (!consumed_.count(key))
            throw ConfigError("unknown config key '" + key + "' in " + origin_);
}

Eigen::VectorXd InitialSpec::coefficients(int n_modes) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_modes);
    switch (kind) {
        case Kind::Zero:
        case Kind::RigidOnly: break;
        case Kind::SingleMode:
            if (mode_index < 0 || mode_index >= n_modes)
                throw ConfigError("initial.c0: single_mode index out of range");
            c(mode_index) = amplitude;
            break;
        case Kind::Random: {
            SplitMix64 rng(seed);
            for (int k = 0; k < n_modes; ++k) c(k) = amplitude * rng.next_symmetric();
            break;
        }
        case Kind::List:
            if (static_cast<int>(list.size()) != n_modes)
                throw ConfigError("initial.c0: coefficient list length does not match modes.count");
            for (int k = 0; k < n_modes; ++k) c(k) = list[static_cast<std::size_t>(k)];
            break;
    }
    return c;
}

Vec3 InitialSpec::body_velocity(const InertiaSpec& inertia) const {
    Vec3 a = a0;
    if (rescale_momentum) {
        const double mom = inertia.apply(a).norm();
        if (!(mom > 0.0))
            throw ConfigError("initial.rescale_momentum requires a nonzero initial.a0");
        a *= *rescale_momentum / mom;
    }
    return a;
}

namespace {

FamilySet parse_families(const std::string& s) {
    FamilySet f{false, false};
    for (char ch : s) {
        if (ch == 'T' || ch == 't') f.toroidal = true;
        else if (ch == 'P' || ch == 'p') f.poloidal = true;
        else throw ConfigError("config key 'basis.families': expected a combination of T and P");
    }
    if (f.empty()) throw ConfigError("config key 'basis.families': must not be empty");
    return f;
}

InitialSpec parse_initial(KeyValueFile& kv, std::optional<std::uint64_t> seed_override) {
    InitialSpec spec;
    const std::string c0 = kv.get_string("initial.c0", "zero");
    const std::vector<std::string> toks = split_ws(c0);
    if (toks.empty()) throw ConfigError("config key 'initial.c0': empty value");
    const std::string& head = toks[0];
    if (head == "zero" || head == "rigid_only") {
        if (toks.size() != 1) throw ConfigError("config key 'initial.c0': '" + head + "' takes no arguments");
        spec.kind = head == "zero" ? InitialSpec::Kind::Zero : InitialSpec::Kind::RigidOnly;
    } else if (head == "single_mode") {
        if (toks.size() != 3)
            throw ConfigError("config key 'initial.c0': expected 'single_mode <k> <amp>'");
        spec.kind = InitialSpec::Kind::SingleMode;
        spec.mode_index = static_cast<int>(parse_double("initial.c0", toks[1]));
        spec.amplitude = parse_double("initial.c0", toks[2]);
    } else if (head == "random") {
        if (toks.size() != 3)
            throw ConfigError("config key 'initial.c0': expected 'random <seed> <amp>'");
        spec.kind = InitialSpec::Kind::Random;
        try {
            spec.seed = std::stoull(toks[1]);
        } catch (const std::exception&) {
            throw ConfigError("config key 'initial.c0': seed must be an unsigned integer");
        }
        spec.amplitude = parse_double("initial.c0", toks[2]);
    } else if (head == "list") {
        spec.kind = InitialSpec::Kind::List;
        for (std::size_t i = 1; i < toks.size(); ++i)
            spec.list.push_back(parse_double("initial.c0", toks[i]));
    } else {
        throw ConfigError("config key 'initial.c0': unknown preset '" + head +
                          "' (expected zero|rigid_only|single_mode|random|list)");
    }
    if (seed_override && spec.kind == InitialSpec::Kind::Random) spec.seed = *seed_override;

    // optional so that stability/atlas-only configs need no initial state
    if (kv.has("initial.a0")) {
        const std::vector<double> a0 = kv.get_doubles("initial.a0", 3);
        spec.a0 = Vec3(a0[0], a0[1], a0[2]);
    }
    if (kv.has("initial.rescale_momentum")) {
        const double m = kv.get_double("initial.rescale_momentum");
        if (!(m > 0.0)) throw ConfigError("config key 'initial.rescale_momentum': must be > 0");
        spec.rescale_momentum = m;
    }
    return spec;
}

RunConfig parse_config(KeyValueFile kv, std::optional<std::uint64_t> seed_override) {
    RunConfig cfg;

    cfg.basis.l_max = kv.get_int("basis.l_max");
    if (cfg.basis.l_max < 1) throw ConfigError("config key 'basis.l_max': must be >= 1");
    cfg.basis.n_rad = kv.get_int("basis.n_rad");
    if (cfg.basis.n_rad < 1) throw ConfigError("config key 'basis.n_rad': must be >= 1");
    cfg.basis.families = parse_families(kv.get_string("basis.families", "TP"));
    cfg.basis.radial = radial_family_from_name(kv.get_string("basis.radial_family", "legendre"));

    cfg.fluid.nu = kv.get_double("fluid.nu");
    cfg.fluid.zeta = kv.get_double("fluid.zeta");
    cfg.fluid.experimental_zero_zeta = kv.get_bool("fluid.allow_zero_zeta", false);
    try {
        cfg.fluid.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config key 'fluid.zeta'/'fluid.nu': ") + e.what());
    }

    const bool has_solid = kv.has("inertia.solid_lambda");
    const bool has_raw = kv.has("inertia.raw_lambda");
    if (has_solid == has_raw)
        throw ConfigError("config requires exactly one of 'inertia.solid_lambda' or 'inertia.raw_lambda'");
    if (has_solid) {
        const auto v = kv.get_doubles("inertia.solid_lambda", 3);
        cfg.inertia = InertiaSpec::from_solid(Vec3(v[0], v[1], v[2]));
    } else {
        const auto v = kv.get_doubles("inertia.raw_lambda", 3);
        cfg.inertia = InertiaSpec::from_raw_total(Vec3(v[0], v[1], v[2]));
    }

    cfg.n_modes = kv.get_int("modes.count");
    if (cfg.n_modes < 1 || cfg.n_modes > cfg.basis.count())
        throw ConfigError("config key 'modes.count': must be in [1, " +
                          std::to_string(cfg.basis.count()) + "] for this basis");

    const std::string scheme = kv.get_string("integrator.scheme", "explicit_adaptive");
    if (scheme == "explicit_adaptive") cfg.integrator.scheme = Scheme::ExplicitAdaptive;
    else if (scheme == "semi_implicit") cfg.integrator.scheme = Scheme::SemiImplicit;
    else throw ConfigError("config key 'integrator.scheme': expected explicit_adaptive|semi_implicit");
    cfg.integrator.rel_tol = kv.get_double("integrator.rel_tol", 1e-10);
    cfg.integrator.abs_tol = kv.get_double("integrator.abs_tol", 1e-12);
    cfg.integrator.t_end = kv.get_double("integrator.t_end", 100.0);
    cfg.integrator.max_step = kv.get_double("integrator.max_step", 1.0);
    cfg.integrator.equilibrium_eps = kv.get_double("integrator.equilibrium_eps", 1e-10);
    try {
        cfg.integrator.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config key 'integrator.*': ") + e.what());
    }

    cfg.initial = parse_initial(kv, seed_override);
    cfg.integrator.rigid_only = cfg.initial.kind == InitialSpec::Kind::RigidOnly;
    // Exercises the range checks (list length, mode index) up front.
    (void)cfg.initial.coefficients(cfg.n_modes);

    cfg.sample_interval = kv.get_double("output.sample_interval", 0.5);
    if (!(cfg.sample_interval > 0.0))
        throw ConfigError("config key 'output.sample_interval': must be > 0");
    cfg.csv_path = kv.get_string("output.csv", "");

    cfg.stability_momentum = kv.get_double("stability.momentum", 1.0);
    if (!(cfg.stability_momentum > 0.0))
        throw ConfigError("config key 'stability.momentum': must be > 0");

    if (kv.has("atlas.solid_lambdas")) {
        const std::string s = kv.get_string("atlas.solid_lambdas");
        std::istringstream iss(s);
        std::string triple;
        while (std::getline(iss, triple, ';')) {
            const std::vector<std::string> toks = split_ws(triple);
            if (toks.empty()) continue;
            if (toks.size() != 3)
                throw ConfigError("config key 'atlas.solid_lambdas': each ';'-separated entry needs 3 numbers");
            Vec3 v(parse_double("atlas.solid_lambdas", toks[0]),
                   parse_double("atlas.solid_lambdas", toks[1]),
                   parse_double("atlas.solid_lambdas", toks[2]));
            (void)InertiaSpec::from_solid(v); // validate now
            cfg.atlas.solid_lambdas.push_back(v);
        }
        if (cfg.atlas.solid_lambdas.empty())
            throw ConfigError("config key 'atlas.solid_lambdas': no entries");
    }
    if (kv.has("atlas.zetas")) {
        cfg.atlas.zetas = kv.get_doubles("atlas.zetas");
        for (double z : cfg.atlas.zetas)
            if (!(z > 0.0)) throw ConfigError("config key 'atlas.zetas': entries must be > 0");
    }

    kv.reject_unknown_keys();
    return cfg;
}

} // namespace

RunConfig RunConfig::load(const std::string& path, std::optional<std::uint64_t> seed_override) {
    return parse_config(KeyValueFile::parse_file(path), seed_override);
}

RunConfig RunConfig::from_text(const std::string& text, std::optional<std::uint64_t> seed_override) {
    return parse_config(KeyValueFile::parse_string(text), seed_override);
}

std::string RunConfig::cache_key() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "v1;l_max=%d;n_rad=%d;families=%s%s;radial=%s;nu=%.17g;zeta=%.17g;zeta0=%d;"
                  "solid=%.17g,%.17g,%.17g;raw=%d;total=%.17g,%.17g,%.17g;n_modes=%d",
                  basis.l_max, basis.n_rad, basis.families.toroidal ? "T" : "",
                  basis.families.poloidal ? "P" : "", radial_family_name(basis.radial), fluid.nu,
                  fluid.zeta, fluid.experimental_zero_zeta ? 1 : 0, inertia.solid_lambda(0),
                  inertia.solid_lambda(1), inertia.solid_lambda(2), inertia.raw ? 1 : 0,
                  inertia.total(0), inertia.total(1), inertia.total(2), n_modes);
    return std::string(buf);
}

} // namespace cavityflow
