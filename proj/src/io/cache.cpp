#include "cavityflow/io/cache.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cavityflow {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

namespace {

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_doubles_le(std::ostream& out, const double* data, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(data[i]);
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

void read_doubles_le(std::istream& in, double* data, std::size_t count, const std::string& what) {
    for (std::size_t i = 0; i < count; ++i) {
        unsigned char bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) throw ConfigError("cache load: truncated payload while reading " + what);
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        data[i] = std::bit_cast<double>(bits);
    }
}

} // namespace

CachePayload make_payload(const std::string& key, const ModeSet& modes,
                          const CouplingTensors& tensors) {
    CachePayload p;
    p.key = key;
    p.eigenvalues = modes.eigenvalues();
    p.coeffs = modes.coeffs();
    p.moments = tensors.moments;
    p.cross_gram = tensors.cross_gram;
    p.convection = tensors.convection;
    p.solid_lambda = tensors.inertia.solid_lambda;
    p.inertia_total = tensors.inertia.total;
    p.inertia_raw = tensors.inertia.raw;
    return p;
}

CouplingTensors CachePayload::tensors() const {
    InertiaSpec inertia = inertia_raw ? InertiaSpec::from_raw_total(inertia_total)
                                      : InertiaSpec::from_solid(solid_lambda);
    CouplingTensors t;
    t.inertia = inertia;
    t.eigenvalues = eigenvalues;
    t.moments = moments;
    t.cross_gram = cross_gram;
    t.convection = convection;

    BFactor bf = build_B(t.moments, inertia);
    t.B = std::move(bf.B);
    t.B_chol = std::move(bf.chol);

    const int n = t.n();
    if (convection.size() != static_cast<std::size_t>(n) * n * n)
        throw ConfigError("cache load: convection tensor size inconsistent with mode count");
    const Vec3 iinv = inertia.inverse();
    t.convection_full.resize(t.convection.size());
    for (int l = 0; l < n; ++l) {
        const Vec3 wl = iinv.cwiseProduct(t.moments.row(l).transpose());
        for (int k = 0; k < n; ++k)
            for (int r = 0; r < n; ++r) {
                const Vec3 pkr = t.cross_gram_vec(k, r);
                t.convection_full[static_cast<std::size_t>(r + n * (k + n * l))] =
                    t.convection[static_cast<std::size_t>(r + n * (k + n * l))] - 2.0 * pkr.dot(wl);
            }
    }
    return t;
}

std::string cache_file_name(std::uint64_t hash) { return "modes_" + hex16(hash) + ".cfc"; }

void cache_store(const std::string& path, const CachePayload& p) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cache store: cannot open '" + path + "' for writing");

    out << "CAVITYFLOW-CACHE " << CachePayload::kFormatVersion << "\n";
    out << "hash " << hex16(p.hash()) << "\n";
    out << "key " << p.key << "\n";
    out << "raw " << (p.inertia_raw ? 1 : 0) << "\n";
    const Eigen::Index nb = p.coeffs.rows(), nm = p.coeffs.cols();
    out << "dims " << nb << " " << nm << "\n";
    out << "DATA\n";

    write_doubles_le(out, p.eigenvalues.data(), static_cast<std::size_t>(p.eigenvalues.size()));
    write_doubles_le(out, p.coeffs.data(), static_cast<std::size_t>(p.coeffs.size()));
    write_doubles_le(out, p.moments.data(), static_cast<std::size_t>(p.moments.size()));
    for (const auto& g : p.cross_gram)
        write_doubles_le(out, g.data(), static_cast<std::size_t>(g.size()));
    write_doubles_le(out, p.convection.data(), p.convection.size());
    write_doubles_le(out, p.solid_lambda.data(), 3);
    write_doubles_le(out, p.inertia_total.data(), 3);
    if (!out) throw ConfigError("cache store: write failed for '" + path + "'");
}

CachePayload cache_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cache load: cannot open '" + path + "'");

    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw ConfigError(std::string("cache load: missing ") + what);
        return line;
    };

    {
        std::istringstream hdr(next_line("magic line"));
        std::string magic;
        int version = -1;
        hdr >> magic >> version;
        if (magic != "CAVITYFLOW-CACHE") throw ConfigError("cache load: bad magic");
        if (version != CachePayload::kFormatVersion)
            throw ConfigError("cache load: format version mismatch (got " + std::to_string(version) +
                              ", expected " + std::to_string(CachePayload::kFormatVersion) + ")");
    }

    CachePayload p;
    std::string stored_hash;
    {
        std::istringstream hdr(next_line("hash line"));
        std::string tag;
        hdr >> tag >> stored_hash;
        if (tag != "hash" || stored_hash.size() != 16) throw ConfigError("cache load: bad hash line");
    }
    {
        const std::string l = next_line("key line");
        if (l.rfind("key ", 0) != 0) throw ConfigError("cache load: bad key line");
        p.key = l.substr(4);
    }
    if (hex16(p.hash()) != stored_hash)
        throw ConfigError("cache load: hash mismatch (header does not match stored key)");
    {
        std::istringstream hdr(next_line("raw line"));
        std::string tag;
        int raw = -1;
        hdr >> tag >> raw;
        if (tag != "raw" || (raw != 0 && raw != 1)) throw ConfigError("cache load: bad raw line");
        p.inertia_raw = raw == 1;
    }
    Eigen::Index nb = 0, nm = 0;
    {
        std::istringstream hdr(next_line("dims line"));
        std::string tag;
        hdr >> tag >> nb >> nm;
        if (tag != "dims" || nb < 1 || nm < 1 || nm > nb)
            throw ConfigError("cache load: bad dims line");
    }
    if (next_line("DATA marker") != "DATA") throw ConfigError("cache load: missing DATA marker");

    p.eigenvalues.resize(nm);
    p.coeffs.resize(nb, nm);
    p.moments.resize(nm, 3);
    read_doubles_le(in, p.eigenvalues.data(), static_cast<std::size_t>(nm), "eigenvalues");
    read_doubles_le(in, p.coeffs.data(), static_cast<std::size_t>(nb * nm), "coefficients");
    read_doubles_le(in, p.moments.data(), static_cast<std::size_t>(nm * 3), "moment vectors");
    for (auto& g : p.cross_gram) {
        g.resize(nm, nm);
        read_doubles_le(in, g.data(), static_cast<std::size_t>(nm * nm), "cross-gram");
    }
    p.convection.resize(static_cast<std::size_t>(nm) * nm * nm);
    read_doubles_le(in, p.convection.data(), p.convection.size(), "convection tensor");
    read_doubles_le(in, p.solid_lambda.data(), 3, "solid inertia");
    read_doubles_le(in, p.inertia_total.data(), 3, "total inertia");

    char extra;
    if (in.read(&extra, 1)) throw ConfigError("cache load: trailing bytes after payload");
    return p;
}

} // namespace cavityflow
