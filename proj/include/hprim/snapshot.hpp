#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "hprim/field.hpp"

namespace hprim {

// Snapshot file layout (all little-endian):
//   8 bytes   magic "HPRIM001"
//   4 bytes   u32 header length
//   N bytes   UTF-8 header, key=value lines (grid, physics, time, field order)
//   payload   float64 v1 (nz*ny*nx, x1 fastest, x2 next, x3 top first),
//             then v2, then zeta (ny*nx)
// Identical states serialize byte-identically.

inline constexpr char kSnapshotMagic[8] = {'H', 'P', 'R', 'I', 'M', '0', '0', '1'};

struct SnapshotData {
    GridSpec spec;
    double t = 0.0;
    long step = 0;
    std::vector<double> v1, v2, zeta;
};

namespace detail {

inline std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void put_u32(std::string& out, uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, const double* p, size_t n) {
    static_assert(sizeof(double) == 8);
    const size_t base = out.size();
    out.resize(base + 8 * n);
    std::memcpy(out.data() + base, p, 8 * n); // host is little-endian
}

} // namespace detail

inline std::string snapshot_header(const GridSpec& s, double t, long step) {
    std::string h;
    h += "nx=" + std::to_string(s.nx) + "\n";
    h += "ny=" + std::to_string(s.ny) + "\n";
    h += "nz=" + std::to_string(s.nz) + "\n";
    h += "b=" + detail::format_g17(s.b) + "\n";
    h += "box_scale=" + detail::format_g17(s.box_scale) + "\n";
    h += "g=" + detail::format_g17(s.g) + "\n";
    h += "f=" + detail::format_g17(s.f) + "\n";
    h += "P0=" + detail::format_g17(s.P0) + "\n";
    h += "t=" + detail::format_g17(t) + "\n";
    h += "step=" + std::to_string(step) + "\n";
    h += "fields=v1,v2,zeta\n";
    return h;
}

inline std::string encode_snapshot(const GridSpec& spec, const VolumeVec2& v,
                                   const SurfaceField& zeta, double t, long step) {
    std::string out(kSnapshotMagic, 8);
    const std::string header = snapshot_header(spec, t, step);
    detail::put_u32(out, static_cast<uint32_t>(header.size()));
    out += header;
    detail::put_f64(out, v[0].v.data(), v[0].v.size());
    detail::put_f64(out, v[1].v.data(), v[1].v.size());
    detail::put_f64(out, zeta.v.data(), zeta.v.size());
    return out;
}

inline void write_snapshot(const std::string& path, const GridSpec& spec, const VolumeVec2& v,
                           const SurfaceField& zeta, double t, long step) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw SnapshotError("cannot open '" + path + "' for writing");
    const std::string blob = encode_snapshot(spec, v, zeta, t, step);
    f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!f) throw SnapshotError("short write to '" + path + "'");
}

inline SnapshotData decode_snapshot(const std::string& blob) {
    if (blob.size() < 12 || std::memcmp(blob.data(), kSnapshotMagic, 8) != 0)
        throw SnapshotError("bad snapshot magic");
    uint32_t hlen = 0;
    for (int i = 0; i < 4; ++i)
        hlen |= static_cast<uint32_t>(static_cast<unsigned char>(blob[8 + i])) << (8 * i);
    if (blob.size() < 12 + static_cast<size_t>(hlen)) throw SnapshotError("truncated snapshot header");
    const std::string header = blob.substr(12, hlen);

    SnapshotData d;
    std::istringstream in(header);
    std::string line;
    std::string fields;
    while (std::getline(in, line)) {
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "nx") d.spec.nx = std::stoi(v);
        else if (k == "ny") d.spec.ny = std::stoi(v);
        else if (k == "nz") d.spec.nz = std::stoi(v);
        else if (k == "b") d.spec.b = std::stod(v);
        else if (k == "box_scale") d.spec.box_scale = std::stod(v);
        else if (k == "g") d.spec.g = std::stod(v);
        else if (k == "f") d.spec.f = std::stod(v);
        else if (k == "P0") d.spec.P0 = std::stod(v);
        else if (k == "t") d.t = std::stod(v);
        else if (k == "step") d.step = std::stol(v);
        else if (k == "fields") fields = v;
    }
    if (fields != "v1,v2,zeta") throw SnapshotError("unexpected field order '" + fields + "'");
    try {
        d.spec.validate();
    } catch (const Error& e) {
        throw SnapshotError(std::string("invalid grid in snapshot header: ") + e.what());
    }

    const size_t nvol = static_cast<size_t>(d.spec.nx) * d.spec.ny * d.spec.nz;
    const size_t nsurf = static_cast<size_t>(d.spec.nx) * d.spec.ny;
    const size_t want = 12 + hlen + 8 * (2 * nvol + nsurf);
    if (blob.size() != want)
        throw SnapshotError("snapshot payload length mismatch: have " + std::to_string(blob.size()) +
                            ", want " + std::to_string(want));
    d.v1.resize(nvol);
    d.v2.resize(nvol);
    d.zeta.resize(nsurf);
    const char* p = blob.data() + 12 + hlen;
    std::memcpy(d.v1.data(), p, 8 * nvol);
    std::memcpy(d.v2.data(), p + 8 * nvol, 8 * nvol);
    std::memcpy(d.zeta.data(), p + 16 * nvol, 8 * nsurf);
    return d;
}

inline SnapshotData read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SnapshotError("cannot open snapshot '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_snapshot(ss.str());
}

} // namespace hprim
