#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mhdbox/field.hpp"

namespace mhdbox {

// Field snapshot format
// ---------------------
// <name>.bin : the listed fields concatenated, each one N^3 modes of
//              little-endian IEEE-754 binary64 pairs (real, imaginary), in
//              row-major storage order with the axis-1 index slowest.
//              Axis index i in [0,N) carries wavenumber k = i for i < N/2
//              and k = i - N otherwise. No header, no padding.
// <name>.json: sidecar {"n": N, "layout": "full-complex",
//              "fields": [names in blob order], "time": t}.
struct SnapshotRecord {
    double time = 0.0;
    std::vector<std::pair<std::string, SpectralField>> fields;
};

namespace detail {

inline std::uint64_t to_little_endian_bits(double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xffU);
        bits = r;
    }
    return bits;
}

inline double from_little_endian_bits(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((bits >> (8 * i)) & 0xffU);
        bits = r;
    }
    return std::bit_cast<double>(bits);
}

inline void append_double(std::string& out, double v) {
    const std::uint64_t bits = to_little_endian_bits(v);
    char raw[8];
    std::memcpy(raw, &bits, 8);
    out.append(raw, 8);
}

} // namespace detail

inline std::string serialize_snapshot_blob(const SnapshotRecord& snap) {
    std::string out;
    std::size_t total = 0;
    for (const auto& [name, f] : snap.fields) total += f.c.size() * 16;
    out.reserve(total);
    for (const auto& [name, f] : snap.fields)
        for (const auto& v : f.c) {
            detail::append_double(out, v.real());
            detail::append_double(out, v.imag());
        }
    return out;
}

inline nlohmann::json snapshot_sidecar(const SnapshotRecord& snap) {
    nlohmann::json j;
    j["n"] = snap.fields.empty() ? 0 : snap.fields.front().second.grid.n;
    j["layout"] = "full-complex";
    nlohmann::json names = nlohmann::json::array();
    for (const auto& [name, f] : snap.fields) names.push_back(name);
    j["fields"] = names;
    j["time"] = snap.time;
    return j;
}

inline void write_snapshot(const std::filesystem::path& base, const SnapshotRecord& snap) {
    {
        std::ofstream bin(base.string() + ".bin", std::ios::binary | std::ios::trunc);
        if (!bin) throw IoError("cannot write " + base.string() + ".bin");
        const std::string blob = serialize_snapshot_blob(snap);
        bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        if (!bin) throw IoError("short write to " + base.string() + ".bin");
    }
    std::ofstream side(base.string() + ".json", std::ios::trunc);
    if (!side) throw IoError("cannot write " + base.string() + ".json");
    side << snapshot_sidecar(snap).dump(2) << "\n";
}

inline SnapshotRecord read_snapshot(const std::filesystem::path& base) {
    std::ifstream side(base.string() + ".json");
    if (!side) throw IoError("cannot read " + base.string() + ".json");
    nlohmann::json j;
    side >> j;
    SnapshotRecord snap;
    snap.time = j.at("time").get<double>();
    const int n = j.at("n").get<int>();
    if (j.at("layout").get<std::string>() != "full-complex")
        throw IoError("unsupported snapshot layout");
    const Grid grid(n);

    std::ifstream bin(base.string() + ".bin", std::ios::binary);
    if (!bin) throw IoError("cannot read " + base.string() + ".bin");
    for (const auto& name : j.at("fields")) {
        SpectralField f(grid);
        std::vector<char> raw(f.c.size() * 16);
        bin.read(raw.data(), static_cast<std::streamsize>(raw.size()));
        if (!bin) throw IoError("snapshot blob truncated: " + base.string());
        for (std::size_t i = 0; i < f.c.size(); ++i) {
            std::uint64_t re_bits, im_bits;
            std::memcpy(&re_bits, raw.data() + 16 * i, 8);
            std::memcpy(&im_bits, raw.data() + 16 * i + 8, 8);
            f.c[i] = Complex{detail::from_little_endian_bits(re_bits),
                             detail::from_little_endian_bits(im_bits)};
        }
        snap.fields.emplace_back(name.get<std::string>(), std::move(f));
    }
    return snap;
}

} // namespace mhdbox
