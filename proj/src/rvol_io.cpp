#include "synreg/rvol_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "synreg/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "RVOL payload writing assumes a little-endian host");

namespace synreg {

namespace {

using nlohmann::json;

// Shortest round-trip decimal formatting, locale-independent, so identical
// geometry always yields identical header bytes.
std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string header_line(const char* kind, const GridGeometry& g) {
    std::string h = "{\"magic\":\"RVOL1\",\"kind\":\"";
    h += kind;
    h += "\",\"dims\":[";
    h += std::to_string(g.dims.x) + "," + std::to_string(g.dims.y) + "," + std::to_string(g.dims.z);
    h += "],\"spacing\":[";
    h += format_double(g.spacing.x) + "," + format_double(g.spacing.y) + "," + format_double(g.spacing.z);
    h += "],\"origin\":[";
    h += format_double(g.origin.x) + "," + format_double(g.origin.y) + "," + format_double(g.origin.z);
    h += "]}\n";
    return h;
}

template <typename T>
void check_finite(const std::vector<T>& data, const std::filesystem::path& path) {
    if constexpr (std::is_floating_point_v<T>) {
        for (const T v : data)
            if (!std::isfinite(v)) throw IoError("non-finite value while writing " + path.string());
    }
}

template <typename T>
void write_payload(const std::filesystem::path& path, const char* kind,
                   const GridGeometry& g, const std::vector<T>& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    const std::string h = header_line(kind, g);
    f.write(h.data(), static_cast<std::streamsize>(h.size()));
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(T)));
    if (!f) throw IoError("short write: " + path.string());
}

struct Header {
    std::string kind;
    GridGeometry geom;
    std::streampos payload_start;
};

Header read_header(std::ifstream& f, const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(f, line)) throw IoError("cannot read header: " + path.string());
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw IoError("malformed RVOL header in " + path.string() + ": " + e.what());
    }
    if (!j.contains("magic") || j["magic"] != "RVOL1")
        throw IoError("unknown magic in " + path.string());
    Header h;
    h.kind = j.at("kind").get<std::string>();
    const auto dims = j.at("dims");
    const auto spacing = j.at("spacing");
    const auto origin = j.at("origin");
    if (dims.size() != 3 || spacing.size() != 3 || origin.size() != 3)
        throw IoError("bad header arrays in " + path.string());
    h.geom.dims = {dims[0].get<int>(), dims[1].get<int>(), dims[2].get<int>()};
    h.geom.spacing = {spacing[0].get<double>(), spacing[1].get<double>(), spacing[2].get<double>()};
    h.geom.origin = {origin[0].get<double>(), origin[1].get<double>(), origin[2].get<double>()};
    if (!h.geom.valid()) throw IoError("invalid geometry in " + path.string());
    h.payload_start = f.tellg();
    return h;
}

template <typename T>
std::vector<T> read_payload(std::ifstream& f, std::size_t count, const std::filesystem::path& path) {
    std::vector<T> data(count);
    f.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (f.gcount() != static_cast<std::streamsize>(count * sizeof(T)))
        throw IoError("truncated payload in " + path.string());
    return data;
}

} // namespace

void write_rvol(const std::filesystem::path& path, const Volume& v) {
    check_finite(v.data, path);
    if (v.data.size() != v.geom.voxel_count()) throw IoError("volume data/dims mismatch");
    write_payload(path, "scalar", v.geom, v.data);
}

void write_rvol(const std::filesystem::path& path, const LabelMap& m) {
    if (m.data.size() != m.geom.voxel_count()) throw IoError("label data/dims mismatch");
    write_payload(path, "label", m.geom, m.data);
}

void write_rvol(const std::filesystem::path& path, const DisplacementField& d) {
    check_finite(d.data, path);
    if (d.data.size() != d.geom.voxel_count() * 3) throw IoError("field data/dims mismatch");
    write_payload(path, "field3", d.geom, d.data);
}

Volume read_rvol_volume(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    const Header h = read_header(f, path);
    if (h.kind != "scalar") throw IoError("expected kind scalar in " + path.string() + ", got " + h.kind);
    Volume v;
    v.geom = h.geom;
    v.data = read_payload<float>(f, h.geom.voxel_count(), path);
    return v;
}

LabelMap read_rvol_labels(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    const Header h = read_header(f, path);
    if (h.kind != "label") throw IoError("expected kind label in " + path.string() + ", got " + h.kind);
    LabelMap m;
    m.geom = h.geom;
    m.data = read_payload<std::uint16_t>(f, h.geom.voxel_count(), path);
    return m;
}

DisplacementField read_rvol_field(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    const Header h = read_header(f, path);
    if (h.kind != "field3") throw IoError("expected kind field3 in " + path.string() + ", got " + h.kind);
    DisplacementField d;
    d.geom = h.geom;
    d.data = read_payload<float>(f, h.geom.voxel_count() * 3, path);
    return d;
}

std::string rvol_kind(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    return read_header(f, path).kind;
}

GridGeometry rvol_geometry(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    return read_header(f, path).geom;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (f) {
        f.read(buf, sizeof(buf));
        const std::streamsize n = f.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

} // namespace synreg
