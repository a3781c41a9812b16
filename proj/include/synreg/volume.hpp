#pragma once

#include <cstdint>
#include <vector>

#include "synreg/geometry.hpp"

namespace synreg {

// 3D scalar grid, float32 storage, x-fastest. The universal image carrier.
// Volumes are treated as immutable once filled; every operation below
// returns a new Volume.
struct Volume {
    GridGeometry geom;
    std::vector<float> data;

    Volume() = default;
    explicit Volume(const GridGeometry& g, float fill = 0.0f)
        : geom(g), data(g.voxel_count(), fill) {}

    float& at(int i, int j, int k) { return data[geom.index(i, j, k)]; }
    float at(int i, int j, int k) const { return data[geom.index(i, j, k)]; }

    float min_value() const;
    float max_value() const;
};

// 3D organ-ID grid; 0 is background. Shares Volume geometry conventions.
struct LabelMap {
    GridGeometry geom;
    std::vector<std::uint16_t> data;

    LabelMap() = default;
    explicit LabelMap(const GridGeometry& g, std::uint16_t fill = 0)
        : geom(g), data(g.voxel_count(), fill) {}

    std::uint16_t& at(int i, int j, int k) { return data[geom.index(i, j, k)]; }
    std::uint16_t at(int i, int j, int k) const { return data[geom.index(i, j, k)]; }
};

// Per-voxel displacement in mm, world coordinates, interleaved xyz.
struct DisplacementField {
    GridGeometry geom;
    std::vector<float> data; // 3 * voxel_count, [dx dy dz] per voxel

    DisplacementField() = default;
    explicit DisplacementField(const GridGeometry& g)
        : geom(g), data(g.voxel_count() * 3, 0.0f) {}

    Vec3 at(int i, int j, int k) const {
        const std::size_t b = geom.index(i, j, k) * 3;
        return {data[b], data[b + 1], data[b + 2]};
    }
    void set(int i, int j, int k, const Vec3& v) {
        const std::size_t b = geom.index(i, j, k) * 3;
        data[b] = static_cast<float>(v.x);
        data[b + 1] = static_cast<float>(v.y);
        data[b + 2] = static_cast<float>(v.z);
    }
};

struct WindowSpec {
    enum class Mode { Fixed, Percentile };
    Mode mode = Mode::Fixed;
    double lo = -1.0; // intensity (Fixed) or percentile rank in [0,100] (Percentile)
    double hi = 1.0;

    static WindowSpec fixed(double lo, double hi) { return {Mode::Fixed, lo, hi}; }
    static WindowSpec percentile(double lo, double hi) { return {Mode::Percentile, lo, hi}; }
};

// Resolved endpoints of a window after percentile lookup.
struct ResolvedWindow {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

} // namespace synreg
