#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>

namespace synreg {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Index3 {
    int x = 0;
    int y = 0;
    int z = 0;
};

// Regular grid in world space. Voxel (i,j,k) has its center at
// origin + (i*sx, j*sy, k*sz); data is stored x-fastest.
struct GridGeometry {
    Index3 dims;
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims.x) * dims.y * dims.z;
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * dims.y + j) * dims.x + i;
    }
    bool contains_index(int i, int j, int k) const {
        return i >= 0 && i < dims.x && j >= 0 && j < dims.y && k >= 0 && k < dims.z;
    }
    Vec3 voxel_center(int i, int j, int k) const {
        return {origin.x + i * spacing.x, origin.y + j * spacing.y, origin.z + k * spacing.z};
    }
    // Continuous voxel coordinates; voxel centers map to integers.
    Vec3 world_to_voxel(const Vec3& p) const {
        return {(p.x - origin.x) / spacing.x,
                (p.y - origin.y) / spacing.y,
                (p.z - origin.z) / spacing.z};
    }
    // World extent covered by the voxel edges (dims * spacing).
    Vec3 extent() const {
        return {dims.x * spacing.x, dims.y * spacing.y, dims.z * spacing.z};
    }
    // World position of the low corner (edge, not center) of the grid.
    Vec3 corner() const {
        return {origin.x - 0.5 * spacing.x, origin.y - 0.5 * spacing.y, origin.z - 0.5 * spacing.z};
    }
    bool valid() const {
        return dims.x >= 1 && dims.y >= 1 && dims.z >= 1 &&
               spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0;
    }

    friend bool operator==(const GridGeometry& a, const GridGeometry& b) {
        return a.dims.x == b.dims.x && a.dims.y == b.dims.y && a.dims.z == b.dims.z &&
               a.spacing.x == b.spacing.x && a.spacing.y == b.spacing.y && a.spacing.z == b.spacing.z &&
               a.origin.x == b.origin.x && a.origin.y == b.origin.y && a.origin.z == b.origin.z;
    }
    friend bool operator!=(const GridGeometry& a, const GridGeometry& b) { return !(a == b); }
};

// Grid of given dims/spacing whose world extent is centered on `center`.
inline GridGeometry make_centered_grid(Index3 dims, Vec3 spacing, Vec3 center = {}) {
    GridGeometry g;
    g.dims = dims;
    g.spacing = spacing;
    g.origin = {center.x - 0.5 * (dims.x - 1) * spacing.x,
                center.y - 0.5 * (dims.y - 1) * spacing.y,
                center.z - 0.5 * (dims.z - 1) * spacing.z};
    return g;
}

} // namespace synreg
