#include "synreg/volume_ops.hpp"

#include <algorithm>
#include <cmath>

#include "synreg/errors.hpp"

namespace synreg {

float Volume::min_value() const {
    return data.empty() ? 0.0f : *std::min_element(data.begin(), data.end());
}

float Volume::max_value() const {
    return data.empty() ? 0.0f : *std::max_element(data.begin(), data.end());
}

namespace {

struct TrilinearCell {
    int i0, j0, k0;
    double fx, fy, fz; // fractions within the cell
    bool inside;
};

TrilinearCell locate(const GridGeometry& g, const Vec3& p) {
    TrilinearCell c{};
    const Vec3 u = g.world_to_voxel(p);
    // Outside the voxel-center hull counts as out of bounds; no extrapolation.
    if (u.x < 0.0 || u.y < 0.0 || u.z < 0.0 ||
        u.x > g.dims.x - 1 || u.y > g.dims.y - 1 || u.z > g.dims.z - 1) {
        c.inside = false;
        return c;
    }
    c.i0 = std::min(static_cast<int>(u.x), g.dims.x - 2);
    c.j0 = std::min(static_cast<int>(u.y), g.dims.y - 2);
    c.k0 = std::min(static_cast<int>(u.z), g.dims.z - 2);
    if (g.dims.x == 1) c.i0 = 0;
    if (g.dims.y == 1) c.j0 = 0;
    if (g.dims.z == 1) c.k0 = 0;
    c.fx = u.x - c.i0;
    c.fy = u.y - c.j0;
    c.fz = u.z - c.k0;
    c.inside = true;
    return c;
}

inline double corner(const Volume& v, const TrilinearCell& c, int di, int dj, int dk) {
    const int i = std::min(c.i0 + di, v.geom.dims.x - 1);
    const int j = std::min(c.j0 + dj, v.geom.dims.y - 1);
    const int k = std::min(c.k0 + dk, v.geom.dims.z - 1);
    return v.at(i, j, k);
}

} // namespace

float trilinear_sample(const Volume& v, const Vec3& p, float background) {
    const TrilinearCell c = locate(v.geom, p);
    if (!c.inside) return background;
    const double v000 = corner(v, c, 0, 0, 0), v100 = corner(v, c, 1, 0, 0);
    const double v010 = corner(v, c, 0, 1, 0), v110 = corner(v, c, 1, 1, 0);
    const double v001 = corner(v, c, 0, 0, 1), v101 = corner(v, c, 1, 0, 1);
    const double v011 = corner(v, c, 0, 1, 1), v111 = corner(v, c, 1, 1, 1);
    const double c00 = v000 + (v100 - v000) * c.fx;
    const double c10 = v010 + (v110 - v010) * c.fx;
    const double c01 = v001 + (v101 - v001) * c.fx;
    const double c11 = v011 + (v111 - v011) * c.fx;
    const double c0 = c00 + (c10 - c00) * c.fy;
    const double c1 = c01 + (c11 - c01) * c.fy;
    return static_cast<float>(c0 + (c1 - c0) * c.fz);
}

float trilinear_sample(const Volume& v, const Vec3& p) {
    return trilinear_sample(v, p, v.min_value());
}

SampleWithGradient trilinear_sample_gradient(const Volume& v, const Vec3& p, float background) {
    SampleWithGradient out;
    const TrilinearCell c = locate(v.geom, p);
    if (!c.inside) {
        out.value = background;
        return out;
    }
    const double v000 = corner(v, c, 0, 0, 0), v100 = corner(v, c, 1, 0, 0);
    const double v010 = corner(v, c, 0, 1, 0), v110 = corner(v, c, 1, 1, 0);
    const double v001 = corner(v, c, 0, 0, 1), v101 = corner(v, c, 1, 0, 1);
    const double v011 = corner(v, c, 0, 1, 1), v111 = corner(v, c, 1, 1, 1);
    const double fx = c.fx, fy = c.fy, fz = c.fz;

    const double c00 = v000 + (v100 - v000) * fx;
    const double c10 = v010 + (v110 - v010) * fx;
    const double c01 = v001 + (v101 - v001) * fx;
    const double c11 = v011 + (v111 - v011) * fx;
    const double c0 = c00 + (c10 - c00) * fy;
    const double c1 = c01 + (c11 - c01) * fy;
    out.value = static_cast<float>(c0 + (c1 - c0) * fz);

    const double gx = ((v100 - v000) * (1 - fy) + (v110 - v010) * fy) * (1 - fz) +
                      ((v101 - v001) * (1 - fy) + (v111 - v011) * fy) * fz;
    const double gy = ((v010 - v000) * (1 - fx) + (v110 - v100) * fx) * (1 - fz) +
                      ((v011 - v001) * (1 - fx) + (v111 - v101) * fx) * fz;
    const double gz = ((v001 - v000) * (1 - fx) + (v101 - v100) * fx) * (1 - fy) +
                      ((v011 - v010) * (1 - fx) + (v111 - v110) * fx) * fy;
    out.gradient = {gx / v.geom.spacing.x, gy / v.geom.spacing.y, gz / v.geom.spacing.z};
    return out;
}

std::uint16_t nearest_sample(const LabelMap& m, const Vec3& p, std::uint16_t background) {
    const Vec3 u = m.geom.world_to_voxel(p);
    const int i = static_cast<int>(std::lround(u.x));
    const int j = static_cast<int>(std::lround(u.y));
    const int k = static_cast<int>(std::lround(u.z));
    if (!m.geom.contains_index(i, j, k)) return background;
    return m.at(i, j, k);
}

Volume resample(const Volume& v, const Vec3& target_spacing) {
    if (target_spacing.x <= 0 || target_spacing.y <= 0 || target_spacing.z <= 0)
        throw GeometryMismatch("resample spacing must be positive");
    const Vec3 ext = v.geom.extent();
    GridGeometry out_geom;
    out_geom.dims = {static_cast<int>(std::ceil(ext.x / target_spacing.x - 1e-9)),
                     static_cast<int>(std::ceil(ext.y / target_spacing.y - 1e-9)),
                     static_cast<int>(std::ceil(ext.z / target_spacing.z - 1e-9))};
    out_geom.dims.x = std::max(out_geom.dims.x, 1);
    out_geom.dims.y = std::max(out_geom.dims.y, 1);
    out_geom.dims.z = std::max(out_geom.dims.z, 1);
    out_geom.spacing = target_spacing;
    const Vec3 corner = v.geom.corner();
    out_geom.origin = {corner.x + 0.5 * target_spacing.x,
                       corner.y + 0.5 * target_spacing.y,
                       corner.z + 0.5 * target_spacing.z};

    Volume out(out_geom);
    const float background = v.min_value();
    for (int k = 0; k < out_geom.dims.z; ++k)
        for (int j = 0; j < out_geom.dims.y; ++j)
            for (int i = 0; i < out_geom.dims.x; ++i)
                out.at(i, j, k) = trilinear_sample(v, out_geom.voxel_center(i, j, k), background);
    return out;
}

float percentile_nearest_rank(std::vector<float> values, double rank) {
    if (values.empty()) throw EmptyMask("percentile of empty value set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    // Nearest-rank: smallest value with at least rank% of samples at or below it.
    long idx = static_cast<long>(std::ceil(rank / 100.0 * static_cast<double>(n))) - 1;
    idx = std::clamp<long>(idx, 0, static_cast<long>(n) - 1);
    return values[static_cast<std::size_t>(idx)];
}

ResolvedWindow resolve_window(const Volume& v, const WindowSpec& w) {
    if (!(w.lo < w.hi)) throw DegenerateWindow("window lo must be below hi");
    ResolvedWindow r;
    if (w.mode == WindowSpec::Mode::Fixed) {
        r.lo = w.lo;
        r.hi = w.hi;
    } else {
        if (w.lo < 0.0 || w.hi > 100.0) throw DegenerateWindow("percentile ranks must lie in [0,100]");
        r.lo = percentile_nearest_rank(v.data, w.lo);
        r.hi = percentile_nearest_rank(v.data, w.hi);
    }
    if (!(r.lo < r.hi)) throw DegenerateWindow("resolved window is empty");
    return r;
}

Volume window_normalize(const Volume& v, const WindowSpec& w, ResolvedWindow& resolved) {
    resolved = resolve_window(v, w);
    const double lo = resolved.lo, hi = resolved.hi;
    const double scale = 2.0 / (hi - lo);
    Volume out(v.geom);
    for (std::size_t n = 0; n < v.data.size(); ++n) {
        const double clamped = std::clamp(static_cast<double>(v.data[n]), lo, hi);
        out.data[n] = static_cast<float>((clamped - lo) * scale - 1.0);
    }
    return out;
}

Volume window_normalize(const Volume& v, const WindowSpec& w) {
    ResolvedWindow r;
    return window_normalize(v, w, r);
}

Volume warp(const Volume& v, const DisplacementField& d, std::optional<float> background) {
    if (v.geom != d.geom) throw GeometryMismatch("warp: field geometry differs from volume");
    const float bg = background.value_or(v.min_value());
    Volume out(v.geom);
    for (int k = 0; k < v.geom.dims.z; ++k)
        for (int j = 0; j < v.geom.dims.y; ++j)
            for (int i = 0; i < v.geom.dims.x; ++i) {
                const Vec3 x = v.geom.voxel_center(i, j, k);
                out.at(i, j, k) = trilinear_sample(v, x + d.at(i, j, k), bg);
            }
    return out;
}

LabelMap warp(const LabelMap& m, const DisplacementField& d) {
    if (m.geom != d.geom) throw GeometryMismatch("warp: field geometry differs from label map");
    LabelMap out(m.geom);
    for (int k = 0; k < m.geom.dims.z; ++k)
        for (int j = 0; j < m.geom.dims.y; ++j)
            for (int i = 0; i < m.geom.dims.x; ++i) {
                const Vec3 x = m.geom.voxel_center(i, j, k);
                out.at(i, j, k) = nearest_sample(m, x + d.at(i, j, k), 0);
            }
    return out;
}

} // namespace synreg
