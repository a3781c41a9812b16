#pragma once

#include <filesystem>
#include <vector>

#include "synreg/geometry.hpp"

namespace synreg {

// Cubic B-spline basis pieces B0..B3 at in-cell fraction u in [0,1], and
// their derivatives with respect to u. Sum of weights is 1, of derivatives 0.
void bspline_weights(double u, double w[4]);
void bspline_weight_derivatives(double u, double dw[4]);

// Free-form deformation: displacement parameterized by coefficients on an
// isotropic control-point lattice. Control point (i,j,k) sits at
// grid_origin + (i,j,k) * grid_spacing; the lattice carries one margin
// point beyond each side of the supported domain.
struct BSplineTransform {
    double grid_spacing = 50.0; // mm
    Vec3 grid_origin;
    Index3 grid_dims;
    std::vector<double> coefficients; // 3 per control point, xyz, x-fastest

    // Lattice sized so the cubic support covers every voxel center of the
    // fixed grid, with the one-point margin included.
    static BSplineTransform for_domain(const GridGeometry& fixed, double spacing_mm);

    std::size_t control_point_count() const {
        return static_cast<std::size_t>(grid_dims.x) * grid_dims.y * grid_dims.z;
    }
    std::size_t coefficient_index(int i, int j, int k) const {
        return ((static_cast<std::size_t>(k) * grid_dims.y + j) * grid_dims.x + i) * 3;
    }
    Vec3 coefficient(int i, int j, int k) const {
        const std::size_t b = coefficient_index(i, j, k);
        return {coefficients[b], coefficients[b + 1], coefficients[b + 2]};
    }
    void set_coefficient(int i, int j, int k, const Vec3& c) {
        const std::size_t b = coefficient_index(i, j, k);
        coefficients[b] = c.x;
        coefficients[b + 1] = c.y;
        coefficients[b + 2] = c.z;
    }

    // Tensor-product interpolation over the 4x4x4 neighborhood.
    // Throws OutOfSupport outside the covered domain.
    Vec3 displace(const Vec3& p) const;

    bool supports(const Vec3& p) const;

    void save(const std::filesystem::path& path) const;
    static BSplineTransform load(const std::filesystem::path& path);
};

} // namespace synreg
