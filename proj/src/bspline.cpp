#include "synreg/bspline.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "synreg/errors.hpp"

namespace synreg {

void bspline_weights(double u, double w[4]) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double mu = 1.0 - u;
    w[0] = mu * mu * mu / 6.0;
    w[1] = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
    w[2] = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
    w[3] = u3 / 6.0;
}

void bspline_weight_derivatives(double u, double dw[4]) {
    const double u2 = u * u;
    const double mu = 1.0 - u;
    dw[0] = -mu * mu / 2.0;
    dw[1] = (3.0 * u2 - 4.0 * u) / 2.0;
    dw[2] = (-3.0 * u2 + 2.0 * u + 1.0) / 2.0;
    dw[3] = u2 / 2.0;
}

BSplineTransform BSplineTransform::for_domain(const GridGeometry& fixed, double spacing_mm) {
    if (!(spacing_mm > 0.0)) throw ConfigError("grid spacing must be positive");
    BSplineTransform t;
    t.grid_spacing = spacing_mm;
    const Vec3 lo = fixed.origin;
    const Vec3 hi{fixed.origin.x + (fixed.dims.x - 1) * fixed.spacing.x,
                  fixed.origin.y + (fixed.dims.y - 1) * fixed.spacing.y,
                  fixed.origin.z + (fixed.dims.z - 1) * fixed.spacing.z};
    t.grid_origin = {lo.x - spacing_mm, lo.y - spacing_mm, lo.z - spacing_mm};
    auto points = [&](double a, double b) {
        const double g_hi = (b - a) / spacing_mm;
        return static_cast<int>(std::floor(g_hi + 1e-9)) + 3;
    };
    t.grid_dims = {points(t.grid_origin.x, hi.x), points(t.grid_origin.y, hi.y),
                   points(t.grid_origin.z, hi.z)};
    t.coefficients.assign(t.control_point_count() * 3, 0.0);
    return t;
}

bool BSplineTransform::supports(const Vec3& p) const {
    for (int a = 0; a < 3; ++a) {
        const double g = (p[a] - grid_origin[a]) / grid_spacing;
        const int i = static_cast<int>(std::floor(g));
        const int n = a == 0 ? grid_dims.x : (a == 1 ? grid_dims.y : grid_dims.z);
        if (i < 1 || i + 2 > n - 1) return false;
    }
    return true;
}

Vec3 BSplineTransform::displace(const Vec3& p) const {
    int base[3];
    double wx[4], wy[4], wz[4];
    double* weights[3] = {wx, wy, wz};
    for (int a = 0; a < 3; ++a) {
        const double g = (p[a] - grid_origin[a]) / grid_spacing;
        const int i = static_cast<int>(std::floor(g));
        const int n = a == 0 ? grid_dims.x : (a == 1 ? grid_dims.y : grid_dims.z);
        if (i < 1 || i + 2 > n - 1) throw OutOfSupport("bspline displace");
        base[a] = i - 1;
        bspline_weights(g - i, weights[a]);
    }

    Vec3 d;
    for (int c = 0; c < 4; ++c) {
        for (int b = 0; b < 4; ++b) {
            const double wyz = wy[b] * wz[c];
            const std::size_t row = coefficient_index(base[0], base[1] + b, base[2] + c);
            for (int a = 0; a < 4; ++a) {
                const double w = wx[a] * wyz;
                const std::size_t idx = row + static_cast<std::size_t>(a) * 3;
                d.x += w * coefficients[idx];
                d.y += w * coefficients[idx + 1];
                d.z += w * coefficients[idx + 2];
            }
        }
    }
    return d;
}

void BSplineTransform::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["grid_spacing"] = grid_spacing;
    j["grid_origin"] = {grid_origin.x, grid_origin.y, grid_origin.z};
    j["grid_dims"] = {grid_dims.x, grid_dims.y, grid_dims.z};
    j["coefficients"] = coefficients;
    std::ofstream f(path);
    if (!f) throw IoError("cannot write transform: " + path.string());
    f << j.dump() << "\n";
}

BSplineTransform BSplineTransform::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open transform: " + path.string());
    nlohmann::json j;
    f >> j;
    BSplineTransform t;
    t.grid_spacing = j.at("grid_spacing").get<double>();
    const auto o = j.at("grid_origin");
    t.grid_origin = {o[0].get<double>(), o[1].get<double>(), o[2].get<double>()};
    const auto d = j.at("grid_dims");
    t.grid_dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
    t.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (t.coefficients.size() != t.control_point_count() * 3)
        throw ConfigError("transform coefficient count does not match grid dims");
    return t;
}

} // namespace synreg
