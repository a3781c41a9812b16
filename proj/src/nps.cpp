#include <cmath>
#include <complex>
#include <vector>

#include "synreg/errors.hpp"
#include "synreg/fft.hpp"
#include "synreg/metrics.hpp"

namespace synreg {

namespace {

// Least-squares plane fit a + b*(i-ci) + c*(j-cj) on a regular patch; the
// centered coordinates make the normal equations diagonal.
void detrend_patch(std::vector<double>& p, int n) {
    const double c = 0.5 * (n - 1);
    double sum = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double v = p[static_cast<std::size_t>(j) * n + i];
            sum += v;
            sx += (i - c) * v;
            sy += (j - c) * v;
        }
    for (int i = 0; i < n; ++i) sxx += (i - c) * (i - c);
    sxx *= n; // same for both axes on a square patch
    const double a = sum / (static_cast<double>(n) * n);
    const double b = sx / sxx;
    const double d = sy / sxx;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            p[static_cast<std::size_t>(j) * n + i] -= a + b * (i - c) + d * (j - c);
}

} // namespace

RadialNps radial_nps(const Volume& v, const LabelMap& roi, std::uint16_t organ_id, int patch) {
    if (v.geom != roi.geom) throw GeometryMismatch("radial_nps roi");
    if (patch < 4) throw ConfigError("radial_nps patch must be >= 4");
    const int nx = v.geom.dims.x, ny = v.geom.dims.y, nz = v.geom.dims.z;
    const double dx = v.geom.spacing.x, dy = v.geom.spacing.y;
    const double dpix = 0.5 * (dx + dy);

    // Per-slice prefix sums of ROI membership for O(1) "patch fully inside" tests.
    const std::size_t slice_size = static_cast<std::size_t>(nx) * ny;
    std::vector<std::uint32_t> prefix((static_cast<std::size_t>(nx) + 1) * (ny + 1));
    Fft2D fft(patch, patch);

    std::vector<double> mean_p2(static_cast<std::size_t>(patch) * patch, 0.0);
    std::size_t patch_count = 0;
    std::vector<double> buf(static_cast<std::size_t>(patch) * patch);
    std::vector<std::complex<double>> cbuf(buf.size());

    for (int k = 0; k < nz; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * slice_size;
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                const std::size_t p = static_cast<std::size_t>(j) * (nx + 1) + i;
                if (i == 0 || j == 0) {
                    prefix[p] = 0;
                    continue;
                }
                const bool in = roi.data[base + static_cast<std::size_t>(j - 1) * nx + (i - 1)] == organ_id;
                prefix[p] = prefix[p - 1] + prefix[p - static_cast<std::size_t>(nx + 1)] -
                            prefix[p - static_cast<std::size_t>(nx + 2)] + (in ? 1u : 0u);
            }
        auto region_count = [&](int i0, int j0) {
            const auto at = [&](int i, int j) {
                return prefix[static_cast<std::size_t>(j) * (nx + 1) + i];
            };
            return at(i0 + patch, j0 + patch) - at(i0, j0 + patch) - at(i0 + patch, j0) + at(i0, j0);
        };

        // Greedy non-overlapping tiling, deterministic scan order.
        for (int j0 = 0; j0 + patch <= ny; j0 += patch)
            for (int i0 = 0; i0 + patch <= nx; i0 += patch) {
                if (region_count(i0, j0) != static_cast<std::uint32_t>(patch) * patch) continue;
                for (int j = 0; j < patch; ++j)
                    for (int i = 0; i < patch; ++i)
                        buf[static_cast<std::size_t>(j) * patch + i] =
                            v.data[base + static_cast<std::size_t>(j0 + j) * nx + (i0 + i)];
                detrend_patch(buf, patch);
                for (std::size_t s = 0; s < buf.size(); ++s) cbuf[s] = buf[s];
                fft.forward(cbuf);
                const double norm = dx * dy / (static_cast<double>(patch) * patch);
                for (std::size_t s = 0; s < cbuf.size(); ++s) mean_p2[s] += std::norm(cbuf[s]) * norm;
                ++patch_count;
            }
    }

    if (patch_count == 0) throw RoiTooSmall("ROI holds no full " + std::to_string(patch) + "^2 patch");
    for (auto& p : mean_p2) p /= static_cast<double>(patch_count);

    // Radial binning at df = 1/(patch * pixel spacing).
    const double df = 1.0 / (patch * dpix);
    const int max_bin = static_cast<int>(std::ceil(std::sqrt(2.0) * patch / 2.0));
    RadialNps out;
    out.bin_centers.resize(static_cast<std::size_t>(max_bin) + 1);
    out.power.assign(static_cast<std::size_t>(max_bin) + 1, 0.0);
    std::vector<std::size_t> hits(static_cast<std::size_t>(max_bin) + 1, 0);
    for (int j = 0; j < patch; ++j)
        for (int i = 0; i < patch; ++i) {
            const int ui = i <= patch / 2 ? i : i - patch;
            const int vj = j <= patch / 2 ? j : j - patch;
            const double r = std::sqrt(static_cast<double>(ui) * ui + static_cast<double>(vj) * vj);
            const int bin = static_cast<int>(std::lround(r));
            out.power[static_cast<std::size_t>(bin)] += mean_p2[static_cast<std::size_t>(j) * patch + i];
            ++hits[static_cast<std::size_t>(bin)];
        }
    for (int b = 0; b <= max_bin; ++b) {
        out.bin_centers[static_cast<std::size_t>(b)] = b * df;
        if (hits[static_cast<std::size_t>(b)] > 0)
            out.power[static_cast<std::size_t>(b)] /= static_cast<double>(hits[static_cast<std::size_t>(b)]);
    }
    out.patch_count = patch_count;
    out.roi_voxels = patch_count * static_cast<std::size_t>(patch) * patch;
    return out;
}

} // namespace synreg
