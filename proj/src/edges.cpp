#include <algorithm>
#include <cmath>
#include <vector>

#include "synreg/errors.hpp"
#include "synreg/metrics.hpp"

namespace synreg {

namespace {

// 9-tap Gaussian, sigma 1.0.
const std::vector<double>& smooth_kernel() {
    static const std::vector<double> k = [] {
        std::vector<double> v(9);
        double sum = 0.0;
        for (int i = 0; i < 9; ++i) {
            const double d = i - 4;
            v[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
            sum += v[static_cast<std::size_t>(i)];
        }
        for (auto& x : v) x /= sum;
        return v;
    }();
    return k;
}

std::vector<double> smooth(const float* slice, int nx, int ny) {
    const auto& k = smooth_kernel();
    std::vector<double> tmp(static_cast<std::size_t>(nx) * ny), out(tmp.size());
    auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (int t = -4; t <= 4; ++t)
                acc += k[static_cast<std::size_t>(t + 4)] * slice[static_cast<std::size_t>(j) * nx + clampi(i + t, nx)];
            tmp[static_cast<std::size_t>(j) * nx + i] = acc;
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (int t = -4; t <= 4; ++t)
                acc += k[static_cast<std::size_t>(t + 4)] * tmp[static_cast<std::size_t>(clampi(j + t, ny)) * nx + i];
            out[static_cast<std::size_t>(j) * nx + i] = acc;
        }
    return out;
}

} // namespace

std::vector<std::uint8_t> canny_slice(const float* slice, int nx, int ny) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    std::vector<std::uint8_t> edges(n, 0);
    if (nx < 3 || ny < 3) return edges;

    float lo_v = slice[0], hi_v = slice[0];
    for (std::size_t s = 1; s < n; ++s) {
        lo_v = std::min(lo_v, slice[s]);
        hi_v = std::max(hi_v, slice[s]);
    }
    const double range = static_cast<double>(hi_v) - lo_v;
    if (!(range > 0.0)) return edges; // flat slice has no edges

    const std::vector<double> sm = smooth(slice, nx, ny);

    std::vector<double> mag(n, 0.0), gx(n, 0.0), gy(n, 0.0);
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
            auto at = [&](int ii, int jj) { return sm[static_cast<std::size_t>(jj) * nx + ii]; };
            const double sx = (at(i + 1, j - 1) + 2.0 * at(i + 1, j) + at(i + 1, j + 1)) -
                              (at(i - 1, j - 1) + 2.0 * at(i - 1, j) + at(i - 1, j + 1));
            const double sy = (at(i - 1, j + 1) + 2.0 * at(i, j + 1) + at(i + 1, j + 1)) -
                              (at(i - 1, j - 1) + 2.0 * at(i, j - 1) + at(i + 1, j - 1));
            const std::size_t s = static_cast<std::size_t>(j) * nx + i;
            gx[s] = sx;
            gy[s] = sy;
            mag[s] = std::hypot(sx, sy) / 4.0; // Sobel gain: units per pixel
        }

    // Hysteresis thresholds relative to the slice's intensity dynamic range.
    const double hi_thr = 0.2 * range;
    const double lo_thr = 0.1 * range;

    // Non-maximum suppression with 4-sector direction quantization.
    std::vector<std::uint8_t> state(n, 0); // 0 none, 1 weak, 2 strong
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
            const std::size_t s = static_cast<std::size_t>(j) * nx + i;
            const double m = mag[s];
            if (m <= lo_thr) continue;
            const double angle = std::atan2(gy[s], gx[s]);
            const double deg = angle * 57.29577951308232;
            double a = std::fmod(deg + 180.0, 180.0);
            int di = 1, dj = 0;
            if (a >= 22.5 && a < 67.5) {
                di = 1;
                dj = 1;
            } else if (a >= 67.5 && a < 112.5) {
                di = 0;
                dj = 1;
            } else if (a >= 112.5 && a < 157.5) {
                di = -1;
                dj = 1;
            }
            const double m1 = mag[static_cast<std::size_t>(j + dj) * nx + (i + di)];
            const double m2 = mag[static_cast<std::size_t>(j - dj) * nx + (i - di)];
            if (m >= m1 && m >= m2) state[s] = m > hi_thr ? 2 : 1;
        }

    // Grow strong edges through connected weak ones.
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s)
        if (state[s] == 2) {
            edges[s] = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        const std::size_t s = stack.back();
        stack.pop_back();
        const int i = static_cast<int>(s % nx);
        const int j = static_cast<int>(s / nx);
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const int ii = i + di, jj = j + dj;
                if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
                const std::size_t t = static_cast<std::size_t>(jj) * nx + ii;
                if (state[t] == 1 && !edges[t]) {
                    edges[t] = 1;
                    stack.push_back(t);
                }
            }
    }
    return edges;
}

EdgeRatios edge_ratios(const Volume& reference, const Volume& synthetic) {
    if (reference.geom != synthetic.geom) throw GeometryMismatch("edge_ratios volumes");
    const int nx = reference.geom.dims.x, ny = reference.geom.dims.y, nz = reference.geom.dims.z;
    const std::size_t slice = static_cast<std::size_t>(nx) * ny;

    auto dilate1 = [nx, ny](const std::vector<std::uint8_t>& e) {
        std::vector<std::uint8_t> out(e.size(), 0);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!e[static_cast<std::size_t>(j) * nx + i]) continue;
                for (int dj = -1; dj <= 1; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        const int ii = i + di, jj = j + dj;
                        if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
                        out[static_cast<std::size_t>(jj) * nx + ii] = 1;
                    }
            }
        return out;
    };

    std::size_t ref_total = 0, preserved = 0, generated = 0;
    for (int k = 0; k < nz; ++k) {
        const auto ea = canny_slice(reference.data.data() + static_cast<std::size_t>(k) * slice, nx, ny);
        const auto eb = canny_slice(synthetic.data.data() + static_cast<std::size_t>(k) * slice, nx, ny);
        const auto ea_d = dilate1(ea);
        const auto eb_d = dilate1(eb);
        for (std::size_t s = 0; s < slice; ++s) {
            // A 1-pixel match radius absorbs Canny localization jitter.
            if (ea[s]) {
                ++ref_total;
                if (eb_d[s]) ++preserved;
            }
            if (eb[s] && !ea_d[s]) ++generated;
        }
    }
    if (ref_total == 0) throw NoEdgesInReference("reference volume produced no Canny edges");
    EdgeRatios r;
    r.epr = static_cast<double>(preserved) / static_cast<double>(ref_total);
    r.egr = static_cast<double>(generated) / static_cast<double>(ref_total);
    return r;
}

} // namespace synreg
