#include "synreg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "synreg/errors.hpp"

namespace synreg {

namespace {

void require_same_geometry(const GridGeometry& a, const GridGeometry& b, const char* op) {
    if (a != b) throw GeometryMismatch(op);
}

} // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw BinMismatch("pearson input lengths differ");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw ZeroVariance("pearson input has no variance");
    return sxy / std::sqrt(sxx * syy);
}

double mae(const Volume& a, const Volume& b, const LabelMap& mask) {
    require_same_geometry(a.geom, b.geom, "mae volumes");
    require_same_geometry(a.geom, mask.geom, "mae mask");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < a.data.size(); ++n) {
        if (mask.data[n] == 0) continue;
        sum += std::abs(static_cast<double>(a.data[n]) - b.data[n]);
        ++count;
    }
    if (count == 0) throw EmptyMask("mae mask selects no voxels");
    return sum / static_cast<double>(count);
}

namespace {

// 11-tap Gaussian, sigma 1.5, normalized.
std::vector<double> ssim_kernel() {
    std::vector<double> k(11);
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double d = i - 5;
        k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable filter over one slice, valid region only (margin 5).
void gauss_filter_slice(const std::vector<double>& src, int nx, int ny,
                        const std::vector<double>& k, std::vector<double>& tmp,
                        std::vector<double>& dst) {
    tmp.assign(src.size(), 0.0);
    dst.assign(src.size(), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 5; i < nx - 5; ++i) {
            double acc = 0.0;
            for (int t = -5; t <= 5; ++t) acc += k[static_cast<std::size_t>(t + 5)] * src[static_cast<std::size_t>(j) * nx + i + t];
            tmp[static_cast<std::size_t>(j) * nx + i] = acc;
        }
    for (int j = 5; j < ny - 5; ++j)
        for (int i = 5; i < nx - 5; ++i) {
            double acc = 0.0;
            for (int t = -5; t <= 5; ++t) acc += k[static_cast<std::size_t>(t + 5)] * tmp[static_cast<std::size_t>(j + t) * nx + i];
            dst[static_cast<std::size_t>(j) * nx + i] = acc;
        }
}

} // namespace

double ssim(const Volume& a, const Volume& b, double dynamic_range) {
    require_same_geometry(a.geom, b.geom, "ssim volumes");
    const int nx = a.geom.dims.x, ny = a.geom.dims.y, nz = a.geom.dims.z;
    if (nx < 11 || ny < 11) throw GeometryMismatch("ssim needs slices of at least 11x11");
    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
    const std::vector<double> kernel = ssim_kernel();
    const std::size_t slice = static_cast<std::size_t>(nx) * ny;

    std::vector<double> xa(slice), xb(slice), aa(slice), bb(slice), ab(slice);
    std::vector<double> mu_a, mu_b, m_aa, m_bb, m_ab, tmp;
    double total = 0.0;
    std::size_t windows = 0;

    for (int k = 0; k < nz; ++k) {
        const float* pa = a.data.data() + static_cast<std::size_t>(k) * slice;
        const float* pb = b.data.data() + static_cast<std::size_t>(k) * slice;
        for (std::size_t n = 0; n < slice; ++n) {
            xa[n] = pa[n];
            xb[n] = pb[n];
            aa[n] = xa[n] * xa[n];
            bb[n] = xb[n] * xb[n];
            ab[n] = xa[n] * xb[n];
        }
        gauss_filter_slice(xa, nx, ny, kernel, tmp, mu_a);
        gauss_filter_slice(xb, nx, ny, kernel, tmp, mu_b);
        gauss_filter_slice(aa, nx, ny, kernel, tmp, m_aa);
        gauss_filter_slice(bb, nx, ny, kernel, tmp, m_bb);
        gauss_filter_slice(ab, nx, ny, kernel, tmp, m_ab);

        for (int j = 5; j < ny - 5; ++j)
            for (int i = 5; i < nx - 5; ++i) {
                const std::size_t n = static_cast<std::size_t>(j) * nx + i;
                const double ma = mu_a[n], mb = mu_b[n];
                const double va = m_aa[n] - ma * ma;
                const double vb = m_bb[n] - mb * mb;
                const double cov = m_ab[n] - ma * mb;
                const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
                const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
                total += num / den;
                ++windows;
            }
    }
    return total / static_cast<double>(windows);
}

double noise_magnitude(const Volume& v, const LabelMap& roi, std::uint16_t organ_id) {
    require_same_geometry(v.geom, roi.geom, "noise_magnitude roi");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < v.data.size(); ++n)
        if (roi.data[n] == organ_id) {
            sum += v.data[n];
            ++count;
        }
    if (count == 0) throw EmptyMask("noise_magnitude ROI selects no voxels");
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t n = 0; n < v.data.size(); ++n)
        if (roi.data[n] == organ_id) {
            const double d = v.data[n] - mean;
            ss += d * d;
        }
    return std::sqrt(ss / static_cast<double>(count));
}

Histogram histogram(const Volume& v, double lo, double hi, int nbins,
                    const LabelMap* mask, bool exclude_background) {
    if (!(lo < hi) || nbins < 1) throw ConfigError("histogram needs lo < hi and nbins >= 1");
    if (mask) require_same_geometry(v.geom, mask->geom, "histogram mask");
    Histogram h;
    h.excluded_background = exclude_background && mask != nullptr;
    h.edges.resize(static_cast<std::size_t>(nbins) + 1);
    for (int i = 0; i <= nbins; ++i)
        h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / nbins;
    h.counts.assign(static_cast<std::size_t>(nbins), 0.0);
    const double scale = nbins / (hi - lo);
    for (std::size_t n = 0; n < v.data.size(); ++n) {
        if (h.excluded_background && mask->data[n] == 0) continue;
        int bin = static_cast<int>((v.data[n] - lo) * scale);
        bin = std::clamp(bin, 0, nbins - 1);
        h.counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    return h;
}

double hist_cc(const Histogram& h1, const Histogram& h2) {
    if (h1.edges != h2.edges) throw EdgeMismatch("hist_cc histograms use different edges");
    double n1 = 0.0, n2 = 0.0;
    for (const double c : h1.counts) n1 += c;
    for (const double c : h2.counts) n2 += c;
    if (n1 <= 0.0 || n2 <= 0.0) throw ZeroVariance("hist_cc on empty histogram");
    std::vector<double> d1(h1.counts), d2(h2.counts);
    for (auto& c : d1) c /= n1;
    for (auto& c : d2) c /= n2;
    return pearson(d1, d2);
}

double dice(const LabelMap& m1, const LabelMap& m2) {
    require_same_geometry(m1.geom, m2.geom, "dice masks");
    std::size_t a = 0, b = 0, both = 0;
    for (std::size_t n = 0; n < m1.data.size(); ++n) {
        const bool in1 = m1.data[n] != 0;
        const bool in2 = m2.data[n] != 0;
        a += in1;
        b += in2;
        both += in1 && in2;
    }
    if (a + b == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

double ncc(const RadialNps& p, const RadialNps& q) {
    if (p.bin_centers.size() != q.bin_centers.size())
        throw BinMismatch("radial NPS bin counts differ");
    for (std::size_t i = 0; i < p.bin_centers.size(); ++i)
        if (std::abs(p.bin_centers[i] - q.bin_centers[i]) > 1e-12)
            throw BinMismatch("radial NPS bin grids differ");
    return pearson(p.power, q.power);
}

} // namespace synreg
