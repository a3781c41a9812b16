#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "synreg/errors.hpp"
#include "synreg/fft.hpp"
#include "synreg/metrics.hpp"

namespace synreg {

namespace {

constexpr int kScales = 4;
constexpr int kOrients = 4;
constexpr double kMinWavelength = 6.0;
constexpr double kMult = 2.0;
constexpr double kSigmaOnF = 0.55;
constexpr double kDThetaOnSigma = 1.2;
constexpr double kEps = 1e-4;
constexpr double kNoiseK = 2.0;
constexpr double kPi = 3.14159265358979323846;

// Frequency-domain log-Gabor x angular-spread filter bank for one slice size.
struct FilterBank {
    int nx = 0, ny = 0;
    // filters[o * kScales + s], stored unshifted (DC at index 0).
    std::vector<std::vector<double>> filters;

    void build(int nx_, int ny_) {
        nx = nx_;
        ny = ny_;
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        std::vector<double> radius(n), theta_sin(n), theta_cos(n);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double u = (i <= nx / 2 ? i : i - nx) / static_cast<double>(nx);
                const double v = (j <= ny / 2 ? j : j - ny) / static_cast<double>(ny);
                const std::size_t s = static_cast<std::size_t>(j) * nx + i;
                radius[s] = std::hypot(u, v);
                const double th = std::atan2(-v, u);
                theta_sin[s] = std::sin(th);
                theta_cos[s] = std::cos(th);
            }
        radius[0] = 1.0; // avoid log(0) at DC; the filter value there is zeroed below

        const double log_sigma = std::log(kSigmaOnF);
        const double theta_sigma = kPi / kOrients / kDThetaOnSigma;

        std::vector<std::vector<double>> log_gabor(kScales);
        for (int s = 0; s < kScales; ++s) {
            const double f0 = 1.0 / (kMinWavelength * std::pow(kMult, s));
            auto& g = log_gabor[static_cast<std::size_t>(s)];
            g.resize(n);
            for (std::size_t p = 0; p < n; ++p) {
                const double lr = std::log(radius[p] / f0);
                const double lowpass = 1.0 / (1.0 + std::pow(radius[p] / 0.45, 30.0));
                g[p] = std::exp(-lr * lr / (2.0 * log_sigma * log_sigma)) * lowpass;
            }
            g[0] = 0.0;
        }

        filters.assign(static_cast<std::size_t>(kScales) * kOrients, {});
        for (int o = 0; o < kOrients; ++o) {
            const double angle = o * kPi / kOrients;
            const double ca = std::cos(angle), sa = std::sin(angle);
            std::vector<double> spread(n);
            for (std::size_t p = 0; p < n; ++p) {
                const double ds = theta_sin[p] * ca - theta_cos[p] * sa;
                const double dc = theta_cos[p] * ca + theta_sin[p] * sa;
                const double dtheta = std::abs(std::atan2(ds, dc));
                spread[p] = std::exp(-dtheta * dtheta / (2.0 * theta_sigma * theta_sigma));
            }
            for (int s = 0; s < kScales; ++s) {
                auto& f = filters[static_cast<std::size_t>(o) * kScales + s];
                f.resize(n);
                for (std::size_t p = 0; p < n; ++p)
                    f[p] = log_gabor[static_cast<std::size_t>(s)][p] * spread[p];
            }
        }
    }
};

// Kovesi-style phase congruency (median noise estimate, k=2).
std::vector<double> phase_congruency(const std::vector<double>& img, int nx, int ny,
                                     const FilterBank& bank, const Fft2D& fft) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    std::vector<std::complex<double>> spectrum(n);
    for (std::size_t p = 0; p < n; ++p) spectrum[p] = img[p];
    fft.forward(spectrum);

    std::vector<double> energy_all(n, 0.0), an_all(n, 0.0);
    std::vector<std::complex<double>> eo(n);
    std::vector<std::vector<double>> re(kScales), im(kScales);
    std::vector<double> an0(n);

    for (int o = 0; o < kOrients; ++o) {
        std::vector<double> sum_e(n, 0.0), sum_o(n, 0.0), sum_an(n, 0.0);
        for (int s = 0; s < kScales; ++s) {
            const auto& f = bank.filters[static_cast<std::size_t>(o) * kScales + s];
            for (std::size_t p = 0; p < n; ++p) eo[p] = spectrum[p] * f[p];
            fft.inverse(eo);
            re[static_cast<std::size_t>(s)].resize(n);
            im[static_cast<std::size_t>(s)].resize(n);
            for (std::size_t p = 0; p < n; ++p) {
                const double rr = eo[p].real(), ii = eo[p].imag();
                re[static_cast<std::size_t>(s)][p] = rr;
                im[static_cast<std::size_t>(s)][p] = ii;
                const double a = std::sqrt(rr * rr + ii * ii);
                sum_e[p] += rr;
                sum_o[p] += ii;
                sum_an[p] += a;
                if (s == 0) an0[p] = a;
            }
        }

        // Noise threshold from the smallest-scale amplitude distribution.
        std::vector<double> med(an0);
        std::nth_element(med.begin(), med.begin() + static_cast<std::ptrdiff_t>(n / 2), med.end());
        const double tau = med[n / 2] / std::sqrt(std::log(4.0));
        const double total_tau = tau * (1.0 - std::pow(1.0 / kMult, kScales)) / (1.0 - 1.0 / kMult);
        const double noise_mean = total_tau * std::sqrt(kPi / 2.0);
        const double noise_sigma = total_tau * std::sqrt((4.0 - kPi) / 2.0);
        const double threshold = noise_mean + kNoiseK * noise_sigma;

        for (std::size_t p = 0; p < n; ++p) {
            const double x_energy = std::sqrt(sum_e[p] * sum_e[p] + sum_o[p] * sum_o[p]) + kEps;
            const double mean_e = sum_e[p] / x_energy;
            const double mean_o = sum_o[p] / x_energy;
            double energy = 0.0;
            for (int s = 0; s < kScales; ++s) {
                const double rr = re[static_cast<std::size_t>(s)][p];
                const double ii = im[static_cast<std::size_t>(s)][p];
                energy += rr * mean_e + ii * mean_o - std::abs(rr * mean_o - ii * mean_e);
            }
            energy_all[p] += std::max(energy - threshold, 0.0);
            an_all[p] += sum_an[p];
        }
    }

    std::vector<double> pc(n);
    for (std::size_t p = 0; p < n; ++p) pc[p] = energy_all[p] / (an_all[p] + kEps);
    return pc;
}

// Scharr gradient magnitude (kernel /16), border pixels zero.
std::vector<double> scharr_magnitude(const std::vector<double>& img, int nx, int ny) {
    std::vector<double> g(img.size(), 0.0);
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) {
            auto at = [&](int ii, int jj) { return img[static_cast<std::size_t>(jj) * nx + ii]; };
            const double gx = (3.0 * at(i + 1, j - 1) + 10.0 * at(i + 1, j) + 3.0 * at(i + 1, j + 1) -
                               3.0 * at(i - 1, j - 1) - 10.0 * at(i - 1, j) - 3.0 * at(i - 1, j + 1)) / 16.0;
            const double gy = (3.0 * at(i - 1, j + 1) + 10.0 * at(i, j + 1) + 3.0 * at(i + 1, j + 1) -
                               3.0 * at(i - 1, j - 1) - 10.0 * at(i, j - 1) - 3.0 * at(i + 1, j - 1)) / 16.0;
            g[static_cast<std::size_t>(j) * nx + i] = std::hypot(gx, gy);
        }
    return g;
}

} // namespace

double fsim(const Volume& a, const Volume& b, double range_lo, double range_hi) {
    if (a.geom != b.geom) throw GeometryMismatch("fsim volumes");
    if (!(range_hi > range_lo)) throw ConfigError("fsim dynamic range must be non-empty");
    const int nx = a.geom.dims.x, ny = a.geom.dims.y, nz = a.geom.dims.z;
    const std::size_t slice = static_cast<std::size_t>(nx) * ny;
    const double t1 = 0.85;
    const double t2 = 160.0;
    const double to255 = 255.0 / (range_hi - range_lo);

    FilterBank bank;
    bank.build(nx, ny);
    Fft2D fft(nx, ny);

    double slice_sum = 0.0;
    int slice_used = 0;
    std::vector<double> sa(slice), sb(slice);
    for (int k = 0; k < nz; ++k) {
        const float* pa = a.data.data() + static_cast<std::size_t>(k) * slice;
        const float* pb = b.data.data() + static_cast<std::size_t>(k) * slice;
        for (std::size_t p = 0; p < slice; ++p) {
            sa[p] = (pa[p] - range_lo) * to255;
            sb[p] = (pb[p] - range_lo) * to255;
        }
        const std::vector<double> pc1 = phase_congruency(sa, nx, ny, bank, fft);
        const std::vector<double> pc2 = phase_congruency(sb, nx, ny, bank, fft);
        const std::vector<double> g1 = scharr_magnitude(sa, nx, ny);
        const std::vector<double> g2 = scharr_magnitude(sb, nx, ny);

        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p < slice; ++p) {
            const double s_pc = (2.0 * pc1[p] * pc2[p] + t1) / (pc1[p] * pc1[p] + pc2[p] * pc2[p] + t1);
            const double s_g = (2.0 * g1[p] * g2[p] + t2) / (g1[p] * g1[p] + g2[p] * g2[p] + t2);
            const double pcm = std::max(pc1[p], pc2[p]);
            num += s_pc * s_g * pcm;
            den += pcm;
        }
        if (den > 0.0) {
            slice_sum += num / den;
            ++slice_used;
        }
    }
    // Feature-free everywhere (e.g. two constant volumes): similar by convention.
    if (slice_used == 0) return 1.0;
    return slice_sum / static_cast<double>(slice_used);
}

} // namespace synreg
