#include "synreg/modality.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "synreg/errors.hpp"
#include "synreg/fft.hpp"
#include "synreg/phantom.hpp"
#include "synreg/rng.hpp"
#include "synreg/volume_ops.hpp"

namespace synreg {

const char* modality_name(Modality m) {
    switch (m) {
        case Modality::CT: return "ct";
        case Modality::CBCT: return "cbct";
        case Modality::MRI: return "mri";
    }
    return "unknown";
}

Modality modality_from_name(const std::string& name) {
    if (name == "ct" || name == "CT") return Modality::CT;
    if (name == "cbct" || name == "CBCT") return Modality::CBCT;
    if (name == "mri" || name == "MRI") return Modality::MRI;
    throw ConfigError("unknown modality: " + name);
}

NoiseSpec NoiseSpec::ct_like(double magnitude, double peak_freq) {
    NoiseSpec s;
    s.magnitude = magnitude;
    for (int i = 0; i <= 32; ++i) {
        const double f = i * 0.025;
        const double r = f / peak_freq;
        s.radial_profile.emplace_back(f, r * std::exp(-r * r));
    }
    return s;
}

NoiseSpec NoiseSpec::lowpass(double magnitude, double cutoff) {
    NoiseSpec s;
    s.magnitude = magnitude;
    for (int i = 0; i <= 32; ++i) {
        const double f = i * 0.025;
        const double r = f / cutoff;
        s.radial_profile.emplace_back(f, std::exp(-r * r));
    }
    return s;
}

AcquisitionSpec AcquisitionSpec::ct(int energy_kev, std::uint64_t noise_seed, NoiseSpec noise) {
    AcquisitionSpec a;
    a.modality = Modality::CT;
    a.tube_energy_kev = energy_kev;
    a.noise_seed = noise_seed;
    a.noise = std::move(noise);
    return a;
}

AcquisitionSpec AcquisitionSpec::cbct(int energy_kev, std::uint64_t noise_seed, NoiseSpec noise,
                                      FovCylinder fov) {
    AcquisitionSpec a;
    a.modality = Modality::CBCT;
    a.tube_energy_kev = energy_kev;
    a.noise_seed = noise_seed;
    a.noise = std::move(noise);
    a.fov_mask = fov;
    return a;
}

AcquisitionSpec AcquisitionSpec::mri(std::uint64_t jitter_seed, std::uint64_t noise_seed,
                                     NoiseSpec noise, VibeParams vibe) {
    AcquisitionSpec a;
    a.modality = Modality::MRI;
    a.jitter_seed = jitter_seed;
    a.noise_seed = noise_seed;
    a.noise = std::move(noise);
    a.vibe = vibe;
    return a;
}

WindowSpec modality_window(Modality m) {
    switch (m) {
        case Modality::CT: return WindowSpec::fixed(-1024.0, 1500.0);
        case Modality::CBCT: return WindowSpec::fixed(-1024.0, 2000.0);
        case Modality::MRI: return WindowSpec::percentile(10.0, 90.0);
    }
    throw ConfigError("bad modality");
}

double mu_to_hu(double mu_per_cm, double mu_water_per_cm) {
    if (!(mu_water_per_cm > 0.0)) throw ConfigError("mu_water must be positive");
    return 1000.0 * (mu_per_cm - mu_water_per_cm) / mu_water_per_cm;
}

double vibe_signal(double t1_ms, double t2_ms, double rho, const VibeParams& p) {
    const double a = p.alpha_deg * 0.017453292519943295;
    const double e1 = std::exp(-p.tr_ms / t1_ms);
    return rho * std::sin(a) * (1.0 - e1) / (1.0 - std::cos(a) * e1) * std::exp(-p.te_ms / t2_ms);
}

std::vector<std::uint8_t> fov_cylinder_mask(const LabelMap& labels, const FovCylinder& fov) {
    const GridGeometry& g = labels.geom;
    double cx = 0.0, cy = 0.0, cz = 0.0;
    if (fov.center_xy) {
        cx = fov.center_xy->first;
        cy = fov.center_xy->second;
        cz = g.origin.z + 0.5 * (g.dims.z - 1) * g.spacing.z;
    } else {
        // Liver centroid; the CBCT FOV is liver-centered.
        const std::uint16_t liver = static_cast<std::uint16_t>(Organ::Liver);
        std::size_t count = 0;
        double sx = 0, sy = 0, sz = 0;
        for (int k = 0; k < g.dims.z; ++k)
            for (int j = 0; j < g.dims.y; ++j)
                for (int i = 0; i < g.dims.x; ++i)
                    if (labels.at(i, j, k) == liver) {
                        const Vec3 w = g.voxel_center(i, j, k);
                        sx += w.x;
                        sy += w.y;
                        sz += w.z;
                        ++count;
                    }
        if (count == 0) throw EmptyMask("FOV cylinder wants a liver centroid but no liver labels exist");
        cx = sx / count;
        cy = sy / count;
        cz = sz / count;
    }

    std::vector<std::uint8_t> mask(g.voxel_count(), 0);
    const double r2 = fov.radius_mm * fov.radius_mm;
    std::size_t n = 0;
    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i, ++n) {
                const Vec3 w = g.voxel_center(i, j, k);
                const double dx = w.x - cx, dy = w.y - cy;
                const bool in_xy = dx * dx + dy * dy <= r2;
                const bool in_z = fov.half_height_mm <= 0.0 || std::abs(w.z - cz) <= fov.half_height_mm;
                mask[n] = (in_xy && in_z) ? 1 : 0;
            }
    return mask;
}

namespace {

// Linear interpolation of the target radial power shape; flat outside the
// tabulated range, clamped to be non-negative.
double profile_power(const std::vector<std::pair<double, double>>& profile, double f) {
    if (profile.empty()) return 1.0;
    if (f <= profile.front().first) return std::max(0.0, profile.front().second);
    if (f >= profile.back().first) return std::max(0.0, profile.back().second);
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (f <= profile[i].first) {
            const auto [f0, p0] = profile[i - 1];
            const auto [f1, p1] = profile[i];
            const double t = (f - f0) / (f1 - f0);
            return std::max(0.0, p0 + t * (p1 - p0));
        }
    }
    return std::max(0.0, profile.back().second);
}

bool profile_is_flat(const std::vector<std::pair<double, double>>& profile) {
    if (profile.size() < 2) return true;
    for (std::size_t i = 1; i < profile.size(); ++i)
        if (profile[i].second != profile[0].second) return false;
    return true;
}

} // namespace

Volume add_textured_noise(const Volume& v, const std::vector<std::uint8_t>& roi,
                          const NoiseSpec& spec, std::uint64_t seed,
                          const std::vector<std::uint8_t>* limit_to) {
    if (spec.magnitude < 0.0) throw ConfigError("noise magnitude must be >= 0");
    if (roi.size() != v.data.size()) throw GeometryMismatch("noise ROI size differs from volume");
    if (spec.magnitude == 0.0) return v;

    const GridGeometry& g = v.geom;
    const int nx = g.dims.x, ny = g.dims.y, nz = g.dims.z;
    std::vector<double> noise(v.data.size());
    Rng rng(mix_seed(seed, 0x6e6f697365ULL)); // "noise"

    if (profile_is_flat(spec.radial_profile)) {
        for (auto& n : noise) n = rng.gaussian();
    } else {
        // Per-slice spectral shaping: white noise -> FFT -> sqrt(power) -> back.
        // Slicewise matches the 2D slicewise NPS convention used downstream.
        Fft2D fft(nx, ny);
        const std::size_t slice_size = static_cast<std::size_t>(nx) * ny;
        const double dpix = 0.5 * (g.spacing.x + g.spacing.y);
        std::vector<double> amplitude(slice_size);
        std::size_t idx = 0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i, ++idx) {
                const int ui = i <= nx / 2 ? i : i - nx;
                const int vj = j <= ny / 2 ? j : j - ny;
                const double fx = ui / (nx * dpix);
                const double fy = vj / (ny * dpix);
                const double f = std::hypot(fx, fy);
                amplitude[idx] = (i == 0 && j == 0) ? 0.0 : std::sqrt(profile_power(spec.radial_profile, f));
            }

        std::vector<std::complex<double>> slice(slice_size);
        for (int k = 0; k < nz; ++k) {
            for (std::size_t s = 0; s < slice_size; ++s) slice[s] = rng.gaussian();
            fft.forward(slice);
            for (std::size_t s = 0; s < slice_size; ++s) slice[s] *= amplitude[s];
            fft.inverse(slice);
            double* dst = noise.data() + static_cast<std::size_t>(k) * slice_size;
            for (std::size_t s = 0; s < slice_size; ++s) dst[s] = slice[s].real();
        }
    }

    if (limit_to) {
        if (limit_to->size() != noise.size()) throw GeometryMismatch("noise limit mask size mismatch");
        for (std::size_t n = 0; n < noise.size(); ++n)
            if (!(*limit_to)[n]) noise[n] = 0.0;
    }

    // Zero-mean then exact std over the ROI.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 0; n < noise.size(); ++n)
        if (roi[n]) {
            sum += noise[n];
            ++count;
        }
    if (count == 0) throw EmptyMask("noise scaling ROI is empty");
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t n = 0; n < noise.size(); ++n)
        if (roi[n]) ss += (noise[n] - mean) * (noise[n] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(count));
    if (!(sd > 0.0)) throw ZeroVariance("generated noise has zero variance over the ROI");
    const double scale = spec.magnitude / sd;

    Volume out = v;
    for (std::size_t n = 0; n < noise.size(); ++n) {
        const bool active = !limit_to || (*limit_to)[n];
        if (active) out.data[n] = static_cast<float>(out.data[n] + (noise[n] - mean) * scale);
    }
    return out;
}

Volume native_intensity_volume(const LabelMap& labels, const TissueTable& table,
                               const AcquisitionSpec& acq) {
    table.validate();
    Volume out(labels.geom);

    if (acq.modality == Modality::MRI) {
        const TissueTable jittered = jitter_tissue(table, acq.jitter_seed);
        std::map<std::uint16_t, float> signal;
        for (std::size_t n = 0; n < labels.data.size(); ++n) {
            const std::uint16_t id = labels.data[n];
            auto it = signal.find(id);
            if (it == signal.end()) {
                const TissueProperties& p = jittered.properties(id);
                it = signal.emplace(id, static_cast<float>(vibe_signal(p.t1_ms, p.t2_ms, p.rho, acq.vibe))).first;
            }
            out.data[n] = it->second;
        }
        return out;
    }

    const int e = tube_energy_index(acq.tube_energy_kev);
    const double mu_water = table.mu_water_per_cm[static_cast<std::size_t>(e)];
    std::map<std::uint16_t, float> hu;
    for (std::size_t n = 0; n < labels.data.size(); ++n) {
        const std::uint16_t id = labels.data[n];
        auto it = hu.find(id);
        if (it == hu.end()) {
            const TissueProperties& p = table.properties(id);
            it = hu.emplace(id, static_cast<float>(mu_to_hu(p.mu_per_cm[static_cast<std::size_t>(e)], mu_water))).first;
        }
        out.data[n] = it->second;
    }
    return out;
}

SimulationResult simulate_detailed(const LabelMap& labels, const TissueTable& table,
                                   const AcquisitionSpec& acq) {
    Volume native = native_intensity_volume(labels, table, acq);

    std::vector<std::uint8_t> fov;
    if (acq.modality == Modality::CBCT) {
        fov = fov_cylinder_mask(labels, acq.fov_mask);
        for (std::size_t n = 0; n < native.data.size(); ++n)
            if (!fov[n]) native.data[n] = -1024.0f;
    }

    SimulationResult result;
    result.noiseless = window_normalize(native, modality_window(acq.modality), result.window);

    if (acq.noise.magnitude == 0.0) {
        result.image = result.noiseless;
        return result;
    }

    // Noise magnitude is specified in native units; after [-1,1] windowing
    // the equivalent std shrinks by the window slope.
    NoiseSpec windowed_noise = acq.noise;
    windowed_noise.magnitude = acq.noise.magnitude * 2.0 / result.window.width();

    std::vector<std::uint8_t> liver_roi(labels.data.size(), 0);
    std::size_t liver_count = 0;
    const std::uint16_t liver = static_cast<std::uint16_t>(Organ::Liver);
    for (std::size_t n = 0; n < labels.data.size(); ++n)
        if (labels.data[n] == liver) {
            liver_roi[n] = 1;
            ++liver_count;
        }
    if (liver_count == 0) {
        // No liver on this grid; scale on all foreground voxels instead.
        for (std::size_t n = 0; n < labels.data.size(); ++n) liver_roi[n] = labels.data[n] != 0;
    }

    result.image = add_textured_noise(result.noiseless, liver_roi, windowed_noise, acq.noise_seed,
                                      acq.modality == Modality::CBCT ? &fov : nullptr);
    return result;
}

Volume simulate(const LabelMap& labels, const TissueTable& table, const AcquisitionSpec& acq) {
    return simulate_detailed(labels, table, acq).image;
}

} // namespace synreg
