#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synreg/tissue.hpp"
#include "synreg/volume.hpp"

namespace synreg {

enum class Modality { CT, CBCT, MRI };

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& name);

// Spoiled gradient-echo acquisition parameters.
struct VibeParams {
    double te_ms = 4.54;
    double tr_ms = 7.25;
    double alpha_deg = 10.0;
};

// Target noise for one modality: ROI standard deviation in the volume's
// native intensity units (HU for CT/CBCT) plus the radial spectrum shape.
// An empty profile means spectrally white noise.
struct NoiseSpec {
    double magnitude = 0.0;
    std::vector<std::pair<double, double>> radial_profile; // (freq mm^-1, power)

    static NoiseSpec white(double magnitude) { return {magnitude, {}}; }
    // Mid-frequency reconstruction-kernel-like bump, typical of CT.
    static NoiseSpec ct_like(double magnitude, double peak_freq = 0.12);
    // Low-pass shape for the MR surrogate.
    static NoiseSpec lowpass(double magnitude, double cutoff = 0.10);
};

// Axial cylinder selecting the narrow reconstructed field of view.
// center_xy unset means "centered on the liver centroid of the labels".
struct FovCylinder {
    double radius_mm = 100.0;
    double half_height_mm = 0.0; // 0 = unbounded along z
    std::optional<std::pair<double, double>> center_xy;
};

struct AcquisitionSpec {
    Modality modality = Modality::CT;
    int tube_energy_kev = 100;      // CT/CBCT
    VibeParams vibe;                // MRI
    FovCylinder fov_mask;           // CBCT
    std::uint64_t jitter_seed = 0;  // MRI tissue variability
    std::uint64_t noise_seed = 0;
    NoiseSpec noise;

    static AcquisitionSpec ct(int energy_kev, std::uint64_t noise_seed, NoiseSpec noise);
    static AcquisitionSpec cbct(int energy_kev, std::uint64_t noise_seed, NoiseSpec noise,
                                FovCylinder fov = {});
    static AcquisitionSpec mri(std::uint64_t jitter_seed, std::uint64_t noise_seed, NoiseSpec noise,
                               VibeParams vibe = {});
};

// Display windows used before [-1,1] normalization.
WindowSpec modality_window(Modality m);

// HU = 1000 * (mu - mu_water) / mu_water.
double mu_to_hu(double mu_per_cm, double mu_water_per_cm);

// Spoiled gradient-echo steady-state signal:
//   SI = rho * sin(a) * (1 - E1) / (1 - cos(a) * E1) * exp(-TE/T2),
// with E1 = exp(-TR/T1). All exponents are decays.
double vibe_signal(double t1_ms, double t2_ms, double rho, const VibeParams& p);

// Adds zero-mean noise whose 2D radial spectrum follows spec.radial_profile,
// rescaled so the standard deviation over the ROI voxels equals
// spec.magnitude (in the input volume's units). Deterministic per seed.
// limit_to, when given, confines the noise to the selected voxels.
Volume add_textured_noise(const Volume& v, const std::vector<std::uint8_t>& roi,
                          const NoiseSpec& spec, std::uint64_t seed,
                          const std::vector<std::uint8_t>* limit_to = nullptr);

struct SimulationResult {
    Volume image;            // windowed to [-1,1], noise applied
    ResolvedWindow window;   // native-unit endpoints realized by the window
    Volume noiseless;        // windowed, before noise -- the reference image
};

// Phantom state -> one modality volume: physics intensity assignment,
// CBCT FOV masking, Table-style windowing to [-1,1], then textured noise
// scaled on the liver ROI. Throws UnknownLabel for IDs missing from the table.
SimulationResult simulate_detailed(const LabelMap& labels, const TissueTable& table,
                                   const AcquisitionSpec& acq);
Volume simulate(const LabelMap& labels, const TissueTable& table, const AcquisitionSpec& acq);

// Native-intensity volume before windowing (HU or VIBE signal).
Volume native_intensity_volume(const LabelMap& labels, const TissueTable& table,
                               const AcquisitionSpec& acq);

// Liver-centroid axial FOV indicator for the labels (1 inside).
std::vector<std::uint8_t> fov_cylinder_mask(const LabelMap& labels, const FovCylinder& fov);

} // namespace synreg
