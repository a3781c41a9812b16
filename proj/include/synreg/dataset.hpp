#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "synreg/metrics.hpp"
#include "synreg/modality.hpp"
#include "synreg/phantom.hpp"

namespace synreg {

enum class Resolution { Desk, Paper };

Resolution resolution_from_name(const std::string& name);
const char* resolution_name(Resolution r);

// Shared grid of the desk-scale dataset: 128x128x64 at 2 mm, centered on
// the liver section so a full sweep stays workstation-sized.
GridGeometry desk_grid();

// Per-modality full-size grids (CT 1/1/2 mm, CBCT 0.486 mm isotropic
// liver-centered, MRI 1/1/3 mm with arm coverage).
GridGeometry paper_grid(Modality m, const PhantomModel& model);

struct DatasetConfig {
    int n_models = 8;
    std::uint64_t base_seed = 20240101;
    std::vector<std::uint64_t> seeds;                  // optional explicit per-model seeds
    std::vector<Modality> modalities{Modality::CT, Modality::CBCT, Modality::MRI};
    RespirationParams respiration;                     // shared default
    std::vector<RespirationParams> respiration_per_model; // optional override
    double ct_noise_hu = 39.0;
    double cbct_noise_hu = 52.0;
    double mri_noise = 0.25; // native VIBE signal units
    double cbct_fov_radius_mm = 100.0;
    Resolution resolution = Resolution::Desk;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> tissue_table_path;
    int workers = 1;

    std::uint64_t model_seed(int model) const;
    RespirationParams model_respiration(int model) const;

    static DatasetConfig from_json_file(const std::filesystem::path& path);
    void apply_json(const std::string& json_text);
};

struct GenerateStats {
    int models_written = 0;
    int models_skipped = 0; // already complete per manifest checksums
    int models_failed = 0;
};

// Writes per-model directories: exhale/inhale label maps (plus the armed
// variants when MRI is simulated), the ground-truth displacement field, one
// volume per modality and state, and a manifest listing all co-registered
// artifacts with checksums. Reruns skip models whose manifest checksums
// still match.
GenerateStats generate_dataset(const DatasetConfig& cfg);

// Per-volume evaluation against the noiseless phantom rendering plus
// liver-ROI noise statistics. Writes per-volume MetricReport JSON, one
// aggregate CSV in Table layout (mean +/- std per modality), and histogram /
// radial-NPS exports.
struct EvaluateStats {
    int volumes_evaluated = 0;
    int volumes_skipped = 0;
};
EvaluateStats evaluate_dataset(const std::filesystem::path& dataset_dir,
                               const std::filesystem::path& out_dir, int workers);

// Dataset directory helpers shared with the sweep harness.
std::filesystem::path model_dir(const std::filesystem::path& dataset_dir, int model);
std::vector<int> models_with_manifest(const std::filesystem::path& dataset_dir);

MetricReport evaluate_volume(const Volume& synthetic, const Volume& reference,
                             const LabelMap& labels, double window_lo, double window_hi);

} // namespace synreg
