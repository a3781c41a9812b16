#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace synreg {

// Discrete tube energies the attenuation table is sampled at.
inline constexpr std::array<int, 7> kTubeEnergiesKev{90, 95, 100, 105, 110, 115, 120};

int tube_energy_index(int energy_kev); // throws ConfigError for off-grid energies

struct TissueProperties {
    std::string name;
    std::array<double, 7> mu_per_cm{}; // linear attenuation at kTubeEnergiesKev
    double t1_ms = 0.0;
    double t2_ms = 0.0;
    double rho = 0.0; // proton density, arbitrary units
};

// Per-organ physical properties driving the modality simulation, keyed by
// organ ID, plus the water attenuation reference needed for HU conversion.
struct TissueTable {
    std::map<std::uint16_t, TissueProperties> organs;
    std::array<double, 7> mu_water_per_cm{};

    const TissueProperties& properties(std::uint16_t label) const; // throws UnknownLabel
    bool has(std::uint16_t label) const { return organs.count(label) != 0; }
    void validate() const;

    // Built-in defaults for the phantom's organ inventory. Attenuation,
    // relaxation and proton-density values are approximate literature values
    // for 3 T / diagnostic energies, not measured data.
    static TissueTable defaults();

    static TissueTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

// Multiplies T1, T2 and rho of every organ by independent uniform factors
// in [0.95, 1.05]; attenuation is untouched. Deterministic per seed.
TissueTable jitter_tissue(const TissueTable& table, std::uint64_t seed);

} // namespace synreg
