#include "synreg/tissue.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "synreg/errors.hpp"
#include "synreg/phantom.hpp"
#include "synreg/rng.hpp"

namespace synreg {

using nlohmann::json;

int tube_energy_index(int energy_kev) {
    for (std::size_t i = 0; i < kTubeEnergiesKev.size(); ++i)
        if (kTubeEnergiesKev[i] == energy_kev) return static_cast<int>(i);
    throw ConfigError("tube energy must be one of 90..120 keV in steps of 5, got " +
                      std::to_string(energy_kev));
}

const TissueProperties& TissueTable::properties(std::uint16_t label) const {
    const auto it = organs.find(label);
    if (it == organs.end()) throw UnknownLabel("organ ID " + std::to_string(label));
    return it->second;
}

void TissueTable::validate() const {
    for (const double mw : mu_water_per_cm)
        if (!(mw > 0.0)) throw ConfigError("mu_water must be positive at every energy");
    for (const auto& [id, p] : organs) {
        for (const double mu : p.mu_per_cm)
            if (!(mu > 0.0)) throw ConfigError("mu must be positive for organ " + std::to_string(id));
        if (!(p.t1_ms > p.t2_ms && p.t2_ms > 0.0))
            throw ConfigError("need t1 > t2 > 0 for organ " + std::to_string(id));
        if (p.rho < 0.0) throw ConfigError("rho must be non-negative for organ " + std::to_string(id));
    }
}

namespace {

std::array<double, 7> water_scaled(const std::array<double, 7>& water, double factor) {
    std::array<double, 7> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = water[i] * factor;
    return out;
}

std::array<double, 7> hu_anchored(const std::array<double, 7>& water, std::array<double, 7> hu) {
    std::array<double, 7> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = water[i] * (1.0 + hu[i] / 1000.0);
    return out;
}

} // namespace

TissueTable TissueTable::defaults() {
    TissueTable t;
    // Water, 90..120 keV step 5.
    t.mu_water_per_cm = {0.1772, 0.1739, 0.1707, 0.1687, 0.1667, 0.1646, 0.1626};
    const auto& w = t.mu_water_per_cm;

    auto add = [&t](Organ o, std::array<double, 7> mu, double t1, double t2, double rho) {
        TissueProperties p;
        p.name = organ_name(o);
        p.mu_per_cm = mu;
        p.t1_ms = t1;
        p.t2_ms = t2;
        p.rho = rho;
        t.organs[static_cast<std::uint16_t>(o)] = p;
    };

    add(Organ::Background, {2e-4, 2e-4, 2e-4, 2e-4, 2e-4, 2e-4, 2e-4}, 2.0, 1.0, 0.0);
    add(Organ::Body, water_scaled(w, 1.040), 900.0, 50.0, 75.0);
    add(Organ::Liver, water_scaled(w, 1.055), 810.0, 42.0, 70.0);
    add(Organ::LungLeft, water_scaled(w, 0.240), 1300.0, 30.0, 15.0);
    add(Organ::LungRight, water_scaled(w, 0.240), 1300.0, 30.0, 15.0);
    add(Organ::KidneyLeft, water_scaled(w, 1.035), 1150.0, 76.0, 85.0);
    add(Organ::KidneyRight, water_scaled(w, 1.035), 1150.0, 76.0, 85.0);
    add(Organ::Spleen, water_scaled(w, 1.050), 1330.0, 61.0, 85.0);
    add(Organ::Spine, hu_anchored(w, {400, 385, 370, 357, 345, 334, 324}), 365.0, 60.0, 40.0);
    add(Organ::Ribs, hu_anchored(w, {600, 578, 556, 537, 519, 503, 488}), 250.0, 40.0, 20.0);
    add(Organ::Aorta, water_scaled(w, 1.045), 1930.0, 275.0, 95.0);
    add(Organ::Stomach, water_scaled(w, 1.030), 900.0, 60.0, 75.0);
    add(Organ::Arms, water_scaled(w, 1.040), 900.0, 50.0, 75.0);
    return t;
}

TissueTable TissueTable::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open tissue table: " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("tissue table parse error: " + std::string(e.what()));
    }
    TissueTable t;
    const auto energies = j.at("energies_kev").get<std::vector<int>>();
    if (energies.size() != kTubeEnergiesKev.size())
        throw ConfigError("tissue table must tabulate 7 energies (90..120 step 5)");
    for (std::size_t i = 0; i < energies.size(); ++i)
        if (energies[i] != kTubeEnergiesKev[i]) throw ConfigError("unexpected energy grid in tissue table");
    const auto mw = j.at("mu_water_per_cm").get<std::vector<double>>();
    if (mw.size() != 7) throw ConfigError("mu_water_per_cm must have 7 entries");
    std::copy(mw.begin(), mw.end(), t.mu_water_per_cm.begin());
    for (const auto& [key, entry] : j.at("organs").items()) {
        TissueProperties p;
        p.name = entry.value("name", key);
        const auto mu = entry.at("mu_per_cm").get<std::vector<double>>();
        if (mu.size() != 7) throw ConfigError("mu_per_cm must have 7 entries for organ " + key);
        std::copy(mu.begin(), mu.end(), p.mu_per_cm.begin());
        p.t1_ms = entry.at("t1_ms").get<double>();
        p.t2_ms = entry.at("t2_ms").get<double>();
        p.rho = entry.at("rho").get<double>();
        t.organs[static_cast<std::uint16_t>(std::stoul(key))] = p;
    }
    t.validate();
    return t;
}

void TissueTable::save(const std::filesystem::path& path) const {
    json j;
    j["energies_kev"] = kTubeEnergiesKev;
    j["mu_water_per_cm"] = mu_water_per_cm;
    j["note"] = "approximate literature values for 3 T relaxation and diagnostic-energy attenuation";
    json organs = json::object();
    for (const auto& [id, p] : this->organs) {
        json e;
        e["name"] = p.name;
        e["mu_per_cm"] = p.mu_per_cm;
        e["t1_ms"] = p.t1_ms;
        e["t2_ms"] = p.t2_ms;
        e["rho"] = p.rho;
        organs[std::to_string(id)] = e;
    }
    j["organs"] = organs;
    std::ofstream f(path);
    if (!f) throw IoError("cannot write tissue table: " + path.string());
    f << j.dump(2) << "\n";
}

TissueTable jitter_tissue(const TissueTable& table, std::uint64_t seed) {
    TissueTable out = table;
    Rng rng(mix_seed(seed, 0x746a6974746572ULL)); // "tjitter"
    // std::map iterates in ascending ID order, so draws are reproducible.
    for (auto& [id, p] : out.organs) {
        p.t1_ms *= rng.uniform(0.95, 1.05);
        p.t2_ms *= rng.uniform(0.95, 1.05);
        p.rho *= rng.uniform(0.95, 1.05);
    }
    return out;
}

} // namespace synreg
