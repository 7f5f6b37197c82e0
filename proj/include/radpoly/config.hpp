#pragma once

#include <filesystem>
#include <string>

#include "radpoly/grid_map.hpp"
#include "radpoly/ism.hpp"

namespace radpoly {

// Aggregate runtime configuration. The formation block nested in `ism` is
// the single source of truth for sensor and evidence parameters.
struct AppConfig {
    IsmConfig ism{};
    GridConfig grid{};
    double eval_resolution = 0.1;     // raster resolution for IoU metrics, m
    bool doppler_compensation = false;  // ignore poses, compensate via Doppler

    const FormationConfig& formation() const { return ism.formation; }
    FormationConfig& formation() { return ism.formation; }
    void validate() const;
};

// JSON round trip. Angles live in the file as degrees, everything else SI.
// Unknown keys are rejected so typos do not silently fall back to defaults.
AppConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const AppConfig& cfg);
AppConfig load_config(const std::filesystem::path& path);
void save_config(const AppConfig& cfg, const std::filesystem::path& path);

}  // namespace radpoly
