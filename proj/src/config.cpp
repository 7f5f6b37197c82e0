#include "radpoly/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace radpoly {

using nlohmann::json;

void AppConfig::validate() const {
    ism.validate();
    grid.validate();
    if (!(eval_resolution > 0.0))
        throw std::invalid_argument("AppConfig: eval resolution must be positive");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& section) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key))
            throw std::runtime_error("config: unknown key '" + key + "' in " + section);
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

AppConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: bad JSON: ") + e.what());
    }
    reject_unknown(j, {"formation", "ism", "grid", "eval"}, "the config root");

    AppConfig cfg;
    if (j.contains("formation")) {
        const json& f = j.at("formation");
        reject_unknown(f,
                       {"delta_theta_deg", "fov_start_deg", "fov_end_deg", "max_range",
                        "epsilon1", "p_fa", "p_bar", "sigma_p", "p_thr", "l_thr", "z_min",
                        "z_max", "max_candidates_per_sector"},
                       "formation");
        FormationConfig& fc = cfg.formation();
        double v = 0.0;
        if (f.contains("delta_theta_deg")) {
            v = f.at("delta_theta_deg").get<double>();
            fc.sector.delta_theta = deg2rad(v);
        }
        if (f.contains("fov_start_deg")) {
            v = f.at("fov_start_deg").get<double>();
            fc.sector.fov_start = deg2rad(v);
        }
        if (f.contains("fov_end_deg")) {
            v = f.at("fov_end_deg").get<double>();
            fc.sector.fov_end = deg2rad(v);
        }
        maybe(f, "max_range", fc.sector.max_range);
        maybe(f, "epsilon1", fc.epsilon1);
        maybe(f, "p_fa", fc.p_fa);
        maybe(f, "p_bar", fc.p_bar);
        maybe(f, "sigma_p", fc.sigma_p);
        maybe(f, "p_thr", fc.p_thr);
        maybe(f, "l_thr", fc.l_thr);
        maybe(f, "z_min", fc.z_min);
        maybe(f, "z_max", fc.z_max);
        maybe(f, "max_candidates_per_sector", fc.max_candidates_per_sector);
    }
    if (j.contains("ism")) {
        const json& i = j.at("ism");
        reject_unknown(i, {"epsilon2", "l_pen", "l_init", "min_association_age", "uncertain_ttl"},
                       "ism");
        maybe(i, "epsilon2", cfg.ism.epsilon2);
        maybe(i, "l_pen", cfg.ism.l_pen);
        maybe(i, "l_init", cfg.ism.l_init);
        maybe(i, "min_association_age", cfg.ism.min_association_age);
        maybe(i, "uncertain_ttl", cfg.ism.uncertain_ttl);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g,
                       {"resolution", "size", "center_x", "center_y", "auto_center",
                        "free_evidence", "accumulation_window", "free_threshold"},
                       "grid");
        maybe(g, "resolution", cfg.grid.resolution);
        maybe(g, "size", cfg.grid.size);
        maybe(g, "center_x", cfg.grid.center_x);
        maybe(g, "center_y", cfg.grid.center_y);
        maybe(g, "auto_center", cfg.grid.auto_center);
        maybe(g, "free_evidence", cfg.grid.free_evidence);
        maybe(g, "accumulation_window", cfg.grid.accumulation_window);
        maybe(g, "free_threshold", cfg.grid.free_threshold);
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        reject_unknown(e, {"resolution", "doppler_compensation"}, "eval");
        maybe(e, "resolution", cfg.eval_resolution);
        maybe(e, "doppler_compensation", cfg.doppler_compensation);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        // Out-of-range values in a config document are bad data, not a caller bug.
        throw std::runtime_error(e.what());
    }
    return cfg;
}

std::string config_to_json_text(const AppConfig& cfg) {
    const FormationConfig& fc = cfg.formation();
    json j;
    j["formation"] = {{"delta_theta_deg", rad2deg(fc.sector.delta_theta)},
                      {"fov_start_deg", rad2deg(fc.sector.fov_start)},
                      {"fov_end_deg", rad2deg(fc.sector.fov_end)},
                      {"max_range", fc.sector.max_range},
                      {"epsilon1", fc.epsilon1},
                      {"p_fa", fc.p_fa},
                      {"p_bar", fc.p_bar},
                      {"sigma_p", fc.sigma_p},
                      {"p_thr", fc.p_thr},
                      {"l_thr", fc.l_thr},
                      {"z_min", fc.z_min},
                      {"z_max", fc.z_max},
                      {"max_candidates_per_sector", fc.max_candidates_per_sector}};
    j["ism"] = {{"epsilon2", cfg.ism.epsilon2},
                {"l_pen", cfg.ism.l_pen},
                {"l_init", cfg.ism.l_init},
                {"min_association_age", cfg.ism.min_association_age},
                {"uncertain_ttl", cfg.ism.uncertain_ttl}};
    j["grid"] = {{"resolution", cfg.grid.resolution},
                 {"size", cfg.grid.size},
                 {"center_x", cfg.grid.center_x},
                 {"center_y", cfg.grid.center_y},
                 {"auto_center", cfg.grid.auto_center},
                 {"free_evidence", cfg.grid.free_evidence},
                 {"accumulation_window", cfg.grid.accumulation_window},
                 {"free_threshold", cfg.grid.free_threshold}};
    j["eval"] = {{"resolution", cfg.eval_resolution},
                 {"doppler_compensation", cfg.doppler_compensation}};
    return j.dump(2) + "\n";
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

void save_config(const AppConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << config_to_json_text(cfg);
}

}  // namespace radpoly
