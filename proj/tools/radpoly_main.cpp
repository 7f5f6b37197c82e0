#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radpoly/collision.hpp"
#include "radpoly/config.hpp"
#include "radpoly/frame_io.hpp"
#include "radpoly/pipeline.hpp"
#include "radpoly/prediction.hpp"
#include "radpoly/svg_plot.hpp"

namespace {

using namespace radpoly;

// Bad user input that is not a CLI syntax error (unknown scenario, ...).
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scenario resolve_scenario(const std::string& name) {
    auto all = builtin_scenarios();
    const auto it = all.find(name);
    if (it == all.end()) {
        std::string valid;
        for (const auto& n : builtin_scenario_names()) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        throw UsageError("unknown scenario '" + name + "' (valid: " + valid + ")");
    }
    return it->second;
}

AppConfig resolve_config(const std::string& path) {
    if (path.empty()) return AppConfig{};
    return load_config(path);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

std::vector<Vec2> load_query_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Vec2> pts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string a, b;
        if (!(ss >> a)) continue;
        if (a[0] == '#') continue;
        if (!(ss >> b)) throw ParseError(path, line_no, "expected '<x> <y>'");
        try {
            pts.push_back({std::stod(a), std::stod(b)});
        } catch (const std::exception&) {
            throw ParseError(path, line_no, "expected two numbers");
        }
    }
    return pts;
}

int cmd_simulate(const std::string& scenario_name, int frames, std::uint64_t seed,
                 bool seed_set, const std::string& out, const std::string& gt_out) {
    Scenario sc = resolve_scenario(scenario_name);
    if (seed_set) sc.rng_seed = seed;
    const int n = frames > 0 ? std::min(frames, sc.frame_count()) : sc.frame_count();

    std::vector<FrameRecord> records;
    std::vector<MaskRecord> masks;
    records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        SimFrame sim = simulate_frame(sc, i);
        FrameRecord rec;
        rec.timestamp = sim.timestamp;
        rec.pose = sim.pose;
        rec.points = std::move(sim.points);
        records.push_back(std::move(rec));
        if (!gt_out.empty()) masks.push_back({sim.timestamp, std::move(sim.ground_truth)});
    }
    write_text(out, format_frames(records));
    if (!gt_out.empty()) write_text(gt_out, format_masks(masks));
    std::cerr << "simulated " << n << " frames of '" << sc.name << "'\n";
    return 0;
}

int cmd_form(const std::string& in, const std::string& out, const std::string& config) {
    const AppConfig cfg = resolve_config(config);
    const auto frames = load_frames(in);
    std::string text;
    for (const auto& f : frames) {
        const RadarPolygon poly = form_polygon(f.points, cfg.formation(), f.timestamp);
        text += polygon_to_json_line(poly) + "\n";
    }
    write_text(out, text);
    return 0;
}

int cmd_track(const std::string& in, const std::string& out, const std::string& config,
              bool doppler_compensation) {
    AppConfig cfg = resolve_config(config);
    if (doppler_compensation) cfg.doppler_compensation = true;
    const auto frames = load_frames(in);
    PolygonState state;
    std::string text;
    for (const auto& f : frames) {
        const std::optional<Pose> pose =
            cfg.doppler_compensation ? std::nullopt : f.pose;
        state = update_polygon_ism(state, f.points, pose, f.timestamp, cfg.ism);
        text += polygon_to_json_line(state.polygon) + "\n";
    }
    write_text(out, text);
    return 0;
}

int cmd_predict(const std::string& in, const std::string& out, double dt) {
    const auto polys = load_polygons(in);
    std::string text;
    for (const auto& p : polys) {
        text += polygon_to_json_line(predict_polygon(p, dt)) + "\n";
    }
    write_text(out, text);
    return 0;
}

int cmd_collide(const std::string& poly_path, long index, const std::string& points_path,
                double dt, const std::string& out) {
    const auto polys = load_polygons(poly_path);
    if (polys.empty()) throw std::runtime_error(poly_path + ": no polygon records");
    const long n = static_cast<long>(polys.size());
    const long idx = index < 0 ? n - 1 : index;
    if (idx >= n)
        throw UsageError("--index " + std::to_string(index) + " out of range (have " +
                         std::to_string(n) + " records)");
    const RadarPolygon& poly = polys[static_cast<std::size_t>(idx)];
    const auto queries = load_query_points(points_path);

    std::vector<std::uint8_t> flags;
    if (dt > 0.0) {
        flags = predictive_collision(poly, dt, queries);
    } else {
        if (poly.degenerate())
            throw std::runtime_error("polygon record " + std::to_string(idx) +
                                     " is degenerate; no boundary to test against");
        const CollisionKernel kernel = build_kernel(poly);
        flags = batch_collision(kernel, queries);
    }
    std::string text;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        text += "{\"x\":" + format_double(queries[i].x) +
                ",\"y\":" + format_double(queries[i].y) +
                ",\"inside\":" + (flags[i] ? "true" : "false") + "}\n";
        inside += flags[i];
    }
    write_text(out, text);
    std::cerr << inside << "/" << queries.size() << " query points inside\n";
    return 0;
}

int cmd_eval(const std::string& scenario_name, int frames, std::uint64_t seed, bool seed_set,
             const std::string& methods_csv, const std::string& json_out,
             const std::string& metrics_json_out, const std::string& smooth_variant,
             const std::string& config) {
    Scenario sc = resolve_scenario(scenario_name);
    if (seed_set) sc.rng_seed = seed;
    const AppConfig cfg = resolve_config(config);

    EvalOptions opts;
    opts.frame_limit = frames;
    if (smooth_variant == "predicted") {
        opts.smooth_variant = SmoothVariant::predicted;
    } else if (smooth_variant != "consecutive") {
        throw UsageError("--smooth-variant must be 'consecutive' or 'predicted'");
    }
    opts.methods.clear();
    std::stringstream ss(methods_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "single" || tok == "ism" || tok == "grid") {
            opts.methods.push_back(tok);
        } else if (!tok.empty()) {
            throw UsageError("unknown method '" + tok + "' (valid: single, ism, grid)");
        }
    }
    if (opts.methods.empty()) throw UsageError("--methods selected nothing");

    const EvalReport report = run_eval(sc, cfg, opts);
    std::cout << report.to_table_text();
    if (!json_out.empty()) write_text(json_out, report.to_json_text(true));
    if (!metrics_json_out.empty()) write_text(metrics_json_out, report.to_json_text(false));
    return 0;
}

int cmd_sweep(const std::string& scenario_name, int frames, std::uint64_t seed, bool seed_set,
              const std::vector<double>& thetas, const std::string& json_out,
              const std::string& config) {
    Scenario sc = resolve_scenario(scenario_name);
    if (seed_set) sc.rng_seed = seed;
    const AppConfig cfg = resolve_config(config);
    const auto rows = run_sweep_theta(sc, cfg, thetas, frames);
    std::cout << sweep_to_table_text(rows);
    if (!json_out.empty()) write_text(json_out, sweep_to_json_text(rows));
    return 0;
}

int cmd_plot(const std::string& in, long index, const std::string& out,
             const std::string& out_dir, double arrow_seconds, const std::string& config) {
    const AppConfig cfg = resolve_config(config);
    const auto polys = load_polygons(in);
    if (polys.empty()) throw std::runtime_error(in + ": no polygon records");

    SvgOptions opts;
    opts.arrow_seconds = arrow_seconds;
    opts.fov_start = cfg.formation().sector.fov_start;
    opts.fov_end = cfg.formation().sector.fov_end;
    opts.max_range = cfg.formation().sector.max_range;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (std::size_t i = 0; i < polys.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "poly_%06zu.svg", i);
            write_text((std::filesystem::path(out_dir) / name).string(),
                       polygon_svg(polys[i], opts));
        }
        std::cerr << "wrote " << polys.size() << " SVGs to " << out_dir << "\n";
        return 0;
    }
    const long n = static_cast<long>(polys.size());
    const long idx = index < 0 ? n - 1 : index;
    if (idx >= n)
        throw UsageError("--index " + std::to_string(index) + " out of range (have " +
                         std::to_string(n) + " records)");
    write_text(out, polygon_svg(polys[static_cast<std::size_t>(idx)], opts));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deformable radar polygon: free-space polygons from radar point clouds"};
    app.require_subcommand(1);

    std::function<int()> run;

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic scenario as a frame file");
    {
        auto scenario = std::make_shared<std::string>();
        auto frames = std::make_shared<int>(-1);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto out = std::make_shared<std::string>("-");
        auto gt_out = std::make_shared<std::string>();
        auto list = std::make_shared<bool>(false);
        sim->add_option("--scenario", *scenario, "built-in scenario name");
        sim->add_option("--frames", *frames, "limit the number of frames");
        auto* seed_opt = sim->add_option("--seed", *seed, "override the scenario RNG seed");
        sim->add_option("--out", *out, "frame file ('-' = stdout)");
        sim->add_option("--gt-out", *gt_out, "also write ground-truth masks here");
        sim->add_flag("--list", *list, "list scenario names and exit");
        sim->callback([=, &run]() {
            run = [=]() {
                if (*list) {
                    for (const auto& n : builtin_scenario_names()) std::cout << n << "\n";
                    return 0;
                }
                if (scenario->empty()) throw UsageError("--scenario is required (or --list)");
                return cmd_simulate(*scenario, *frames, *seed, seed_opt->count() > 0, *out,
                                    *gt_out);
            };
        });
    }

    // form
    auto* form = app.add_subcommand("form", "single-shot polygon per frame");
    {
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("-");
        auto config = std::make_shared<std::string>();
        form->add_option("--in", *in, "frame file")->required();
        form->add_option("--out", *out, "polygon stream ('-' = stdout)");
        form->add_option("--config", *config, "JSON config file");
        form->callback([=, &run]() { run = [=]() { return cmd_form(*in, *out, *config); }; });
    }

    // track
    auto* track = app.add_subcommand("track", "recursive polygon tracking across frames");
    {
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("-");
        auto config = std::make_shared<std::string>();
        auto doppler = std::make_shared<bool>(false);
        track->add_option("--in", *in, "frame file")->required();
        track->add_option("--out", *out, "polygon stream ('-' = stdout)");
        track->add_option("--config", *config, "JSON config file");
        track->add_flag("--doppler-compensation", *doppler,
                        "ignore poses; compensate motion via per-vertex Doppler");
        track->callback(
            [=, &run]() { run = [=]() { return cmd_track(*in, *out, *config, *doppler); }; });
    }

    // predict
    auto* predict = app.add_subcommand("predict", "Doppler-deform polygons forward in time");
    {
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("-");
        auto dt = std::make_shared<double>(0.1);
        predict->add_option("--in", *in, "polygon stream")->required();
        predict->add_option("--out", *out, "predicted polygon stream ('-' = stdout)");
        predict->add_option("--dt", *dt, "prediction horizon in seconds")->required();
        predict->callback([=, &run]() { run = [=]() { return cmd_predict(*in, *out, *dt); }; });
    }

    // collide
    auto* collide = app.add_subcommand("collide", "point-in-polygon collision check");
    {
        auto poly = std::make_shared<std::string>();
        auto index = std::make_shared<long>(-1);
        auto points = std::make_shared<std::string>();
        auto dt = std::make_shared<double>(0.0);
        auto out = std::make_shared<std::string>("-");
        collide->add_option("--polygons", *poly, "polygon stream")->required();
        collide->add_option("--index", *index, "record index (default: last)");
        collide->add_option("--points", *points, "query points, one '<x> <y>' per line")
            ->required();
        collide->add_option("--dt", *dt, "predict the boundary this far ahead first");
        collide->add_option("--out", *out, "JSONL results ('-' = stdout)");
        collide->callback([=, &run]() {
            run = [=]() { return cmd_collide(*poly, *index, *points, *dt, *out); };
        });
    }

    // eval
    auto* eval = app.add_subcommand("eval", "run a scenario and score the methods");
    {
        auto scenario = std::make_shared<std::string>();
        auto frames = std::make_shared<int>(-1);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto methods = std::make_shared<std::string>("single,ism,grid");
        auto json_out = std::make_shared<std::string>();
        auto metrics_out = std::make_shared<std::string>();
        auto variant = std::make_shared<std::string>("consecutive");
        auto config = std::make_shared<std::string>();
        eval->add_option("--scenario", *scenario, "built-in scenario name")->required();
        eval->add_option("--frames", *frames, "limit the number of frames");
        auto* seed_opt = eval->add_option("--seed", *seed, "override the scenario RNG seed");
        eval->add_option("--methods", *methods, "comma list of single,ism,grid");
        eval->add_option("--json", *json_out, "full report JSON (includes timing)");
        eval->add_option("--metrics-json", *metrics_out,
                         "deterministic report JSON (timing stripped)");
        eval->add_option("--smooth-variant", *variant, "consecutive|predicted");
        eval->add_option("--config", *config, "JSON config file");
        eval->callback([=, &run]() {
            run = [=]() {
                return cmd_eval(*scenario, *frames, *seed, seed_opt->count() > 0, *methods,
                                *json_out, *metrics_out, *variant, *config);
            };
        });
    }

    // sweep-theta
    auto* sweep = app.add_subcommand("sweep-theta", "sector-width sweep on one scenario");
    {
        auto scenario = std::make_shared<std::string>("static_lot");
        auto frames = std::make_shared<int>(-1);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto thetas = std::make_shared<std::vector<double>>();
        auto json_out = std::make_shared<std::string>();
        auto config = std::make_shared<std::string>();
        sweep->add_option("--scenario", *scenario, "built-in scenario name");
        sweep->add_option("--frames", *frames, "limit the number of frames");
        auto* seed_opt = sweep->add_option("--seed", *seed, "override the scenario RNG seed");
        sweep->add_option("thetas", *thetas, "sector widths in degrees")->required();
        sweep->add_option("--json", *json_out, "write rows as JSON");
        sweep->add_option("--config", *config, "JSON config file");
        sweep->callback([=, &run]() {
            run = [=]() {
                return cmd_sweep(*scenario, *frames, *seed, seed_opt->count() > 0, *thetas,
                                 *json_out, *config);
            };
        });
    }

    // plot
    auto* plot = app.add_subcommand("plot", "render polygon records as SVG");
    {
        auto in = std::make_shared<std::string>();
        auto index = std::make_shared<long>(-1);
        auto out = std::make_shared<std::string>("-");
        auto out_dir = std::make_shared<std::string>();
        auto arrows = std::make_shared<double>(1.0);
        auto config = std::make_shared<std::string>();
        plot->add_option("--in", *in, "polygon stream")->required();
        plot->add_option("--index", *index, "record index (default: last)");
        plot->add_option("--out", *out, "SVG file ('-' = stdout)");
        plot->add_option("--out-dir", *out_dir, "write every record as SVG into this directory");
        plot->add_option("--arrow-seconds", *arrows, "Doppler arrow length scale");
        plot->add_option("--config", *config, "JSON config (field-of-view overlay)");
        plot->callback([=, &run]() {
            run = [=]() { return cmd_plot(*in, *index, *out, *out_dir, *arrows, *config); };
        });
    }

    // config
    auto* conf = app.add_subcommand("config", "write the default configuration as JSON");
    {
        auto out = std::make_shared<std::string>("-");
        conf->add_option("--out", *out, "output file ('-' = stdout)");
        conf->callback([=, &run]() {
            run = [=]() {
                write_text(*out, config_to_json_text(AppConfig{}));
                return 0;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return run ? run() : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
