#include "radpoly/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "radpoly/prediction.hpp"

namespace radpoly {

using nlohmann::json;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point a,
                  std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

GridConfig effective_grid(const GridConfig& base, const Scenario& scenario) {
    GridConfig g = base;
    if (g.auto_center) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& p : scenario.ego_trajectory) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        g.center_x = 0.5 * (xmin + xmax);
        g.center_y = 0.5 * (ymin + ymax);
    }
    return g;
}

}  // namespace

const MethodResult* EvalReport::find(const std::string& method) const {
    for (const auto& m : methods)
        if (m.method == method) return &m;
    return nullptr;
}

EvalReport run_eval(const Scenario& scenario, const AppConfig& cfg, const EvalOptions& opts) {
    scenario.validate();
    AppConfig eff = cfg;
    eff.formation().sector = scenario.sensor;  // the scenario owns the sensor geometry
    eff.validate();
    for (const auto& m : opts.methods)
        if (m != "single" && m != "ism" && m != "grid")
            throw std::invalid_argument("run_eval: unknown method '" + m +
                                        "' (valid: single, ism, grid)");

    const int frames = opts.frame_limit > 0
                           ? std::min(opts.frame_limit, scenario.frame_count())
                           : scenario.frame_count();
    const bool want_single = std::count(opts.methods.begin(), opts.methods.end(), "single") > 0;
    const bool want_ism = std::count(opts.methods.begin(), opts.methods.end(), "ism") > 0;
    const bool want_grid = std::count(opts.methods.begin(), opts.methods.end(), "grid") > 0;

    MethodResult res_single{.method = "single"};
    MethodResult res_ism{.method = "ism"};
    MethodResult res_grid{.method = "grid"};
    RuntimeStats ms_single, ms_ism, ms_grid;

    PolygonState ism_state;
    const GridConfig grid_cfg = effective_grid(eff.grid, scenario);
    GridBaseline grid(grid_cfg, eff.formation());
    OccupancyGrid prev_grid_state = grid.grid();

    RadarPolygon prev_single, prev_ism;
    FreeSpaceMask prev_gt;
    Pose prev_pose;
    const double res = eff.eval_resolution;

    auto accumulate_polygon = [&](MethodResult& r, RuntimeStats&, const RadarPolygon& poly,
                                  const RadarPolygon& prev_poly, const SimFrame& sim,
                                  bool have_prev, double dt) {
        r.frames += 1;
        if (poly.degenerate()) r.degenerate_frames += 1;
        const double iou = iou_gt(poly, sim.ground_truth);
        r.mean_iou_gt += iou;
        r.mean_mse += mse_free(rasterize_like(poly, sim.ground_truth), sim.ground_truth);
        if (opts.keep_frame_metrics) r.frame_iou_gt.push_back(iou);
        if (have_prev) {
            double smooth = 0.0;
            if (opts.smooth_variant == SmoothVariant::predicted) {
                if (!prev_poly.degenerate() && !poly.degenerate()) {
                    const RadarPolygon moved =
                        compensate_polygon(prev_poly, prev_pose, sim.pose);
                    smooth = prediction_iou(moved, dt, poly, res);
                }
            } else {
                smooth = iou_smooth(prev_poly, prev_pose, poly, sim.pose, res);
            }
            r.mean_iou_smooth += smooth;
            if (opts.keep_frame_metrics) r.frame_iou_smooth.push_back(smooth);
        }
    };

    for (int i = 0; i < frames; ++i) {
        const SimFrame sim = simulate_frame(scenario, i);
        const double dt = i > 0 ? sim.timestamp - (i - 1) / scenario.frame_rate : 0.0;
        const std::optional<Pose> track_pose =
            eff.doppler_compensation ? std::nullopt : std::optional<Pose>(sim.pose);

        if (want_single) {
            const auto t0 = std::chrono::steady_clock::now();
            const RadarPolygon poly = form_polygon(sim.points, eff.formation(), sim.timestamp);
            const auto t1 = std::chrono::steady_clock::now();
            ms_single.per_frame_ms.push_back(elapsed_ms(t0, t1));
            accumulate_polygon(res_single, ms_single, poly, prev_single, sim, i > 0, dt);
            prev_single = poly;
        }
        if (want_ism) {
            const auto t0 = std::chrono::steady_clock::now();
            ism_state = update_polygon_ism(ism_state, sim.points, track_pose, sim.timestamp,
                                           eff.ism);
            const auto t1 = std::chrono::steady_clock::now();
            ms_ism.per_frame_ms.push_back(elapsed_ms(t0, t1));
            accumulate_polygon(res_ism, ms_ism, ism_state.polygon, prev_ism, sim, i > 0, dt);
            prev_ism = ism_state.polygon;
        }
        if (want_grid) {
            const auto t0 = std::chrono::steady_clock::now();
            grid.observe(sim.points, sim.pose);
            const auto t1 = std::chrono::steady_clock::now();
            ms_grid.per_frame_ms.push_back(elapsed_ms(t0, t1));

            res_grid.frames += 1;
            const FreeSpaceMask local =
                grid_free_mask_local(grid.grid(), sim.pose, sim.ground_truth,
                                     grid_cfg.free_threshold);
            const double iou = mask_iou(local, sim.ground_truth);
            res_grid.mean_iou_gt += iou;
            res_grid.mean_mse += mse_free(local, sim.ground_truth);
            if (opts.keep_frame_metrics) res_grid.frame_iou_gt.push_back(iou);
            if (i > 0) {
                // Previous grid estimate re-sampled from the current pose.
                const FreeSpaceMask prev_local = grid_free_mask_local(
                    prev_grid_state, sim.pose, sim.ground_truth, grid_cfg.free_threshold);
                const double smooth = mask_iou(prev_local, local);
                res_grid.mean_iou_smooth += smooth;
                if (opts.keep_frame_metrics) res_grid.frame_iou_smooth.push_back(smooth);
            }
            prev_grid_state = grid.grid();
        }
        prev_gt = sim.ground_truth;
        prev_pose = sim.pose;
    }

    auto finish = [&](MethodResult& r, const RuntimeStats& ms) {
        if (r.frames > 0) {
            r.mean_iou_gt /= static_cast<double>(r.frames);
            r.mean_mse /= static_cast<double>(r.frames);
        }
        if (r.frames > 1) r.mean_iou_smooth /= static_cast<double>(r.frames - 1);
        r.mean_ms = ms.mean();
        r.p95_ms = ms.p95();
    };

    EvalReport report;
    report.scenario = scenario.name;
    report.seed = scenario.rng_seed;
    report.frames = frames;
    if (want_single) {
        finish(res_single, ms_single);
        res_single.final_vertex_count = static_cast<long>(prev_single.vertices.size());
        report.methods.push_back(std::move(res_single));
    }
    if (want_ism) {
        finish(res_ism, ms_ism);
        res_ism.final_vertex_count = static_cast<long>(ism_state.polygon.vertices.size());
        report.methods.push_back(std::move(res_ism));
        if (!ism_state.polygon.vertices.empty()) {
            const OccupancyGrid shell = OccupancyGrid::make(grid_cfg);
            report.memory_ratio = memory_ratio(shell, ism_state);
        }
    }
    if (want_grid) {
        finish(res_grid, ms_grid);
        report.methods.push_back(std::move(res_grid));
    }
    return report;
}

std::string EvalReport::to_json_text(bool include_timing) const {
    json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["frames"] = frames;
    j["memory_ratio"] = memory_ratio;
    json jm = json::array();
    for (const auto& m : methods) {
        json row = {{"method", m.method},
                    {"iou_gt", m.mean_iou_gt},
                    {"iou_smooth", m.mean_iou_smooth},
                    {"mse", m.mean_mse},
                    {"degenerate_frames", m.degenerate_frames},
                    {"frames", m.frames},
                    {"final_vertex_count", m.final_vertex_count}};
        if (include_timing) {
            row["ms_mean"] = m.mean_ms;
            row["ms_p95"] = m.p95_ms;
        }
        jm.push_back(std::move(row));
    }
    j["methods"] = std::move(jm);
    return j.dump(2) + "\n";
}

std::string EvalReport::to_table_text() const {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "scenario %s  seed %llu  frames %ld  memory_ratio %.2f\n",
                  scenario.c_str(), static_cast<unsigned long long>(seed), frames,
                  memory_ratio);
    out += buf;
    out += "method   iou_gt  iou_smooth     mse  ms_mean  ms_p95  degenerate\n";
    for (const auto& m : methods) {
        std::snprintf(buf, sizeof(buf), "%-7s %7.4f %11.4f %7.4f %8.3f %7.3f %11ld\n",
                      m.method.c_str(), m.mean_iou_gt, m.mean_iou_smooth, m.mean_mse,
                      m.mean_ms, m.p95_ms, m.degenerate_frames);
        out += buf;
    }
    return out;
}

std::vector<SweepRow> run_sweep_theta(const Scenario& scenario, const AppConfig& cfg,
                                      const std::vector<double>& delta_theta_deg,
                                      int frame_limit) {
    if (delta_theta_deg.empty())
        throw std::invalid_argument("run_sweep_theta: no sector widths given");
    std::vector<SweepRow> rows;
    for (double deg : delta_theta_deg) {
        Scenario sc = scenario;
        sc.sensor.delta_theta = deg2rad(deg);
        sc.sensor.validate();

        EvalOptions opts;
        opts.methods = {"ism"};
        opts.frame_limit = frame_limit;

        const EvalReport report = run_eval(sc, cfg, opts);
        const MethodResult* m = report.find("ism");
        SweepRow row;
        row.delta_theta_deg = deg;
        row.mean_iou_gt = m ? m->mean_iou_gt : 0.0;
        row.mean_iou_smooth = m ? m->mean_iou_smooth : 0.0;
        row.mean_ms = m ? m->mean_ms : 0.0;
        row.vertex_count = m ? m->final_vertex_count : 0;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_json_text(const std::vector<SweepRow>& rows) {
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"delta_theta_deg", r.delta_theta_deg},
                     {"iou_gt", r.mean_iou_gt},
                     {"iou_smooth", r.mean_iou_smooth},
                     {"ms_mean", r.mean_ms},
                     {"vertex_count", r.vertex_count}});
    }
    return j.dump(2) + "\n";
}

std::string sweep_to_table_text(const std::vector<SweepRow>& rows) {
    std::string out = "delta_theta_deg  iou_gt  iou_smooth  ms_mean  vertex_count\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%15.2f %7.4f %11.4f %8.3f %13ld\n",
                      r.delta_theta_deg, r.mean_iou_gt, r.mean_iou_smooth, r.mean_ms,
                      r.vertex_count);
        out += buf;
    }
    return out;
}

}  // namespace radpoly
