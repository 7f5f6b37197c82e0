#pragma once

#include <string>
#include <vector>

#include "radpoly/config.hpp"
#include "radpoly/metrics.hpp"
#include "radpoly/simulator.hpp"

namespace radpoly {

// How iou_smooth pairs frames: consecutive tracked polygons (default), or
// the Doppler-predicted previous polygon against the current one.
enum class SmoothVariant { consecutive, predicted };

struct EvalOptions {
    std::vector<std::string> methods{"single", "ism", "grid"};
    int frame_limit = -1;  // <= 0: run the whole scenario
    SmoothVariant smooth_variant = SmoothVariant::consecutive;
    bool keep_frame_metrics = false;
};

// Per-method aggregate over one scenario run.
struct MethodResult {
    std::string method;
    double mean_iou_gt = 0.0;
    double mean_iou_smooth = 0.0;
    double mean_mse = 0.0;
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    long degenerate_frames = 0;
    long frames = 0;
    long final_vertex_count = 0;  // polygon methods: vertices in the last frame
    std::vector<double> frame_iou_gt;      // kept when keep_frame_metrics
    std::vector<double> frame_iou_smooth;  // pairs, size frames-1
};

struct EvalReport {
    std::string scenario;
    std::uint64_t seed = 0;
    long frames = 0;
    double memory_ratio = 0.0;  // grid cells / polygon vertices (last frame)
    std::vector<MethodResult> methods;

    const MethodResult* find(const std::string& method) const;
    // include_timing=false yields a byte-stable report (timing fields are the
    // only nondeterministic part of a run).
    std::string to_json_text(bool include_timing) const;
    std::string to_table_text() const;
};

EvalReport run_eval(const Scenario& scenario, const AppConfig& cfg,
                    const EvalOptions& opts);

// Sector-width sweep on one scenario: quality vs. vertex budget.
struct SweepRow {
    double delta_theta_deg = 0.0;
    double mean_iou_gt = 0.0;
    double mean_iou_smooth = 0.0;
    double mean_ms = 0.0;
    long vertex_count = 0;  // final-frame polygon size
};

std::vector<SweepRow> run_sweep_theta(const Scenario& scenario, const AppConfig& cfg,
                                      const std::vector<double>& delta_theta_deg,
                                      int frame_limit);
std::string sweep_to_json_text(const std::vector<SweepRow>& rows);
std::string sweep_to_table_text(const std::vector<SweepRow>& rows);

}  // namespace radpoly
