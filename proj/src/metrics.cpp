#include "radpoly/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radpoly/prediction.hpp"

namespace radpoly {

double iou_gt(const RadarPolygon& poly, const FreeSpaceMask& ground_truth) {
    if (poly.degenerate()) return 0.0;
    const FreeSpaceMask m = rasterize_like(poly, ground_truth);
    return mask_iou(m, ground_truth);
}

double iou_smooth(const RadarPolygon& prev, const Pose& prev_pose,
                  const RadarPolygon& cur, const Pose& cur_pose, double resolution) {
    if (prev.degenerate() || cur.degenerate()) return 0.0;
    const RadarPolygon prev_in_cur = compensate_polygon(prev, prev_pose, cur_pose);
    return polygon_iou(prev_in_cur, cur, resolution);
}

double mse_free(const FreeSpaceMask& predicted, const FreeSpaceMask& ground_truth) {
    if (!predicted.same_grid(ground_truth))
        throw std::invalid_argument("mse_free: masks live on different grids");
    if (predicted.cells.empty()) return 0.0;
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < predicted.cells.size(); ++i) {
        const int d = static_cast<int>(predicted.cells[i] != 0) -
                      static_cast<int>(ground_truth.cells[i] != 0);
        mismatches += static_cast<std::size_t>(d != 0);
    }
    return static_cast<double>(mismatches) / static_cast<double>(predicted.cells.size());
}

double prediction_iou(const RadarPolygon& cur, double dt, const RadarPolygon& next,
                      double resolution) {
    const RadarPolygon predicted = predict_polygon(cur, dt);
    if (predicted.degenerate() || next.degenerate()) return 0.0;
    return polygon_iou(predicted, next, resolution);
}

double memory_ratio(const OccupancyGrid& grid, const PolygonState& state) {
    const MemoryReport r = state_memory_report(state);
    if (r.vertex_count == 0)
        throw std::invalid_argument("memory_ratio: polygon state holds no vertices");
    const double cells = static_cast<double>(grid.size) * static_cast<double>(grid.size);
    return cells / static_cast<double>(r.vertex_count);
}

double RuntimeStats::mean() const {
    if (per_frame_ms.empty()) return 0.0;
    double sum = 0.0;
    for (double v : per_frame_ms) sum += v;
    return sum / static_cast<double>(per_frame_ms.size());
}

double RuntimeStats::p95() const {
    if (per_frame_ms.empty()) return 0.0;
    std::vector<double> sorted = per_frame_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::min<double>(std::ceil(0.95 * sorted.size()) - 1.0,
                         static_cast<double>(sorted.size() - 1)));
    return sorted[std::max<std::size_t>(idx, 0)];
}

double RuntimeStats::max() const {
    if (per_frame_ms.empty()) return 0.0;
    return *std::max_element(per_frame_ms.begin(), per_frame_ms.end());
}

}  // namespace radpoly
