#pragma once

#include <vector>

#include "radpoly/geometry.hpp"
#include "radpoly/grid_map.hpp"
#include "radpoly/ism.hpp"

namespace radpoly {

// IoU between the polygon's rasterized free region and a ground-truth mask
// (on the ground-truth grid). Degenerate polygons score 0.
double iou_gt(const RadarPolygon& poly, const FreeSpaceMask& ground_truth);

// Temporal smoothness: IoU of consecutive polygons after compensating the
// earlier one into the later ego frame. Degenerate input scores 0.
double iou_smooth(const RadarPolygon& prev, const Pose& prev_pose,
                  const RadarPolygon& cur, const Pose& cur_pose, double resolution);

// Mean squared error between binary masks on the same grid.
double mse_free(const FreeSpaceMask& predicted, const FreeSpaceMask& ground_truth);

// IoU of the Doppler-predicted polygon against the polygon actually formed
// at the next frame (both already in compatible frames). 0 when degenerate.
double prediction_iou(const RadarPolygon& cur, double dt, const RadarPolygon& next,
                      double resolution);

// Grid cell count over polygon state vertex count (the dense-vs-sparse
// footprint comparison). Throws when the state holds no vertices.
double memory_ratio(const OccupancyGrid& grid, const PolygonState& state);

struct RuntimeStats {
    std::vector<double> per_frame_ms;

    double mean() const;
    double p95() const;
    double max() const;
};

}  // namespace radpoly
