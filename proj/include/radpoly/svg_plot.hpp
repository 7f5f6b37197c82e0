#pragma once

#include <string>

#include "radpoly/geometry.hpp"

namespace radpoly {

struct SvgOptions {
    int size_px = 640;            // square canvas
    double margin_m = 1.0;        // extra metric margin around the content
    double arrow_seconds = 1.0;   // Doppler arrow length = speed * this
    bool draw_fov = true;
    double fov_start = 0.0;       // rad; arc drawn when draw_fov
    double fov_end = 0.0;
    double max_range = 0.0;
};

// Self-contained SVG: free-space fill, vertex markers (virtual ones hollow),
// red Doppler arrows, sensor origin cross. Output is deterministic
// (fixed-precision formatting).
std::string polygon_svg(const RadarPolygon& poly, const SvgOptions& opts);

}  // namespace radpoly
