#pragma once

#include "radpoly/geometry.hpp"

namespace radpoly {

// Splits a scalar Doppler speed into Cartesian components along the
// sensor-to-vertex ray: v * (pos - sensor) / |pos - sensor|. Throws
// std::invalid_argument when the vertex coincides with the sensor.
Vec2 radial_components(Vec2 vertex_pos, Vec2 sensor, double doppler);

// Doppler-based shape prediction: every real vertex moves by its radial
// velocity times dt; virtual vertices hold still (no target, nothing to
// extrapolate). dt must be non-negative and finite.
RadarPolygon predict_polygon(const RadarPolygon& poly, double dt);

}  // namespace radpoly
