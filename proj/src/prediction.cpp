#include "radpoly/prediction.hpp"

#include <cmath>
#include <stdexcept>

namespace radpoly {

Vec2 radial_components(Vec2 vertex_pos, Vec2 sensor, double doppler) {
    const Vec2 d = vertex_pos - sensor;
    const double r = d.norm();
    if (!(r > 0.0))
        throw std::invalid_argument("radial_components: vertex coincides with the sensor");
    return {doppler * d.x / r, doppler * d.y / r};
}

RadarPolygon predict_polygon(const RadarPolygon& poly, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("predict_polygon: dt must be finite and non-negative");
    RadarPolygon out = poly;
    out.timestamp = poly.timestamp + dt;
    for (auto& v : out.vertices) {
        if (v.is_virtual || v.doppler == 0.0) continue;
        const Vec2 vel = radial_components(v.position, poly.sensor_origin, v.doppler);
        v.position = v.position + vel * dt;
    }
    return out;
}

}  // namespace radpoly
