#include "radpoly/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "radpoly/prediction.hpp"

namespace radpoly {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string polygon_svg(const RadarPolygon& poly, const SvgOptions& opts) {
    // Metric bounds of everything drawn.
    double xmin = poly.sensor_origin.x, xmax = poly.sensor_origin.x;
    double ymin = poly.sensor_origin.y, ymax = poly.sensor_origin.y;
    auto take = [&](Vec2 p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    };
    for (const auto& v : poly.vertices) take(v.position);
    if (opts.draw_fov && opts.max_range > 0.0) {
        take({opts.max_range, opts.max_range});
        take({-opts.max_range, -opts.max_range});
    }
    xmin -= opts.margin_m;
    ymin -= opts.margin_m;
    xmax += opts.margin_m;
    ymax += opts.margin_m;

    const double extent = std::max(xmax - xmin, ymax - ymin);
    const double scale = opts.size_px / std::max(extent, 1e-6);
    // y flips: SVG grows downward, the scene grows upward.
    auto sx = [&](double x) { return (x - xmin) * scale; };
    auto sy = [&](double y) { return (ymax - y) * scale; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(opts.size_px) + "\" height=\"" + std::to_string(opts.size_px) +
           "\" viewBox=\"0 0 " + std::to_string(opts.size_px) + " " +
           std::to_string(opts.size_px) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    if (opts.draw_fov && opts.max_range > 0.0) {
        const Vec2 a{opts.max_range * std::cos(opts.fov_start),
                     opts.max_range * std::sin(opts.fov_start)};
        const Vec2 b{opts.max_range * std::cos(opts.fov_end),
                     opts.max_range * std::sin(opts.fov_end)};
        const double span = opts.fov_end - opts.fov_start;
        const int large = span > kPi ? 1 : 0;
        svg += "<path d=\"M " + fmt(sx(poly.sensor_origin.x)) + " " +
               fmt(sy(poly.sensor_origin.y)) + " L " + fmt(sx(a.x)) + " " + fmt(sy(a.y)) +
               " A " + fmt(opts.max_range * scale) + " " + fmt(opts.max_range * scale) +
               " 0 " + std::to_string(large) + " 0 " + fmt(sx(b.x)) + " " + fmt(sy(b.y)) +
               " Z\" fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    }

    const auto ring = poly.ring();
    if (ring.size() >= 3) {
        svg += "<polygon points=\"";
        for (std::size_t i = 0; i < ring.size(); ++i) {
            if (i) svg += " ";
            svg += fmt(sx(ring[i].x)) + "," + fmt(sy(ring[i].y));
        }
        svg += "\" fill=\"#cfe8cf\" fill-opacity=\"0.8\" stroke=\"#2d6a2d\" stroke-width=\"1.5\"/>\n";
    }

    for (const auto& v : poly.vertices) {
        const std::string cx = fmt(sx(v.position.x));
        const std::string cy = fmt(sy(v.position.y));
        if (v.is_virtual) {
            svg += "<circle cx=\"" + cx + "\" cy=\"" + cy +
                   "\" r=\"3\" fill=\"none\" stroke=\"#888888\"/>\n";
        } else {
            svg += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"3\" fill=\"#2d6a2d\"/>\n";
            if (v.doppler != 0.0 && opts.arrow_seconds > 0.0) {
                const Vec2 vel =
                    radial_components(v.position, poly.sensor_origin, v.doppler);
                const Vec2 tip = v.position + vel * opts.arrow_seconds;
                svg += "<line x1=\"" + cx + "\" y1=\"" + cy + "\" x2=\"" + fmt(sx(tip.x)) +
                       "\" y2=\"" + fmt(sy(tip.y)) +
                       "\" stroke=\"#cc2222\" stroke-width=\"1.5\"/>\n";
            }
        }
    }

    svg += "<path d=\"M " + fmt(sx(poly.sensor_origin.x) - 6) + " " +
           fmt(sy(poly.sensor_origin.y)) + " h 12 M " + fmt(sx(poly.sensor_origin.x)) + " " +
           fmt(sy(poly.sensor_origin.y) - 6) + " v 12\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace radpoly
