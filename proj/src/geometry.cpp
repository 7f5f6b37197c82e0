#include "radpoly/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "radpoly/collision.hpp"

namespace radpoly {

void SectorConfig::validate() const {
    if (!(delta_theta > 0.0) || !std::isfinite(delta_theta))
        throw std::invalid_argument("SectorConfig: delta_theta must be positive");
    if (!(fov_end > fov_start))
        throw std::invalid_argument("SectorConfig: fov_end must exceed fov_start");
    if (span() > kTwoPi + 1e-9)
        throw std::invalid_argument("SectorConfig: field of view exceeds a full circle");
    if (!(max_range > 0.0) || !std::isfinite(max_range))
        throw std::invalid_argument("SectorConfig: max_range must be positive");
    const double k = span() / delta_theta;
    if (std::abs(k - std::round(k)) > 1e-6 * std::max(1.0, k))
        throw std::invalid_argument(
            "SectorConfig: field of view must be an integer number of sectors");
    if (std::lround(k) < 1)
        throw std::invalid_argument("SectorConfig: need at least one sector");
}

std::optional<int> sector_index(double azimuth, const SectorConfig& cfg) {
    double rel = azimuth - cfg.fov_start;
    if (cfg.full_circle()) {
        rel -= kTwoPi * std::floor(rel / kTwoPi);  // wrap into [0, 2pi)
    }
    if (rel < 0.0 || rel >= cfg.span()) return std::nullopt;
    const int idx = static_cast<int>(std::floor(rel / cfg.delta_theta));
    return std::min(idx, cfg.sector_count() - 1);
}

std::vector<Vec2> RadarPolygon::ring() const {
    std::vector<Vec2> out;
    out.reserve(vertices.size() + 1);
    for (const auto& v : vertices) out.push_back(v.position);
    if (closed_through_origin) out.push_back(sensor_origin);
    return out;
}

double RadarPolygon::area() const {
    const auto r = ring();
    if (r.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Vec2& p = r[i];
        const Vec2& q = r[(i + 1) % r.size()];
        twice += p.cross(q);
    }
    return std::abs(twice) * 0.5;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
    const double d = (b - a).cross(c - a);
    const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x),
                                   std::abs(b.y), std::abs(c.x), std::abs(c.y), 1.0});
    if (std::abs(d) <= 1e-12 * scale * scale) return 0;
    return d > 0.0 ? 1 : -1;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 p3, Vec2 p4) {
    const int d1 = orientation(p3, p4, p1);
    const int d2 = orientation(p3, p4, p2);
    const int d3 = orientation(p1, p2, p3);
    const int d4 = orientation(p1, p2, p4);
    if (d1 != d2 && d3 != d4) return true;
    if (d1 == 0 && on_segment(p3, p4, p1)) return true;
    if (d2 == 0 && on_segment(p3, p4, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, p3)) return true;
    if (d4 == 0 && on_segment(p1, p2, p4)) return true;
    return false;
}

}  // namespace

bool ring_is_simple(std::span<const Vec2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a1 = ring[i];
        const Vec2 a2 = ring[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip edges sharing a vertex (cyclic adjacency).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const Vec2 b1 = ring[j];
            const Vec2 b2 = ring[(j + 1) % n];
            if (segments_intersect(a1, a2, b1, b2)) return false;
        }
    }
    return true;
}

bool polygon_is_simple(const RadarPolygon& poly) {
    const auto r = poly.ring();
    return ring_is_simple(r);
}

FreeSpaceMask FreeSpaceMask::make(Vec2 origin, double resolution, int width, int height) {
    if (!(resolution > 0.0) || width < 0 || height < 0)
        throw std::invalid_argument("FreeSpaceMask: bad grid spec");
    FreeSpaceMask m;
    m.origin = origin;
    m.resolution = resolution;
    m.width = width;
    m.height = height;
    m.cells.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
}

bool FreeSpaceMask::same_grid(const FreeSpaceMask& o) const {
    return width == o.width && height == o.height &&
           std::abs(resolution - o.resolution) < 1e-12 &&
           std::abs(origin.x - o.origin.x) < 1e-9 && std::abs(origin.y - o.origin.y) < 1e-9;
}

std::size_t FreeSpaceMask::count_free() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

FreeSpaceMask rasterize_polygon(const RadarPolygon& poly, Vec2 origin, double resolution,
                                int width, int height) {
    FreeSpaceMask mask = FreeSpaceMask::make(origin, resolution, width, height);
    if (poly.degenerate()) {
        mask.degenerate_source = true;
        return mask;
    }
    const CollisionKernel kernel = build_kernel(poly);
    for (int iy = 0; iy < height; ++iy) {
        for (int ix = 0; ix < width; ++ix) {
            const Vec2 c = mask.cell_center(ix, iy);
            if (point_in_polygon(kernel, c.x, c.y)) mask.set(ix, iy, 1);
        }
    }
    return mask;
}

FreeSpaceMask rasterize_like(const RadarPolygon& poly, const FreeSpaceMask& grid) {
    return rasterize_polygon(poly, grid.origin, grid.resolution, grid.width, grid.height);
}

double mask_iou(const FreeSpaceMask& a, const FreeSpaceMask& b) {
    if (!a.same_grid(b))
        throw std::invalid_argument("mask_iou: masks live on different grids");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        const bool fa = a.cells[i] != 0;
        const bool fb = b.cells[i] != 0;
        inter += (fa && fb) ? 1 : 0;
        uni += (fa || fb) ? 1 : 0;
    }
    if (uni == 0) return 1.0;  // two empty masks agree perfectly
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double polygon_iou(const RadarPolygon& p, const RadarPolygon& q, double resolution) {
    if (p.degenerate() || q.degenerate())
        throw std::invalid_argument("polygon_iou: degenerate polygon");
    if (!(resolution > 0.0))
        throw std::invalid_argument("polygon_iou: resolution must be positive");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const RadarPolygon* poly : {&p, &q}) {
        for (const Vec2& v : poly->ring()) {
            xmin = std::min(xmin, v.x);
            xmax = std::max(xmax, v.x);
            ymin = std::min(ymin, v.y);
            ymax = std::max(ymax, v.y);
        }
    }
    const double pad = resolution;
    const Vec2 origin{xmin - pad, ymin - pad};
    const int width = static_cast<int>(std::ceil((xmax - xmin + 2 * pad) / resolution)) + 1;
    const int height = static_cast<int>(std::ceil((ymax - ymin + 2 * pad) / resolution)) + 1;
    const FreeSpaceMask ma = rasterize_polygon(p, origin, resolution, width, height);
    const FreeSpaceMask mb = rasterize_polygon(q, origin, resolution, width, height);
    return mask_iou(ma, mb);
}

}  // namespace radpoly
