#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace radpoly {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Log-odds accumulators (vertex confidences, grid cells) saturate here.
inline constexpr double kLogOddsClamp = 20.0;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a <= 0.0) a += kTwoPi;
    return a - kPi;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double azimuth() const { return std::atan2(y, x); }
};

inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// One radar detection. Doppler sign convention: positive = range increasing
// (target receding from the sensor).
struct RadarPoint {
    double x = 0.0;        // m
    double y = 0.0;        // m
    double z = 0.0;        // m
    double doppler = 0.0;  // m/s
    double snr = 0.0;      // linear power ratio
};

// Global vehicle pose; heading normalized to (-pi, pi].
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

// Angular sampling of the sensor field of view. The span must be an integer
// multiple of delta_theta.
struct SectorConfig {
    double delta_theta = deg2rad(2.0);
    double fov_start = deg2rad(-65.0);
    double fov_end = deg2rad(65.0);
    double max_range = 20.0;

    double span() const { return fov_end - fov_start; }
    bool full_circle() const { return std::abs(span() - kTwoPi) < 1e-9; }
    int sector_count() const {
        return static_cast<int>(std::lround(span() / delta_theta));
    }
    double sector_center(int sector) const {
        return fov_start + (sector + 0.5) * delta_theta;
    }
    void validate() const;  // throws std::invalid_argument
};

// Sector bin for an azimuth, or nullopt when outside the field of view.
std::optional<int> sector_index(double azimuth, const SectorConfig& cfg);

// A selected (or virtual) polygon vertex. Virtual vertices are synthetic
// boundary placeholders with zero Doppler and SNR.
struct PolygonVertex {
    Vec2 position{0.0, 0.0};   // sensor frame, m
    double doppler = 0.0;      // m/s
    double snr = 0.0;          // linear
    double confidence = 0.0;   // log-odds
    bool is_virtual = false;
    int sector = -1;
    int age = 0;               // frames of track history
};

// Ordered free-space vertex ring for one timeslot. Vertices are sorted by
// ascending azimuth, at most one per sector. When the field of view spans
// less than a full circle the sensor origin closes the ring; a 360-degree
// ring closes on itself.
struct RadarPolygon {
    std::vector<PolygonVertex> vertices;
    Vec2 sensor_origin{0.0, 0.0};
    bool closed_through_origin = true;
    double timestamp = 0.0;

    // Closed boundary: vertex positions plus the origin when flagged.
    std::vector<Vec2> ring() const;
    bool degenerate() const {
        return vertices.size() + (closed_through_origin ? 1u : 0u) < 3u;
    }
    double area() const;  // shoelace over the ring
};

// True when no two non-adjacent ring edges intersect.
bool polygon_is_simple(const RadarPolygon& poly);
bool ring_is_simple(std::span<const Vec2> ring);

// Binary free-space rasterization on a metric grid. Cell (ix, iy) covers
// [origin + ix*res, origin + (ix+1)*res) x [...]; value 1 = free.
struct FreeSpaceMask {
    Vec2 origin{0.0, 0.0};
    double resolution = 0.1;  // m/cell
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;
    bool degenerate_source = false;  // set when rasterized from a degenerate polygon

    static FreeSpaceMask make(Vec2 origin, double resolution, int width, int height);
    bool same_grid(const FreeSpaceMask& o) const;
    Vec2 cell_center(int ix, int iy) const {
        return {origin.x + (ix + 0.5) * resolution, origin.y + (iy + 0.5) * resolution};
    }
    std::uint8_t at(int ix, int iy) const {
        return cells[static_cast<std::size_t>(iy) * width + ix];
    }
    void set(int ix, int iy, std::uint8_t v) {
        cells[static_cast<std::size_t>(iy) * width + ix] = v;
    }
    std::size_t count_free() const;
};

// Marks a cell free iff its center lies inside the polygon (even-odd rule,
// shared with the collision kernel). A degenerate polygon yields an empty,
// flagged mask.
FreeSpaceMask rasterize_polygon(const RadarPolygon& poly, Vec2 origin,
                                double resolution, int width, int height);
FreeSpaceMask rasterize_like(const RadarPolygon& poly, const FreeSpaceMask& grid);

// |a AND b| / |a OR b|. Grids must match; two empty masks give 1 by
// convention. Throws std::invalid_argument on mismatched grids.
double mask_iou(const FreeSpaceMask& a, const FreeSpaceMask& b);

// Rasterization IoU of two polygons on a shared grid covering the union of
// their bounding boxes. Throws on degenerate input.
double polygon_iou(const RadarPolygon& p, const RadarPolygon& q, double resolution);

}  // namespace radpoly
