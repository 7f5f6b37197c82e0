#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radpoly/geometry.hpp"

namespace radpoly {

// Points exactly on the boundary count as inside (conservative for
// collision warning).
inline constexpr bool kBoundaryIsInside = true;

// Precomputed per-edge line coefficients for the even-odd crossing test.
// Edge i runs from ring vertex i to vertex i+1 (cyclic). For a query (a, b):
//   F_i = coeff_a[i]*a + coeff_b[i]*b + offset[i]
// where coeff_a[i] = y_i - y_{i+1}, coeff_b[i] = x_{i+1} - x_i and
// offset[i] = x_i*(y_{i+1} - y_i) - y_i*(x_{i+1} - x_i). The horizontal ray
// from the query crosses edge i to the right iff the edge straddles b and
// F_i * coeff_a[i] < 0; an odd crossing count means inside.
struct CollisionKernel {
    std::vector<double> xs, ys;  // ring vertices (cyclic)
    std::vector<double> coeff_a;
    std::vector<double> coeff_b;
    std::vector<double> offset;

    std::size_t edge_count() const { return xs.size(); }
};

// Builds the kernel from a closed ring (implicit edge last->first).
// Throws std::invalid_argument when the ring has fewer than 3 vertices.
CollisionKernel build_kernel(std::span<const Vec2> ring);
CollisionKernel build_kernel(const RadarPolygon& poly);

// Nudges the ray height off any vertex y-coordinate so the crossing count is
// well defined (query lines through vertices are the classic degenerate case).
double resolve_ray_ties(double b, std::span<const double> ys);

// Distance from the query to the nearest ring edge is <= tol.
bool point_on_ring(const CollisionKernel& k, double a, double b, double tol = 1e-9);

// Even-odd membership of a single query point.
bool point_in_polygon(const CollisionKernel& k, double a, double b);

// Vectorized membership; out[i] = 1 iff queries[i] is inside.
std::vector<std::uint8_t> batch_collision(const CollisionKernel& k,
                                          std::span<const Vec2> queries);

// Deforms the polygon by its per-vertex Doppler over dt seconds, then runs
// the batch test against the predicted boundary. Throws when the predicted
// ring is degenerate.
std::vector<std::uint8_t> predictive_collision(const RadarPolygon& poly, double dt,
                                               std::span<const Vec2> queries);

}  // namespace radpoly
