#include "radpoly/collision.hpp"

#include <algorithm>
#include <stdexcept>

#include "radpoly/prediction.hpp"

namespace radpoly {

CollisionKernel build_kernel(std::span<const Vec2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) throw std::invalid_argument("build_kernel: ring needs at least 3 vertices");
    CollisionKernel k;
    k.xs.resize(n);
    k.ys.resize(n);
    k.coeff_a.resize(n);
    k.coeff_b.resize(n);
    k.offset.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        k.xs[i] = ring[i].x;
        k.ys[i] = ring[i].y;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double xi = k.xs[i], yi = k.ys[i];
        const double xj = k.xs[j], yj = k.ys[j];
        k.coeff_a[i] = yi - yj;
        k.coeff_b[i] = xj - xi;
        k.offset[i] = xi * (yj - yi) - yi * (xj - xi);
    }
    return k;
}

CollisionKernel build_kernel(const RadarPolygon& poly) {
    const auto r = poly.ring();
    return build_kernel(r);
}

double resolve_ray_ties(double b, std::span<const double> ys) {
    constexpr double kTieTol = 1e-12;
    constexpr double kNudge = 1e-9;
    for (double y : ys) {
        if (std::abs(b - y) <= kTieTol) return b + kNudge;
    }
    return b;
}

bool point_on_ring(const CollisionKernel& k, double a, double b, double tol) {
    const std::size_t n = k.edge_count();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const Vec2 p{k.xs[i], k.ys[i]};
        const Vec2 q{k.xs[j], k.ys[j]};
        const Vec2 d = q - p;
        const Vec2 w{a - p.x, b - p.y};
        const double len_sq = d.norm_sq();
        double t = len_sq > 0.0 ? std::clamp(w.dot(d) / len_sq, 0.0, 1.0) : 0.0;
        const Vec2 closest = p + d * t;
        const double dx = a - closest.x, dy = b - closest.y;
        if (dx * dx + dy * dy <= tol * tol) return true;
    }
    return false;
}

bool point_in_polygon(const CollisionKernel& k, double a, double b) {
    if (kBoundaryIsInside && point_on_ring(k, a, b)) return true;
    const double br = resolve_ray_ties(b, k.ys);
    const std::size_t n = k.edge_count();
    std::size_t negatives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double ylo = std::min(k.ys[i], k.ys[j]);
        const double yhi = std::max(k.ys[i], k.ys[j]);
        if (!(ylo < br && br < yhi)) continue;  // ray misses this edge's y-span
        const double f = k.coeff_a[i] * a + k.coeff_b[i] * br + k.offset[i];
        if (f * k.coeff_a[i] < 0.0) ++negatives;  // crossing strictly to the right
    }
    return (negatives % 2) == 1;
}

std::vector<std::uint8_t> batch_collision(const CollisionKernel& k,
                                          std::span<const Vec2> queries) {
    std::vector<std::uint8_t> out(queries.size(), 0);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        out[i] = point_in_polygon(k, queries[i].x, queries[i].y) ? 1 : 0;
    }
    return out;
}

std::vector<std::uint8_t> predictive_collision(const RadarPolygon& poly, double dt,
                                               std::span<const Vec2> queries) {
    const RadarPolygon predicted = predict_polygon(poly, dt);
    if (predicted.degenerate())
        throw std::invalid_argument("predictive_collision: predicted polygon is degenerate");
    const CollisionKernel k = build_kernel(predicted);
    return batch_collision(k, queries);
}

}  // namespace radpoly
