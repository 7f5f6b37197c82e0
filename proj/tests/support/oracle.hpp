#pragma once

// Test-side reference implementations, written independently of the library
// code paths they check (different formulas, same contracts).

#include <algorithm>
#include <cmath>
#include <vector>

#include "radpoly/geometry.hpp"
#include "radpoly/rng.hpp"

namespace oracle {

// Even-odd membership via explicit crossing construction: solve each edge
// for the ray intersection abscissa and compare. Shares only the tie-break
// contract with the library kernel (same nudge constants), not the algebra.
inline bool point_in_polygon_bruteforce(const std::vector<radpoly::Vec2>& ring, double a,
                                        double b) {
    // Boundary counts as inside, like the library.
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const radpoly::Vec2 p = ring[i];
        const radpoly::Vec2 q = ring[(i + 1) % ring.size()];
        const radpoly::Vec2 d = q - p;
        const double len_sq = d.norm_sq();
        const double t =
            len_sq > 0.0 ? std::clamp(((a - p.x) * d.x + (b - p.y) * d.y) / len_sq, 0.0, 1.0)
                         : 0.0;
        const double dx = a - (p.x + t * d.x), dy = b - (p.y + t * d.y);
        if (dx * dx + dy * dy <= 1e-18) return true;
    }
    double br = b;
    for (const auto& v : ring) {
        if (std::abs(br - v.y) <= 1e-12) {
            br = b + 1e-9;
            break;
        }
    }
    int crossings = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const radpoly::Vec2 p = ring[i];
        const radpoly::Vec2 q = ring[(i + 1) % ring.size()];
        if (!(std::min(p.y, q.y) < br && br < std::max(p.y, q.y))) continue;
        const double x_cross = p.x + (br - p.y) * (q.x - p.x) / (q.y - p.y);
        if (x_cross > a) ++crossings;
    }
    return (crossings % 2) == 1;
}

// Random star-shaped polygon: simple by construction.
inline std::vector<radpoly::Vec2> random_star_polygon(radpoly::Rng& rng, int n,
                                                      double r_max = 10.0) {
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (auto& a : angles) a = rng.uniform(0.0, radpoly::kTwoPi);
    std::sort(angles.begin(), angles.end());
    // Collapse near-duplicate spokes so edges keep nonzero length.
    for (std::size_t i = 1; i < angles.size(); ++i)
        if (angles[i] - angles[i - 1] < 1e-4) angles[i] = angles[i - 1] + 1e-4;
    const radpoly::Vec2 center{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    std::vector<radpoly::Vec2> ring;
    ring.reserve(angles.size());
    for (double a : angles) {
        const double r = rng.uniform(0.5, r_max);
        ring.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    return ring;
}

}  // namespace oracle
