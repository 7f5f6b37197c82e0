#include "radpoly/grid_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radpoly {

void GridConfig::validate() const {
    if (!(resolution > 0.0)) throw std::invalid_argument("GridConfig: resolution must be positive");
    if (size < 1) throw std::invalid_argument("GridConfig: size must be >= 1");
    if (!(free_evidence > 0.0 && free_evidence < 0.5))
        throw std::invalid_argument("GridConfig: free_evidence must lie in (0, 0.5)");
}

OccupancyGrid OccupancyGrid::make(const GridConfig& cfg) {
    cfg.validate();
    OccupancyGrid g;
    g.resolution = cfg.resolution;
    g.size = cfg.size;
    const double half = 0.5 * cfg.size * cfg.resolution;
    g.origin = {cfg.center_x - half, cfg.center_y - half};
    g.log_odds.assign(static_cast<std::size_t>(cfg.size) * cfg.size, 0.0);
    return g;
}

bool OccupancyGrid::world_to_cell(Vec2 p, int& ix, int& iy) const {
    ix = static_cast<int>(std::floor((p.x - origin.x) / resolution));
    iy = static_cast<int>(std::floor((p.y - origin.y) / resolution));
    return contains(ix, iy);
}

void OccupancyGrid::reset() {
    std::fill(log_odds.begin(), log_odds.end(), 0.0);
}

namespace {

void bump(OccupancyGrid& grid, int ix, int iy, double delta) {
    auto& cell = grid.log_odds[static_cast<std::size_t>(iy) * grid.size + ix];
    cell = std::clamp(cell + delta, -kLogOddsClamp, kLogOddsClamp);
}

// Integer Bresenham walk, endpoint excluded.
template <typename Fn>
void walk_ray(int x0, int y0, int x1, int y1, Fn&& visit) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (x != x1 || y != y1) {
        visit(x, y);
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

}  // namespace

void grid_update(OccupancyGrid& grid, std::span<const RadarPoint> frame, const Pose& pose,
                 const FormationConfig& formation, double free_evidence) {
    if (!(free_evidence > 0.0 && free_evidence < 0.5))
        throw std::invalid_argument("grid_update: free_evidence must lie in (0, 0.5)");
    const std::vector<RadarPoint> pts = filter_frame(frame, formation);
    const double l_free = logit(free_evidence);

    const double sigma = formation.epsilon1 / 3.0;
    const double sigma_sq = sigma * sigma;
    const double norm = 1.0 / (kTwoPi * sigma_sq);
    const int reach = static_cast<int>(std::ceil(formation.epsilon1 / grid.resolution));

    int sensor_ix = 0, sensor_iy = 0;
    const bool sensor_inside = grid.world_to_cell({pose.x, pose.y}, sensor_ix, sensor_iy);

    for (const auto& p : pts) {
        const Vec2 world = rotate({p.x, p.y}, pose.heading) + Vec2{pose.x, pose.y};
        int ix = 0, iy = 0;
        if (!grid.world_to_cell(world, ix, iy)) {
            ++grid.skipped_detections;
            continue;
        }
        // Occupancy deposit: Gaussian evidence on cells within epsilon1,
        // squashed and applied through the same log-odds step as the tracker.
        const double p_d = detection_probability(p.snr, formation.p_fa);
        for (int gy = std::max(0, iy - reach); gy <= std::min(grid.size - 1, iy + reach); ++gy) {
            for (int gx = std::max(0, ix - reach); gx <= std::min(grid.size - 1, ix + reach); ++gx) {
                const double d_sq = (grid.cell_center(gx, gy) - world).norm_sq();
                if (d_sq > formation.epsilon1 * formation.epsilon1) continue;
                const double evidence = p_d * norm * std::exp(-d_sq / (2.0 * sigma_sq));
                const double p_occ = normalize_evidence(evidence, formation);
                bump(grid, gx, gy, logit(p_occ));
            }
        }
        // Free-space carving along the sensor ray, detection cell excluded.
        if (sensor_inside) {
            walk_ray(sensor_ix, sensor_iy, ix, iy, [&](int cx, int cy) {
                if (grid.contains(cx, cy)) bump(grid, cx, cy, l_free);
            });
        }
    }
}

FreeSpaceMask grid_free_mask(const OccupancyGrid& grid, double threshold) {
    FreeSpaceMask m = FreeSpaceMask::make(grid.origin, grid.resolution, grid.size, grid.size);
    for (int iy = 0; iy < grid.size; ++iy)
        for (int ix = 0; ix < grid.size; ++ix)
            if (grid.at(ix, iy) < threshold) m.set(ix, iy, 1);
    return m;
}

FreeSpaceMask grid_free_mask_local(const OccupancyGrid& grid, const Pose& pose,
                                   const FreeSpaceMask& like, double threshold) {
    FreeSpaceMask m = FreeSpaceMask::make(like.origin, like.resolution, like.width, like.height);
    for (int iy = 0; iy < m.height; ++iy) {
        for (int ix = 0; ix < m.width; ++ix) {
            const Vec2 world = rotate(m.cell_center(ix, iy), pose.heading) + Vec2{pose.x, pose.y};
            int gx = 0, gy = 0;
            if (!grid.world_to_cell(world, gx, gy)) continue;  // off-grid: unknown, not free
            if (grid.at(gx, gy) < threshold) m.set(ix, iy, 1);
        }
    }
    return m;
}

GridBaseline::GridBaseline(const GridConfig& cfg, const FormationConfig& formation)
    : cfg_(cfg), formation_(formation), grid_(OccupancyGrid::make(cfg)) {
    formation_.validate();
}

void GridBaseline::observe(std::span<const RadarPoint> frame, const Pose& pose) {
    if (cfg_.accumulation_window > 0 && frames_in_window_ >= cfg_.accumulation_window) {
        grid_.reset();
        frames_in_window_ = 0;
    }
    grid_update(grid_, frame, pose, formation_, cfg_.free_evidence);
    ++frames_in_window_;
}

}  // namespace radpoly
