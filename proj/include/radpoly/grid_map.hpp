#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radpoly/formation.hpp"
#include "radpoly/geometry.hpp"

namespace radpoly {

struct GridConfig {
    double resolution = 0.3;       // m/cell
    int size = 200;                // cells per side (square, world-centered)
    double center_x = 0.0;         // grid center in world coordinates, m
    double center_y = 0.0;
    bool auto_center = true;       // let the evaluation pipeline center the grid on the scene
    double free_evidence = 0.3;    // pseudo-occupancy deposited along rays (< 0.5 = free)
    int accumulation_window = 70;  // frames between grid resets; <= 0 disables
    double free_threshold = 0.0;   // log-odds below this counts as free

    void validate() const;  // throws std::invalid_argument
};

// World-frame log-odds occupancy grid, the conventional dense baseline.
struct OccupancyGrid {
    Vec2 origin{0.0, 0.0};  // lower-left corner, world frame
    double resolution = 0.3;
    int size = 0;
    std::vector<double> log_odds;            // size*size, clamped to +-kLogOddsClamp
    std::int64_t skipped_detections = 0;     // detections outside the extent

    static OccupancyGrid make(const GridConfig& cfg);
    bool contains(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < size && iy < size;
    }
    double at(int ix, int iy) const {
        return log_odds[static_cast<std::size_t>(iy) * size + ix];
    }
    bool world_to_cell(Vec2 p, int& ix, int& iy) const;
    Vec2 cell_center(int ix, int iy) const {
        return {origin.x + (ix + 0.5) * resolution, origin.y + (iy + 0.5) * resolution};
    }
    void reset();  // zeroes all cells, keeps the skip counter
};

// Inverse-sensor-model update for one frame: every height-gated detection
// deposits Gaussian occupancy evidence (same kernel as polygon formation) on
// cells within epsilon1 of its world position, and the sensor-to-detection
// ray carves free evidence through the cells it traverses. Both go through
// the same log-odds step as the polygon tracker. Detections outside the grid
// extent are skipped and counted.
void grid_update(OccupancyGrid& grid, std::span<const RadarPoint> frame, const Pose& pose,
                 const FormationConfig& formation, double free_evidence);

// Thresholds the grid into a binary free mask (log-odds < threshold).
FreeSpaceMask grid_free_mask(const OccupancyGrid& grid, double threshold);

// Samples the grid's free decision onto a sensor-local mask grid (used to
// compare against polygon masks defined in the sensor frame).
FreeSpaceMask grid_free_mask_local(const OccupancyGrid& grid, const Pose& pose,
                                   const FreeSpaceMask& like, double threshold);

// Frame-windowed runner: forgets the grid every accumulation_window frames
// so stale evidence does not pin down a moving scene.
class GridBaseline {
  public:
    GridBaseline(const GridConfig& cfg, const FormationConfig& formation);
    void observe(std::span<const RadarPoint> frame, const Pose& pose);
    const OccupancyGrid& grid() const { return grid_; }
    FreeSpaceMask free_mask() const { return grid_free_mask(grid_, cfg_.free_threshold); }
    FreeSpaceMask free_mask_local(const Pose& pose, const FreeSpaceMask& like) const {
        return grid_free_mask_local(grid_, pose, like, cfg_.free_threshold);
    }

  private:
    GridConfig cfg_;
    FormationConfig formation_;
    OccupancyGrid grid_;
    int frames_in_window_ = 0;
};

}  // namespace radpoly
