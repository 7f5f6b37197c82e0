#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radpoly/geometry.hpp"

namespace radpoly {

// Oriented rectangle with a constant velocity.
struct Obstacle {
    Vec2 center{0.0, 0.0};  // world frame at t = 0, m
    double half_x = 0.5;    // half extents along the body axes, m
    double half_y = 0.5;
    double yaw = 0.0;       // rad
    Vec2 velocity{0.0, 0.0};  // m/s, world frame

    Vec2 center_at(double t) const { return center + velocity * t; }
    bool contains(Vec2 world_point, double t) const;
};

struct NoiseModel {
    double range_sigma = 0.05;       // m
    double azimuth_sigma = 0.004;    // rad
    double doppler_sigma = 0.05;     // m/s
    double snr_mean_at_1m = 3000.0;  // linear SNR at 1 m
    double snr_range_decay = 2.0;    // SNR ~ mean / r^decay
    double snr_jitter_sigma = 0.25;  // log-normal jitter on SNR
    double clutter_rate = 0.0;       // expected false detections per frame
};

struct Scenario {
    std::string name;
    std::vector<Obstacle> obstacles;
    std::vector<Pose> ego_trajectory;  // one pose per frame
    double frame_rate = 10.0;          // Hz
    SectorConfig sensor{};
    NoiseModel noise{};
    std::uint64_t rng_seed = 42;
    // Angular spacing between cast rays: a property of the simulated sensor
    // hardware, deliberately independent of the polygon's sector width.
    double ray_pitch = deg2rad(0.5);
    double gt_resolution = 0.1;  // m/cell for ground-truth masks

    int frame_count() const { return static_cast<int>(ego_trajectory.size()); }
    void validate() const;  // throws std::invalid_argument
};

// One simulated frame: detections in the sensor frame (real returns first,
// clutter appended; clutter_indices locates the latter), the ego pose, the
// analytic ground-truth free mask in the sensor frame, and the timestamp.
struct SimFrame {
    std::vector<RadarPoint> points;
    Pose pose;
    FreeSpaceMask ground_truth;
    std::vector<std::size_t> clutter_indices;
    double timestamp = 0.0;
};

// Deterministic: the stream is re-seeded per frame from (seed, frame_index),
// so frame k is reproducible in isolation and independent of visit order.
SimFrame simulate_frame(const Scenario& scenario, int frame_index);

// First-hit range along a world-frame ray (origin, angle), capped at max_range.
double cast_ray(const Scenario& scenario, Vec2 origin, double angle, double t,
                double max_range);

// Built-in scenario catalog, keyed by name.
std::map<std::string, Scenario> builtin_scenarios();
std::vector<std::string> builtin_scenario_names();

}  // namespace radpoly
