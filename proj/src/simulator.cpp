#include "radpoly/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "radpoly/rng.hpp"

namespace radpoly {

bool Obstacle::contains(Vec2 world_point, double t) const {
    const Vec2 local = rotate(world_point - center_at(t), -yaw);
    return std::abs(local.x) <= half_x && std::abs(local.y) <= half_y;
}

void Scenario::validate() const {
    sensor.validate();
    if (ego_trajectory.empty())
        throw std::invalid_argument("Scenario: ego_trajectory must not be empty");
    if (!(frame_rate > 0.0)) throw std::invalid_argument("Scenario: frame_rate must be positive");
    if (!(ray_pitch > 0.0)) throw std::invalid_argument("Scenario: ray_pitch must be positive");
    if (!(gt_resolution > 0.0))
        throw std::invalid_argument("Scenario: gt_resolution must be positive");
    for (const auto& o : obstacles)
        if (!(o.half_x > 0.0) || !(o.half_y > 0.0))
            throw std::invalid_argument("Scenario: obstacle extents must be positive");
}

namespace {

// Slab test of a ray against one oriented rectangle; returns the entry
// distance or +inf on a miss.
double ray_rect(Vec2 origin, Vec2 dir, const Obstacle& o, double t) {
    const Vec2 lo = rotate(origin - o.center_at(t), -o.yaw);
    const Vec2 ld = rotate(dir, -o.yaw);
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    const double half[2] = {o.half_x, o.half_y};
    const double op[2] = {lo.x, lo.y};
    const double dp[2] = {ld.x, ld.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (dp[axis] == 0.0) {
            if (std::abs(op[axis]) > half[axis]) return std::numeric_limits<double>::infinity();
            continue;
        }
        double t1 = (-half[axis] - op[axis]) / dp[axis];
        double t2 = (half[axis] - op[axis]) / dp[axis];
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax = std::min(tmax, t2);
        if (tmin > tmax) return std::numeric_limits<double>::infinity();
    }
    if (tmax < 0.0) return std::numeric_limits<double>::infinity();
    return tmin >= 0.0 ? tmin : 0.0;  // origin inside → immediate hit
}

double cast_ray_hit(const Scenario& sc, Vec2 origin, double angle, double t, double max_range,
                    int* hit_index) {
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    double best = max_range;
    int best_idx = -1;
    for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
        const double d = ray_rect(origin, dir, sc.obstacles[i], t);
        if (d < best) {
            best = d;
            best_idx = static_cast<int>(i);
        }
    }
    if (hit_index) *hit_index = best_idx;
    return best;
}

Vec2 ego_velocity(const Scenario& sc, int i) {
    const auto& traj = sc.ego_trajectory;
    if (traj.size() < 2) return {0.0, 0.0};
    const int a = i > 0 ? i - 1 : 0;
    const int b = i > 0 ? i : 1;
    return Vec2{traj[b].x - traj[a].x, traj[b].y - traj[a].y} * sc.frame_rate;
}

FreeSpaceMask ground_truth_mask(const Scenario& sc, const Pose& pose, double t) {
    const SectorConfig& s = sc.sensor;
    // Visibility profile at 8x sector density, but never coarser than a
    // quarter degree so the truth does not degrade with wide sectors.
    const int prof_n = std::max(s.sector_count() * 8,
                                static_cast<int>(std::round(s.span() / deg2rad(0.25))));
    SectorConfig prof_cfg = s;
    prof_cfg.delta_theta = s.span() / prof_n;

    std::vector<double> profile(static_cast<std::size_t>(prof_n));
    for (int j = 0; j < prof_n; ++j) {
        const double az = s.fov_start + (j + 0.5) * prof_cfg.delta_theta;
        profile[static_cast<std::size_t>(j)] =
            cast_ray_hit(sc, {pose.x, pose.y}, pose.heading + az, t, s.max_range, nullptr);
    }

    // Bounding box of the field-of-view wedge in the sensor frame.
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    auto take = [&](double az) {
        xmin = std::min(xmin, s.max_range * std::cos(az));
        xmax = std::max(xmax, s.max_range * std::cos(az));
        ymin = std::min(ymin, s.max_range * std::sin(az));
        ymax = std::max(ymax, s.max_range * std::sin(az));
    };
    take(s.fov_start);
    take(s.fov_end);
    for (double card = -kTwoPi; card <= kTwoPi; card += kPi / 2.0)
        if (card > s.fov_start && card < s.fov_end) take(card);

    const double pad = 0.5;
    const double res = sc.gt_resolution;
    const Vec2 origin{xmin - pad, ymin - pad};
    const int width = static_cast<int>(std::ceil((xmax - xmin + 2 * pad) / res)) + 1;
    const int height = static_cast<int>(std::ceil((ymax - ymin + 2 * pad) / res)) + 1;

    FreeSpaceMask mask = FreeSpaceMask::make(origin, res, width, height);
    for (int iy = 0; iy < height; ++iy) {
        for (int ix = 0; ix < width; ++ix) {
            const Vec2 c = mask.cell_center(ix, iy);
            const double r = c.norm();
            if (r > s.max_range) continue;
            const auto j = sector_index(c.azimuth(), prof_cfg);
            if (!j) continue;
            if (r >= profile[static_cast<std::size_t>(*j)]) continue;
            const Vec2 world = rotate(c, pose.heading) + Vec2{pose.x, pose.y};
            bool blocked = false;
            for (const auto& o : sc.obstacles)
                if (o.contains(world, t)) {
                    blocked = true;
                    break;
                }
            if (!blocked) mask.set(ix, iy, 1);
        }
    }
    return mask;
}

}  // namespace

double cast_ray(const Scenario& scenario, Vec2 origin, double angle, double t,
                double max_range) {
    return cast_ray_hit(scenario, origin, angle, t, max_range, nullptr);
}

SimFrame simulate_frame(const Scenario& scenario, int frame_index) {
    scenario.validate();
    if (frame_index < 0 || frame_index >= scenario.frame_count())
        throw std::invalid_argument("simulate_frame: frame_index out of range");

    const Pose pose = scenario.ego_trajectory[static_cast<std::size_t>(frame_index)];
    const double t = frame_index / scenario.frame_rate;
    const SectorConfig& s = scenario.sensor;
    const NoiseModel& nm = scenario.noise;
    const Vec2 v_ego = ego_velocity(scenario, frame_index);

    // Per-frame stream: frame k is reproducible without simulating 0..k-1.
    Rng rng(Rng::mix(scenario.rng_seed) ^ Rng::mix(static_cast<std::uint64_t>(frame_index) + 1));

    SimFrame out;
    out.pose = pose;
    out.timestamp = t;

    const int n_rays = std::max(1, static_cast<int>(std::round(s.span() / scenario.ray_pitch)));
    const double pitch = s.span() / n_rays;  // tile the field of view exactly
    for (int k = 0; k < n_rays; ++k) {
        const double az = s.fov_start + (k + 0.5) * pitch;
        int hit = -1;
        const double r_true =
            cast_ray_hit(scenario, {pose.x, pose.y}, pose.heading + az, t, s.max_range, &hit);
        if (hit < 0) continue;  // open space, no return
        const double r = std::clamp(r_true + rng.normal(0.0, nm.range_sigma), 0.05,
                                    s.max_range);
        const double az_noisy = az + rng.normal(0.0, nm.azimuth_sigma);
        RadarPoint p;
        p.x = r * std::cos(az_noisy);
        p.y = r * std::sin(az_noisy);
        p.z = rng.uniform(0.0, 1.5);
        const double snr_true =
            nm.snr_mean_at_1m / std::pow(std::max(r_true, 0.5), nm.snr_range_decay);
        p.snr = snr_true * std::exp(rng.normal(0.0, nm.snr_jitter_sigma));
        const Vec2 u{std::cos(pose.heading + az), std::sin(pose.heading + az)};
        const Vec2 v_rel =
            scenario.obstacles[static_cast<std::size_t>(hit)].velocity - v_ego;
        p.doppler = v_rel.dot(u) + rng.normal(0.0, nm.doppler_sigma);
        out.points.push_back(p);
    }

    const int n_clutter = rng.poisson(nm.clutter_rate);
    for (int k = 0; k < n_clutter; ++k) {
        const double az = rng.uniform(s.fov_start, s.fov_end);
        const double r = rng.uniform(0.5, 0.95 * s.max_range);
        RadarPoint p;
        p.x = r * std::cos(az);
        p.y = r * std::sin(az);
        p.z = rng.uniform(0.0, 1.5);
        p.snr = rng.uniform(0.5, 4.0);
        p.doppler = rng.normal(0.0, 1.0);
        out.clutter_indices.push_back(out.points.size());
        out.points.push_back(p);
    }

    out.ground_truth = ground_truth_mask(scenario, pose, t);
    return out;
}

namespace {

SectorConfig default_sensor() {
    SectorConfig s;
    s.delta_theta = deg2rad(2.0);
    s.fov_start = deg2rad(-65.0);
    s.fov_end = deg2rad(65.0);
    s.max_range = 20.0;
    return s;
}

std::vector<Pose> static_trajectory(int frames, Pose pose) {
    return std::vector<Pose>(static_cast<std::size_t>(frames), pose);
}

void add_lot_walls(Scenario& sc) {
    sc.obstacles.push_back({{13.5, 0.0}, 0.5, 14.0, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{-13.5, 0.0}, 0.5, 14.0, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{0.0, 13.5}, 14.0, 0.5, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{0.0, -13.5}, 14.0, 0.5, 0.0, {0.0, 0.0}});
}

Scenario make_static_lot() {
    Scenario sc;
    sc.name = "static_lot";
    sc.sensor = default_sensor();
    sc.ego_trajectory = static_trajectory(100, Pose{0.0, 0.0, 0.0});
    // Dense, well-calibrated radar: enough angular sampling that even
    // 0.5-degree sectors see a return.
    sc.ray_pitch = deg2rad(0.25);
    sc.noise.azimuth_sigma = 0.002;
    add_lot_walls(sc);
    // Cars parallel-parked along the far wall, one-metre gaps between them;
    // the end cars tuck into the corners.
    sc.obstacles.push_back({{12.2, -12.2}, 0.8, 2.1, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{12.2, -7.8}, 0.8, 2.1, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{12.2, -2.6}, 0.8, 2.1, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{12.2, 2.6}, 0.8, 2.1, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{12.2, 7.8}, 0.8, 2.1, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{12.2, 12.2}, 0.8, 2.1, 0.0, {0.0, 0.0}});
    return sc;
}

Scenario make_noisy_lot() {
    Scenario sc;
    sc.name = "noisy_lot";
    sc.sensor = default_sensor();
    sc.ego_trajectory = static_trajectory(100, Pose{0.0, 0.0, 0.0});
    // A worse radar in a tighter spot: sparse rays, wide beams, weak
    // returns, clutter, and a close-in parked row facing an empty slot.
    sc.ray_pitch = deg2rad(0.5);
    sc.noise.azimuth_sigma = 0.004;
    sc.noise.snr_mean_at_1m = 1000.0;
    sc.noise.snr_jitter_sigma = 0.3;
    sc.noise.clutter_rate = 5.0;
    add_lot_walls(sc);
    // Parked row with one empty slot between y = 1.9 and y = 5.6.
    sc.obstacles.push_back({{8.0, -6.0}, 2.1, 0.9, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{8.0, -2.5}, 2.1, 0.9, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{8.0, 1.0}, 2.1, 0.9, 0.0, {0.0, 0.0}});
    sc.obstacles.push_back({{8.0, 6.5}, 2.1, 0.9, 0.0, {0.0, 0.0}});
    return sc;
}

Scenario make_backoff() {
    Scenario sc;
    sc.name = "backoff";
    sc.sensor = default_sensor();
    const int frames = 200;
    sc.ego_trajectory.reserve(frames);
    for (int i = 0; i < frames; ++i)
        sc.ego_trajectory.push_back(Pose{-0.12 * i, 0.0, kPi});  // reversing at 1.2 m/s
    // Parked rows flanking the aisle; one slot left empty.
    for (int k = 0; k < 9; ++k) {
        const double x = -4.0 - 3.0 * k;
        if (k != 4) sc.obstacles.push_back({{x, 4.0}, 0.9, 2.0, 0.0, {0.0, 0.0}});
        sc.obstacles.push_back({{x, -4.0}, 0.9, 2.0, 0.0, {0.0, 0.0}});
    }
    sc.obstacles.push_back({{-34.5, 0.0}, 0.5, 10.0, 0.0, {0.0, 0.0}});  // end wall
    return sc;
}

Scenario make_pedestrian_pass() {
    Scenario sc;
    sc.name = "pedestrian_pass";
    sc.sensor = default_sensor();
    sc.ego_trajectory = static_trajectory(150, Pose{0.0, 0.0, 0.0});
    sc.obstacles.push_back({{12.5, 0.0}, 0.5, 13.0, 0.0, {0.0, 0.0}});   // back wall
    sc.obstacles.push_back({{7.0, -5.0}, 0.9, 2.1, 0.0, {0.0, 0.0}});    // parked car
    sc.obstacles.push_back({{8.0, -7.0}, 0.25, 0.25, 0.0, {0.0, 1.2}});  // pedestrian
    return sc;
}

Scenario make_vehicle_pass() {
    Scenario sc;
    sc.name = "vehicle_pass";
    sc.sensor = default_sensor();
    sc.ego_trajectory = static_trajectory(120, Pose{0.0, 0.0, 0.0});
    sc.obstacles.push_back({{14.5, 0.0}, 0.5, 15.0, 0.0, {0.0, 0.0}});  // back wall
    sc.obstacles.push_back({{10.0, -16.0}, 1.0, 2.2, 0.0, {0.0, 3.0}});  // crossing vehicle
    return sc;
}

}  // namespace

std::map<std::string, Scenario> builtin_scenarios() {
    std::map<std::string, Scenario> out;
    for (Scenario sc : {make_static_lot(), make_noisy_lot(), make_backoff(),
                        make_pedestrian_pass(), make_vehicle_pass()})
        out.emplace(sc.name, std::move(sc));
    return out;
}

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, sc] : builtin_scenarios()) names.push_back(name);
    return names;
}

}  // namespace radpoly
