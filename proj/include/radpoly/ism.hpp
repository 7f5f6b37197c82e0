#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "radpoly/formation.hpp"
#include "radpoly/geometry.hpp"

namespace radpoly {

struct IsmConfig {
    FormationConfig formation{};
    double epsilon2 = 1.0;        // association gate to the previous vertex, m
    double l_pen = 0.5;           // log-odds penalty for re-injected old vertices
    double l_init = 0.0;          // prior log-odds subtracted in the update
    int min_association_age = 1;  // sightings required before an uncertain vertex promotes
    int uncertain_ttl = 3;        // frames an uncertain vertex survives without re-association

    void validate() const;  // throws std::invalid_argument
};

// Emerging vertex bookkeeping: detections that passed the evidence gate but
// have no track history yet. Promoted to the polygon once re-associated.
struct UncertainVertex {
    PolygonVertex candidate;      // last-seen position (motion compensated each frame)
    int associations = 1;         // how many frames have seen it
    std::int64_t last_frame = 0;  // frame counter value at the last association
};

// Recursive tracker state. frame_count == 0 means "no polygon yet"; the
// first update delegates to single-shot formation.
struct PolygonState {
    RadarPolygon polygon;
    std::vector<UncertainVertex> uncertain;
    std::optional<Pose> last_pose;
    double last_timestamp = 0.0;
    std::int64_t frame_count = 0;

    bool empty() const { return frame_count == 0; }
    std::vector<double> confidences() const;  // per-vertex log-odds
};

// Rigid-motion transfer of vertices between ego frames: world point is
// R(from.heading) * p + from.xy, re-expressed in the `to` frame.
std::vector<PolygonVertex> compensate_pose(std::span<const PolygonVertex> vertices,
                                           const Pose& from, const Pose& to);
RadarPolygon compensate_polygon(const RadarPolygon& poly, const Pose& from, const Pose& to);

// Fallback when odometry is unavailable: each real vertex drifts by its own
// radial Doppler over dt (the sensor frame is assumed quasi-static).
std::vector<PolygonVertex> compensate_doppler(std::span<const PolygonVertex> vertices,
                                              double dt, Vec2 sensor);

// One Bayesian log-odds step, clamped to +-kLogOddsClamp:
//   l_t = l_prev + logit(p_tilde) - l_init.
double log_odds_update(double l_prev, double p_tilde, double l_init);

// One recursive update: motion-compensates the previous polygon, pools its
// real vertices with the fresh frame as occupancy evidence, re-selects one
// vertex per sector (tracked / re-injected / emerging / virtual), and ages
// the uncertain set. Timestamps must be strictly increasing; passing a pose
// enables odometry compensation, otherwise Doppler compensation is used.
PolygonState update_polygon_ism(const PolygonState& state,
                                std::span<const RadarPoint> frame,
                                const std::optional<Pose>& pose, double timestamp,
                                const IsmConfig& cfg);

struct MemoryReport {
    std::size_t vertex_count = 0;
    std::size_t uncertain_count = 0;
    std::size_t bytes_estimate = 0;
};

MemoryReport state_memory_report(const PolygonState& state);

}  // namespace radpoly
