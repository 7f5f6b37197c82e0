#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "radpoly/geometry.hpp"

namespace radpoly {

struct FormationConfig {
    SectorConfig sector{};
    double epsilon1 = 1.0;    // neighborhood radius for occupancy evidence, m
    double p_fa = 1e-3;       // radar false-alarm rate
    double p_bar = 12.1;      // sigmoid midpoint for evidence normalization
    double sigma_p = 7.132;   // sigmoid scale
    double p_thr = 0.62;      // vertex acceptance threshold on normalized evidence
    double l_thr = 7.5;       // max free arc length bridged by virtual vertices, m
    double z_min = -1.5;      // height gate, m (exclusive)
    double z_max = 3.0;
    int max_candidates_per_sector = 5;

    void validate() const;  // throws std::invalid_argument
};

// Swerling-1 detection probability for a given linear SNR.
double detection_probability(double snr, double p_fa);

// log(p / (1 - p)); input clamped away from {0, 1} by the caller's contract.
double logit(double p);

// Sigmoid normalization of raw occupancy evidence into (0.5, 1).
double normalize_evidence(double p, const FormationConfig& cfg);

// Spatial index over weighted detections: evidence at a position is the sum
// of detection_probability(snr) * isotropic Gaussian (sigma = epsilon1 / 3)
// over points within epsilon1. Hash-grid buckets keep lookups O(neighbors)
// while the fixed visit order keeps sums deterministic.
class EvidenceField {
  public:
    EvidenceField(std::span<const RadarPoint> points, const FormationConfig& cfg);
    double evidence_at(Vec2 pos) const;

  private:
    std::int64_t key(int cx, int cy) const;
    double cell_size_;
    double sigma_sq_;
    double norm_;  // 1 / (2 pi sigma^2)
    double p_fa_;
    struct Entry { Vec2 pos; double p_d; };
    std::unordered_map<std::int64_t, std::vector<Entry>> buckets_;
};

// Raw occupancy evidence of one candidate against a frame: the Gaussian-
// weighted detection-probability sum described on EvidenceField, candidate
// included. Throws on an empty frame.
double occupancy_evidence(const RadarPoint& candidate, std::span<const RadarPoint> frame,
                          const FormationConfig& cfg);

// Height-gates a raw frame and projects survivors to the sensor plane
// (z forced to 0). Points with non-finite coordinates or negative SNR throw.
std::vector<RadarPoint> filter_frame(std::span<const RadarPoint> frame,
                                     const FormationConfig& cfg);

// Nearest-first candidate scan of one sector. Evidence is evaluated against
// `field` (pass the whole-frame field so cross-sector neighbors count); the
// convenience overload builds the field from the sector points alone.
// Returns the first candidate whose normalized evidence exceeds p_thr, with
// confidence = logit(p_tilde), or nullopt when the sector stays empty.
std::optional<PolygonVertex> select_sector_vertex(std::span<const RadarPoint> sector_points,
                                                  const FormationConfig& cfg,
                                                  const EvidenceField& field);
std::optional<PolygonVertex> select_sector_vertex(std::span<const RadarPoint> sector_points,
                                                  const FormationConfig& cfg);

// Per-sector slot used between selection and spike pruning.
enum class SlotKind { empty, real, virtual_candidate };

struct SectorSlot {
    SlotKind kind = SlotKind::empty;
    PolygonVertex vertex;
};

// Resolves runs of virtual candidates: a run bridging real neighbors with
// mean range r over k sectors subtends an arc r * k * delta_theta; runs
// shorter than l_thr are dropped (likely specular dropout), longer runs keep
// their boundary placeholders (genuine free space). Runs with no real vertex
// on one side (field-of-view edge, or an all-virtual frame) are dropped.
std::vector<SectorSlot> prune_virtual_spikes(std::vector<SectorSlot> slots,
                                             const FormationConfig& cfg);

// Single-shot polygon formation from one frame.
RadarPolygon form_polygon(std::span<const RadarPoint> frame, const FormationConfig& cfg,
                          double timestamp = 0.0);

}  // namespace radpoly
