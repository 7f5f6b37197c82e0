#include "radpoly/ism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "radpoly/prediction.hpp"

namespace radpoly {

void IsmConfig::validate() const {
    formation.validate();
    if (!(epsilon2 > 0.0)) throw std::invalid_argument("IsmConfig: epsilon2 must be positive");
    if (!(l_pen >= 0.0)) throw std::invalid_argument("IsmConfig: l_pen must be non-negative");
    if (!std::isfinite(l_init)) throw std::invalid_argument("IsmConfig: l_init must be finite");
    if (min_association_age < 1)
        throw std::invalid_argument("IsmConfig: min_association_age must be >= 1");
    if (uncertain_ttl < 1) throw std::invalid_argument("IsmConfig: uncertain_ttl must be >= 1");
}

std::vector<double> PolygonState::confidences() const {
    std::vector<double> out;
    out.reserve(polygon.vertices.size());
    for (const auto& v : polygon.vertices) out.push_back(v.confidence);
    return out;
}

std::vector<PolygonVertex> compensate_pose(std::span<const PolygonVertex> vertices,
                                           const Pose& from, const Pose& to) {
    std::vector<PolygonVertex> out(vertices.begin(), vertices.end());
    for (auto& v : out) {
        const Vec2 world = rotate(v.position, from.heading) + Vec2{from.x, from.y};
        v.position = rotate(world - Vec2{to.x, to.y}, -to.heading);
    }
    return out;
}

RadarPolygon compensate_polygon(const RadarPolygon& poly, const Pose& from, const Pose& to) {
    RadarPolygon out = poly;
    out.vertices = compensate_pose(poly.vertices, from, to);
    const Vec2 world = rotate(poly.sensor_origin, from.heading) + Vec2{from.x, from.y};
    out.sensor_origin = rotate(world - Vec2{to.x, to.y}, -to.heading);
    return out;
}

std::vector<PolygonVertex> compensate_doppler(std::span<const PolygonVertex> vertices,
                                              double dt, Vec2 sensor) {
    if (!(dt >= 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("compensate_doppler: dt must be finite and non-negative");
    std::vector<PolygonVertex> out(vertices.begin(), vertices.end());
    for (auto& v : out) {
        if (v.is_virtual || v.doppler == 0.0) continue;
        v.position = v.position + radial_components(v.position, sensor, v.doppler) * dt;
    }
    return out;
}

double log_odds_update(double l_prev, double p_tilde, double l_init) {
    const double l = l_prev + logit(p_tilde) - l_init;
    return std::clamp(l, -kLogOddsClamp, kLogOddsClamp);
}

namespace {

struct Candidate {
    Vec2 pos;
    double doppler = 0.0;
    double snr = 0.0;
    double range = 0.0;
    bool old = false;             // re-injected previous vertex
    std::size_t old_idx = 0;      // index into the projected previous vertices
    std::size_t order = 0;        // input order, for a stable tie-break
};

PolygonVertex make_virtual_vertex(int sector, const SectorConfig& sc) {
    PolygonVertex v;
    const double az = sc.sector_center(sector);
    v.position = {sc.max_range * std::cos(az), sc.max_range * std::sin(az)};
    v.is_virtual = true;
    v.sector = sector;
    return v;
}

}  // namespace

PolygonState update_polygon_ism(const PolygonState& state,
                                std::span<const RadarPoint> frame,
                                const std::optional<Pose>& pose, double timestamp,
                                const IsmConfig& cfg) {
    cfg.validate();
    const FormationConfig& fc = cfg.formation;

    if (state.empty()) {
        PolygonState ns;
        ns.polygon = form_polygon(frame, fc, timestamp);
        ns.last_pose = pose;
        ns.last_timestamp = timestamp;
        ns.frame_count = 1;
        return ns;
    }

    if (!(timestamp > state.last_timestamp))
        throw std::runtime_error("update_polygon_ism: timestamps must be strictly increasing");
    const double dt = timestamp - state.last_timestamp;
    const bool use_pose = pose.has_value() && state.last_pose.has_value();

    // Motion-compensate the previous real vertices and the uncertain set into
    // the current sensor frame.
    std::vector<PolygonVertex> prev_real;
    for (const auto& v : state.polygon.vertices)
        if (!v.is_virtual) prev_real.push_back(v);

    auto project = [&](std::span<const PolygonVertex> vs) {
        return use_pose ? compensate_pose(vs, *state.last_pose, *pose)
                        : compensate_doppler(vs, dt, state.polygon.sensor_origin);
    };
    const std::vector<PolygonVertex> projected = project(prev_real);

    std::vector<UncertainVertex> uncertain = state.uncertain;
    {
        std::vector<PolygonVertex> shims;
        shims.reserve(uncertain.size());
        for (const auto& u : uncertain) shims.push_back(u.candidate);
        const auto moved = project(shims);
        for (std::size_t i = 0; i < uncertain.size(); ++i) uncertain[i].candidate = moved[i];
    }

    // Evidence pool: the fresh frame plus projected old vertices, except old
    // vertices that exactly duplicate a fresh detection (set union, so a
    // re-detected point is not double-counted).
    const std::vector<RadarPoint> fresh = filter_frame(frame, fc);
    std::vector<RadarPoint> pool = fresh;
    for (const auto& v : projected) {
        bool duplicate = false;
        for (const auto& p : fresh) {
            const double dx = p.x - v.position.x, dy = p.y - v.position.y;
            if (dx * dx + dy * dy <= 1e-18) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate)
            pool.push_back(RadarPoint{v.position.x, v.position.y, 0.0, v.doppler, v.snr});
    }
    const EvidenceField field(pool, fc);

    // Bucket candidates by current sector: fresh detections and re-injected
    // old vertices together, nearest first (fresh wins range ties).
    const int sectors = fc.sector.sector_count();
    std::vector<std::vector<Candidate>> buckets(static_cast<std::size_t>(sectors));
    std::size_t order = 0;
    auto push_candidate = [&](Vec2 p, double doppler, double snr, bool old, std::size_t old_idx) {
        const double range = p.norm();
        if (range == 0.0 || range > fc.sector.max_range) return;
        const auto s = sector_index(p.azimuth(), fc.sector);
        if (!s) return;
        buckets[static_cast<std::size_t>(*s)].push_back(
            Candidate{p, doppler, snr, range, old, old_idx, order++});
    };
    for (const auto& p : fresh) push_candidate({p.x, p.y}, p.doppler, p.snr, false, 0);
    for (std::size_t k = 0; k < projected.size(); ++k)
        push_candidate(projected[k].position, projected[k].doppler, projected[k].snr, true, k);

    for (auto& b : buckets) {
        std::stable_sort(b.begin(), b.end(), [](const Candidate& a, const Candidate& c) {
            if (a.range != c.range) return a.range < c.range;
            if (a.old != c.old) return !a.old;  // fresh detection first on exact ties
            return a.order < c.order;
        });
    }

    // The previous polygon's real vertex per original sector, for the
    // "tracked" association test.
    std::vector<int> prev_of_sector(static_cast<std::size_t>(sectors), -1);
    for (std::size_t k = 0; k < projected.size(); ++k) {
        const int s = projected[k].sector;
        if (s >= 0 && s < sectors) prev_of_sector[static_cast<std::size_t>(s)] = static_cast<int>(k);
    }

    const std::int64_t now = state.frame_count + 1;
    const double eps2_sq = cfg.epsilon2 * cfg.epsilon2;

    // Associates a candidate with the uncertain set. Returns a promoted
    // vertex once an entry has been sighted often enough, nullopt otherwise.
    auto route_uncertain = [&](const Candidate& c, double p_tilde) -> std::optional<PolygonVertex> {
        int best = -1;
        double best_d = std::numeric_limits<double>::max();
        for (std::size_t i = 0; i < uncertain.size(); ++i) {
            const double d = (uncertain[i].candidate.position - c.pos).norm_sq();
            if (d <= eps2_sq && d < best_d) {
                best = static_cast<int>(i);
                best_d = d;
            }
        }
        if (best < 0) {
            UncertainVertex u;
            u.candidate.position = c.pos;
            u.candidate.doppler = c.doppler;
            u.candidate.snr = c.snr;
            u.candidate.confidence = 0.0;
            u.candidate.is_virtual = false;
            u.associations = 1;
            u.last_frame = now;
            uncertain.push_back(u);
            return std::nullopt;
        }
        UncertainVertex& u = uncertain[static_cast<std::size_t>(best)];
        if (u.last_frame == now) return std::nullopt;  // already fed this frame
        u.associations += 1;
        u.candidate.position = c.pos;
        u.candidate.doppler = c.doppler;
        u.candidate.snr = c.snr;
        u.last_frame = now;
        if (u.associations <= cfg.min_association_age) return std::nullopt;
        PolygonVertex v;
        v.position = c.pos;
        v.doppler = c.doppler;
        v.snr = c.snr;
        v.confidence = std::clamp(logit(p_tilde) - cfg.l_init, -kLogOddsClamp, kLogOddsClamp);
        v.is_virtual = false;
        v.age = 0;
        uncertain.erase(uncertain.begin() + best);
        return v;
    };

    std::vector<SectorSlot> slots(static_cast<std::size_t>(sectors));
    for (int s = 0; s < sectors; ++s) {
        SectorSlot slot;
        const auto& bucket = buckets[static_cast<std::size_t>(s)];
        const std::size_t cap =
            std::min<std::size_t>(bucket.size(), static_cast<std::size_t>(fc.max_candidates_per_sector));
        for (std::size_t k = 0; k < cap; ++k) {
            const Candidate& c = bucket[k];
            // Stale old vertex: its confidence ran out last frame.
            if (c.old && projected[c.old_idx].confidence < 0.0) continue;
            const double p_tilde = normalize_evidence(field.evidence_at(c.pos), fc);
            if (!(p_tilde > fc.p_thr)) continue;
            if (c.old) {
                PolygonVertex v = projected[c.old_idx];
                v.confidence = std::clamp(v.confidence - cfg.l_pen, -kLogOddsClamp, kLogOddsClamp);
                v.sector = s;
                v.age += 1;
                slot = SectorSlot{SlotKind::real, v};
                break;
            }
            const int prev_idx = prev_of_sector[static_cast<std::size_t>(s)];
            if (prev_idx >= 0 &&
                (projected[static_cast<std::size_t>(prev_idx)].position - c.pos).norm_sq() <=
                    eps2_sq) {
                const PolygonVertex& prev = projected[static_cast<std::size_t>(prev_idx)];
                PolygonVertex v;
                v.position = c.pos;
                v.doppler = c.doppler;
                v.snr = c.snr;
                v.confidence = log_odds_update(prev.confidence, p_tilde, cfg.l_init);
                v.is_virtual = false;
                v.sector = s;
                v.age = prev.age + 1;
                slot = SectorSlot{SlotKind::real, v};
                break;
            }
            if (auto promoted = route_uncertain(c, p_tilde)) {
                promoted->sector = s;
                slot = SectorSlot{SlotKind::real, *promoted};
                break;
            }
            // Candidate parked in the uncertain set; keep scanning the sector.
        }
        if (slot.kind == SlotKind::empty)
            slot = SectorSlot{SlotKind::virtual_candidate, make_virtual_vertex(s, fc.sector)};
        slots[static_cast<std::size_t>(s)] = slot;
    }

    slots = prune_virtual_spikes(std::move(slots), fc);

    PolygonState ns;
    ns.polygon.timestamp = timestamp;
    ns.polygon.closed_through_origin = !fc.sector.full_circle();
    for (const auto& slot : slots)
        if (slot.kind != SlotKind::empty) ns.polygon.vertices.push_back(slot.vertex);

    // Age out uncertain entries that went unseen for too long.
    for (const auto& u : uncertain)
        if (now - u.last_frame <= cfg.uncertain_ttl) ns.uncertain.push_back(u);

    ns.last_pose = pose;
    ns.last_timestamp = timestamp;
    ns.frame_count = now;
    return ns;
}

MemoryReport state_memory_report(const PolygonState& state) {
    MemoryReport r;
    r.vertex_count = state.polygon.vertices.size();
    r.uncertain_count = state.uncertain.size();
    r.bytes_estimate = state.polygon.vertices.size() * sizeof(PolygonVertex) +
                       state.uncertain.size() * sizeof(UncertainVertex);
    return r;
}

}  // namespace radpoly
