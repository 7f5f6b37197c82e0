#include "radpoly/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace radpoly {

void FormationConfig::validate() const {
    sector.validate();
    if (!(epsilon1 > 0.0)) throw std::invalid_argument("FormationConfig: epsilon1 must be positive");
    if (!(p_fa > 0.0 && p_fa < 1.0))
        throw std::invalid_argument("FormationConfig: p_fa must lie in (0, 1)");
    if (!(sigma_p > 0.0)) throw std::invalid_argument("FormationConfig: sigma_p must be positive");
    if (!(p_thr > 0.5 && p_thr < 1.0))
        throw std::invalid_argument("FormationConfig: p_thr must lie in (0.5, 1)");
    if (!(l_thr > 0.0)) throw std::invalid_argument("FormationConfig: l_thr must be positive");
    if (!(z_max > z_min)) throw std::invalid_argument("FormationConfig: empty height gate");
    if (max_candidates_per_sector < 1)
        throw std::invalid_argument("FormationConfig: need at least one candidate per sector");
}

double detection_probability(double snr, double p_fa) {
    if (!(p_fa > 0.0 && p_fa < 1.0))
        throw std::invalid_argument("detection_probability: p_fa must lie in (0, 1)");
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw std::invalid_argument("detection_probability: snr must be finite and >= 0");
    // Swerling-1: P_d = P_fa^(1 / (1 + SNR)).
    return std::exp(std::log(p_fa) / (1.0 + snr));
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("logit: p must lie in (0, 1)");
    return std::log(p / (1.0 - p));
}

double normalize_evidence(double p, const FormationConfig& cfg) {
    if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("normalize_evidence: evidence must be finite and >= 0");
    return 0.5 + 0.5 / (1.0 + std::exp(-(p - cfg.p_bar) / cfg.sigma_p));
}

EvidenceField::EvidenceField(std::span<const RadarPoint> points, const FormationConfig& cfg)
    : cell_size_(cfg.epsilon1), p_fa_(cfg.p_fa) {
    const double sigma = cfg.epsilon1 / 3.0;
    sigma_sq_ = sigma * sigma;
    norm_ = 1.0 / (kTwoPi * sigma_sq_);
    for (const auto& p : points) {
        const int cx = static_cast<int>(std::floor(p.x / cell_size_));
        const int cy = static_cast<int>(std::floor(p.y / cell_size_));
        buckets_[key(cx, cy)].push_back(Entry{{p.x, p.y}, detection_probability(p.snr, p_fa_)});
    }
}

std::int64_t EvidenceField::key(int cx, int cy) const {
    return (static_cast<std::int64_t>(cx) << 32) ^
           static_cast<std::int64_t>(static_cast<std::uint32_t>(cy));
}

double EvidenceField::evidence_at(Vec2 pos) const {
    const int cx = static_cast<int>(std::floor(pos.x / cell_size_));
    const int cy = static_cast<int>(std::floor(pos.y / cell_size_));
    const double radius_sq = cell_size_ * cell_size_;
    double sum = 0.0;
    // Fixed visit order keeps the floating-point sum reproducible.
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            const auto it = buckets_.find(key(cx + dx, cy + dy));
            if (it == buckets_.end()) continue;
            for (const Entry& e : it->second) {
                const double d_sq = (pos - e.pos).norm_sq();
                if (d_sq > radius_sq) continue;
                sum += e.p_d * norm_ * std::exp(-d_sq / (2.0 * sigma_sq_));
            }
        }
    }
    return sum;
}

double occupancy_evidence(const RadarPoint& candidate, std::span<const RadarPoint> frame,
                          const FormationConfig& cfg) {
    if (frame.empty())
        throw std::invalid_argument("occupancy_evidence: frame must not be empty");
    const EvidenceField field(frame, cfg);
    return field.evidence_at({candidate.x, candidate.y});
}

std::vector<RadarPoint> filter_frame(std::span<const RadarPoint> frame,
                                     const FormationConfig& cfg) {
    std::vector<RadarPoint> out;
    out.reserve(frame.size());
    for (const auto& p : frame) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
            !std::isfinite(p.doppler) || !std::isfinite(p.snr) || p.snr < 0.0)
            throw std::invalid_argument("filter_frame: frame contains an invalid point");
        if (!(p.z > cfg.z_min && p.z < cfg.z_max)) continue;
        RadarPoint q = p;
        q.z = 0.0;
        out.push_back(q);
    }
    return out;
}

namespace {

std::vector<std::size_t> nearest_first_order(std::span<const RadarPoint> pts) {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double ra = pts[a].x * pts[a].x + pts[a].y * pts[a].y;
        const double rb = pts[b].x * pts[b].x + pts[b].y * pts[b].y;
        return ra < rb;
    });
    return idx;
}

PolygonVertex make_virtual_vertex(int sector, const SectorConfig& sc) {
    PolygonVertex v;
    const double az = sc.sector_center(sector);
    v.position = {sc.max_range * std::cos(az), sc.max_range * std::sin(az)};
    v.is_virtual = true;
    v.sector = sector;
    v.confidence = 0.0;
    return v;
}

}  // namespace

std::optional<PolygonVertex> select_sector_vertex(std::span<const RadarPoint> sector_points,
                                                  const FormationConfig& cfg,
                                                  const EvidenceField& field) {
    const auto order = nearest_first_order(sector_points);
    const std::size_t cap = static_cast<std::size_t>(cfg.max_candidates_per_sector);
    for (std::size_t k = 0; k < order.size() && k < cap; ++k) {
        const RadarPoint& p = sector_points[order[k]];
        const double p_tilde = normalize_evidence(field.evidence_at({p.x, p.y}), cfg);
        if (p_tilde > cfg.p_thr) {
            PolygonVertex v;
            v.position = {p.x, p.y};
            v.doppler = p.doppler;
            v.snr = p.snr;
            v.confidence = logit(p_tilde);
            v.is_virtual = false;
            v.age = 0;
            return v;
        }
    }
    return std::nullopt;
}

std::optional<PolygonVertex> select_sector_vertex(std::span<const RadarPoint> sector_points,
                                                  const FormationConfig& cfg) {
    const EvidenceField field(sector_points, cfg);
    return select_sector_vertex(sector_points, cfg, field);
}

std::vector<SectorSlot> prune_virtual_spikes(std::vector<SectorSlot> slots,
                                             const FormationConfig& cfg) {
    const int n = static_cast<int>(slots.size());
    if (n == 0) return slots;
    const bool cyclic = cfg.sector.full_circle();

    std::vector<int> reals;
    for (int i = 0; i < n; ++i)
        if (slots[i].kind == SlotKind::real) reals.push_back(i);

    auto drop_virtual = [&](int idx) {
        if (slots[idx].kind == SlotKind::virtual_candidate) slots[idx] = SectorSlot{};
    };

    if (reals.empty()) {
        // Nothing anchors the boundary; an all-virtual ring is no polygon.
        for (int i = 0; i < n; ++i) drop_virtual(i);
        return slots;
    }

    auto range_of = [&](int idx) { return slots[idx].vertex.position.norm(); };

    auto resolve_gap = [&](int left_real, int right_real, int gap_begin, int gap_len) {
        if (gap_len <= 0) return;
        const double mean_range = 0.5 * (range_of(left_real) + range_of(right_real));
        const double arc = mean_range * gap_len * cfg.sector.delta_theta;
        if (arc < cfg.l_thr) {
            // Short free arc between solid returns: almost surely dropout, not
            // an opening worth steering into.
            for (int k = 0; k < gap_len; ++k) drop_virtual((gap_begin + k) % n);
        }
    };

    if (cyclic) {
        const int m = static_cast<int>(reals.size());
        for (int r = 0; r < m; ++r) {
            const int left = reals[r];
            const int right = reals[(r + 1) % m];
            const int gap_len = (right - left - 1 + n) % n;
            resolve_gap(left, right, (left + 1) % n, gap_len);
        }
    } else {
        // Runs before the first / after the last real vertex have no bracket;
        // keeping them would invent free space beyond anything observed.
        for (int i = 0; i < reals.front(); ++i) drop_virtual(i);
        for (int i = reals.back() + 1; i < n; ++i) drop_virtual(i);
        for (std::size_t r = 0; r + 1 < reals.size(); ++r) {
            const int left = reals[r];
            const int right = reals[r + 1];
            resolve_gap(left, right, left + 1, right - left - 1);
        }
    }
    return slots;
}

RadarPolygon form_polygon(std::span<const RadarPoint> frame, const FormationConfig& cfg,
                          double timestamp) {
    cfg.validate();
    const std::vector<RadarPoint> pts = filter_frame(frame, cfg);
    // The evidence pool is the whole height-gated frame; candidacy is
    // restricted to points inside the field of view and range envelope.
    const EvidenceField field(pts, cfg);

    const int sectors = cfg.sector.sector_count();
    std::vector<std::vector<RadarPoint>> by_sector(static_cast<std::size_t>(sectors));
    for (const auto& p : pts) {
        const double range = std::hypot(p.x, p.y);
        if (range == 0.0 || range > cfg.sector.max_range) continue;
        const auto s = sector_index(std::atan2(p.y, p.x), cfg.sector);
        if (!s) continue;
        by_sector[static_cast<std::size_t>(*s)].push_back(p);
    }

    std::vector<SectorSlot> slots(static_cast<std::size_t>(sectors));
    for (int s = 0; s < sectors; ++s) {
        auto picked = select_sector_vertex(by_sector[static_cast<std::size_t>(s)], cfg, field);
        if (picked) {
            picked->sector = s;
            slots[static_cast<std::size_t>(s)] = SectorSlot{SlotKind::real, *picked};
        } else {
            slots[static_cast<std::size_t>(s)] =
                SectorSlot{SlotKind::virtual_candidate, make_virtual_vertex(s, cfg.sector)};
        }
    }

    slots = prune_virtual_spikes(std::move(slots), cfg);

    RadarPolygon poly;
    poly.timestamp = timestamp;
    poly.closed_through_origin = !cfg.sector.full_circle();
    for (const auto& slot : slots) {
        if (slot.kind != SlotKind::empty) poly.vertices.push_back(slot.vertex);
    }
    return poly;
}

}  // namespace radpoly
