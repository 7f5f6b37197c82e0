#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <vector>

#include "radpoly/ism.hpp"
#include "radpoly/rng.hpp"

using namespace radpoly;

namespace {

constexpr double kSaturatedSnr = 1e15;
constexpr double kP8 = 0.73877570683988197;  // p_tilde of 8 coincident saturated points

RadarPoint pt(double x, double y, double snr = kSaturatedSnr, double doppler = 0.0) {
    return RadarPoint{x, y, 0.0, doppler, snr};
}

std::vector<RadarPoint> cluster(double x, double y, int n, double doppler = 0.0) {
    return std::vector<RadarPoint>(static_cast<std::size_t>(n), pt(x, y, kSaturatedSnr, doppler));
}

void append(std::vector<RadarPoint>& dst, const std::vector<RadarPoint>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

const Pose kPose0{0.0, 0.0, 0.0};

PolygonVertex real_vertex(double x, double y, double confidence, int sector, int age = 0) {
    PolygonVertex v;
    v.position = {x, y};
    v.snr = kSaturatedSnr;
    v.confidence = confidence;
    v.is_virtual = false;
    v.sector = sector;
    v.age = age;
    return v;
}

PolygonState seeded_state(const PolygonVertex& v) {
    PolygonState s;
    s.polygon.vertices.push_back(v);
    s.polygon.sensor_origin = {0, 0};
    s.polygon.closed_through_origin = true;
    s.polygon.timestamp = 0.0;
    s.last_pose = kPose0;
    s.last_timestamp = 0.0;
    s.frame_count = 1;
    return s;
}

}  // namespace

TEST_CASE("compensate_pose is the rigid ego-motion transfer") {
    std::vector<PolygonVertex> vs{real_vertex(5, 0, 1.0, 0)};
    vs[0].doppler = -2.0;

    SUBCASE("identity") {
        const auto out = compensate_pose(vs, kPose0, kPose0);
        CHECK(out[0].position.x == 5.0);
        CHECK(out[0].position.y == 0.0);
    }
    SUBCASE("pure translation by (1, 0)") {
        const auto out = compensate_pose(vs, kPose0, Pose{1, 0, 0});
        CHECK(out[0].position.x == doctest::Approx(4.0));
        CHECK(out[0].position.y == doctest::Approx(0.0));
    }
    SUBCASE("pure rotation by +90 degrees") {
        std::vector<PolygonVertex> unit{real_vertex(1, 0, 0.0, 0)};
        const auto out = compensate_pose(unit, kPose0, Pose{0, 0, kPi / 2});
        CHECK(out[0].position.x == doctest::Approx(0.0));
        CHECK(out[0].position.y == doctest::Approx(-1.0));
    }
    SUBCASE("metadata carried unchanged") {
        const auto out = compensate_pose(vs, kPose0, Pose{3, -2, 0.7});
        CHECK(out[0].doppler == -2.0);
        CHECK(out[0].snr == kSaturatedSnr);
        CHECK(out[0].confidence == 1.0);
        CHECK_FALSE(out[0].is_virtual);
    }
    SUBCASE("round trip returns within 1e-9") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const Pose a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3)};
            const Pose b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3)};
            std::vector<PolygonVertex> v{
                real_vertex(rng.uniform(-20, 20), rng.uniform(-20, 20), 0.0, 0)};
            const auto back = compensate_pose(compensate_pose(v, a, b), b, a);
            CHECK(std::abs(back[0].position.x - v[0].position.x) < 1e-9);
            CHECK(std::abs(back[0].position.y - v[0].position.y) < 1e-9);
        }
    }
    SUBCASE("compensate_polygon moves the sensor origin too") {
        RadarPolygon poly;
        poly.vertices = vs;
        poly.sensor_origin = {0, 0};
        const RadarPolygon out = compensate_polygon(poly, kPose0, Pose{1, 0, 0});
        CHECK(out.sensor_origin.x == doctest::Approx(-1.0));
        CHECK(out.vertices[0].position.x == doctest::Approx(4.0));
    }
}

TEST_CASE("compensate_doppler drifts real vertices radially") {
    std::vector<PolygonVertex> vs{real_vertex(3, 4, 0.0, 0)};
    vs[0].doppler = 2.0;
    PolygonVertex virt;
    virt.position = {10, 0};
    virt.is_virtual = true;
    virt.doppler = 0.0;
    vs.push_back(virt);

    const auto out = compensate_doppler(vs, 0.5, {0, 0});
    CHECK(out[0].position.x == doctest::Approx(3.6));
    CHECK(out[0].position.y == doctest::Approx(4.8));
    CHECK(out[1].position.x == 10.0);  // virtual: unchanged

    const auto same = compensate_doppler(vs, 0.0, {0, 0});
    CHECK(same[0].position.x == 3.0);
    CHECK_THROWS_AS(compensate_doppler(vs, -0.5, {0, 0}), std::invalid_argument);
}

TEST_CASE("log_odds_update evaluates the recursive formula") {
    CHECK(log_odds_update(0.0, 0.5, 0.0) == 0.0);
    CHECK(log_odds_update(0.0, 0.75, 0.0) == doctest::Approx(std::log(3.0)).epsilon(1e-13));
    CHECK(log_odds_update(1.0, 0.75, 0.5) ==
          doctest::Approx(1.0 + std::log(3.0) - 0.5).epsilon(1e-13));
    SUBCASE("clamped to +-20") {
        CHECK(log_odds_update(19.5, 0.99, 0.0) == 20.0);
        CHECK(log_odds_update(-19.5, 0.01, 0.0) == -20.0);
    }
    SUBCASE("p_tilde outside (0,1) throws") {
        CHECK_THROWS_AS(log_odds_update(0.0, 0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(log_odds_update(0.0, 1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("two identical frames double the tracked confidence") {
    const IsmConfig cfg;
    const std::vector<RadarPoint> frame = cluster(5, 0, 8, -1.25);

    PolygonState s1 = update_polygon_ism({}, frame, kPose0, 0.0, cfg);
    REQUIRE(s1.polygon.vertices.size() == 1);
    const PolygonVertex& v1 = s1.polygon.vertices[0];
    CHECK(v1.position.x == 5.0);
    CHECK(v1.age == 0);
    const double expected_l1 = std::log(kP8 / (1.0 - kP8));
    CHECK(v1.confidence == doctest::Approx(expected_l1).epsilon(1e-10));

    PolygonState s2 = update_polygon_ism(s1, frame, kPose0, 0.1, cfg);
    REQUIRE(s2.polygon.vertices.size() == 1);
    const PolygonVertex& v2 = s2.polygon.vertices[0];
    CHECK(v2.position.x == 5.0);
    CHECK(v2.age == 1);
    // Identical evidence both frames, so the increment is bit-identical and
    // the posterior is exactly double.
    CHECK(v2.confidence == 2.0 * v1.confidence);
    CHECK(s2.frame_count == 2);
    CHECK(s2.last_timestamp == 0.1);

    SUBCASE("confidence keeps growing while frames repeat") {
        PolygonState s = s2;
        double prev = v2.confidence;
        for (int i = 2; i < 8; ++i) {
            s = update_polygon_ism(s, frame, kPose0, 0.1 * i, cfg);
            REQUIRE(s.polygon.vertices.size() == 1);
            CHECK(s.polygon.vertices[0].confidence > prev);
            prev = s.polygon.vertices[0].confidence;
        }
        CHECK(prev <= kLogOddsClamp);
    }
}

TEST_CASE("old-vertex reuse pays the penalty; negative confidence discards") {
    const IsmConfig cfg;
    // Three fresh points in the old vertex's sector but 0.3 m farther out:
    // the old vertex is the nearest candidate and its evidence passes the
    // gate thanks to these supporters.
    const std::vector<RadarPoint> support = cluster(5.3, 0, 3);

    SUBCASE("confidence 0.4 -> reused at -0.1") {
        const PolygonState s = seeded_state(real_vertex(5, 0, 0.4, 32, 3));
        const PolygonState out = update_polygon_ism(s, support, kPose0, 1.0, cfg);
        REQUIRE(out.polygon.vertices.size() == 1);
        const PolygonVertex& v = out.polygon.vertices[0];
        CHECK(v.position.x == 5.0);  // still the old vertex
        CHECK(v.confidence == doctest::Approx(-0.1));
        CHECK(v.age == 4);

        SUBCASE("next frame the stale vertex is discarded; the fresh point takes over") {
            const PolygonState next = update_polygon_ism(out, support, kPose0, 2.0, cfg);
            REQUIRE(next.polygon.vertices.size() == 1);
            CHECK(next.polygon.vertices[0].position.x == 5.3);
            CHECK(next.polygon.vertices[0].confidence > 0.0);
        }
    }
    SUBCASE("a healthy old vertex keeps winning the same duel") {
        const PolygonState s = seeded_state(real_vertex(5, 0, 3.0, 32, 3));
        const PolygonState out = update_polygon_ism(s, support, kPose0, 1.0, cfg);
        REQUIRE(out.polygon.vertices.size() == 1);
        CHECK(out.polygon.vertices[0].position.x == 5.0);
        CHECK(out.polygon.vertices[0].confidence == doctest::Approx(2.5));
    }
}

TEST_CASE("one-frame clutter blip parks in U and never reaches the polygon") {
    const IsmConfig cfg;
    const std::vector<RadarPoint> wall = cluster(5, 0, 8);
    std::vector<RadarPoint> with_blip = wall;
    append(with_blip, cluster(6, 3, 8));

    PolygonState s = update_polygon_ism({}, wall, kPose0, 0.0, cfg);
    s = update_polygon_ism(s, with_blip, kPose0, 1.0, cfg);
    REQUIRE(s.polygon.vertices.size() == 1);
    CHECK(s.polygon.vertices[0].position.x == 5.0);
    CHECK(s.uncertain.size() == 1);

    // Never re-observed: survives uncertain_ttl frames, then evicted. The
    // polygon never grows a vertex at the blip.
    for (int i = 2; i <= 4; ++i) {
        s = update_polygon_ism(s, wall, kPose0, static_cast<double>(i), cfg);
        CHECK(s.polygon.vertices.size() == 1);
        CHECK(s.uncertain.size() == 1);
    }
    s = update_polygon_ism(s, wall, kPose0, 5.0, cfg);
    CHECK(s.uncertain.empty());
    CHECK(s.polygon.vertices.size() == 1);
}

TEST_CASE("an emerging vertex needs two sightings before promotion") {
    const IsmConfig cfg;
    const std::vector<RadarPoint> wall = cluster(5, 0, 8);
    std::vector<RadarPoint> with_blip = wall;
    append(with_blip, cluster(6, 3, 8));

    PolygonState s = update_polygon_ism({}, wall, kPose0, 0.0, cfg);
    s = update_polygon_ism(s, with_blip, kPose0, 1.0, cfg);
    CHECK(s.polygon.vertices.size() == 1);  // first sighting: uncertain only

    s = update_polygon_ism(s, with_blip, kPose0, 2.0, cfg);
    REQUIRE(s.polygon.vertices.size() == 2);  // second sighting: promoted
    const PolygonVertex& blip = s.polygon.vertices[1];
    CHECK(blip.position.x == 6.0);
    CHECK(blip.position.y == 3.0);
    CHECK(blip.age == 0);
    CHECK(blip.confidence == doctest::Approx(std::log(kP8 / (1.0 - kP8))).epsilon(1e-10));
    CHECK(s.uncertain.empty());
}

TEST_CASE("update_polygon_ism housekeeping") {
    const IsmConfig cfg;
    const std::vector<RadarPoint> frame = cluster(5, 0, 8);
    PolygonState s = update_polygon_ism({}, frame, kPose0, 1.0, cfg);

    SUBCASE("non-increasing timestamp throws") {
        CHECK_THROWS_AS(update_polygon_ism(s, frame, kPose0, 1.0, cfg), std::runtime_error);
        CHECK_THROWS_AS(update_polygon_ism(s, frame, kPose0, 0.5, cfg), std::runtime_error);
    }
    SUBCASE("deterministic: same inputs give bit-identical states") {
        std::vector<RadarPoint> second = cluster(5.2, 0.3, 5);
        append(second, cluster(6, 3, 8));
        const PolygonState a = update_polygon_ism(s, second, kPose0, 2.0, cfg);
        const PolygonState b = update_polygon_ism(s, second, kPose0, 2.0, cfg);
        REQUIRE(a.polygon.vertices.size() == b.polygon.vertices.size());
        for (std::size_t i = 0; i < a.polygon.vertices.size(); ++i) {
            CHECK(a.polygon.vertices[i].position.x == b.polygon.vertices[i].position.x);
            CHECK(a.polygon.vertices[i].position.y == b.polygon.vertices[i].position.y);
            CHECK(a.polygon.vertices[i].confidence == b.polygon.vertices[i].confidence);
        }
        CHECK(a.uncertain.size() == b.uncertain.size());
    }
    SUBCASE("vertex count never exceeds the sector count") {
        Rng rng(123);
        const int sectors = cfg.formation.sector.sector_count();
        PolygonState st;
        for (int f = 0; f < 50; ++f) {
            std::vector<RadarPoint> noisy;
            for (int i = 0; i < 300; ++i) {
                const double az =
                    rng.uniform(cfg.formation.sector.fov_start, cfg.formation.sector.fov_end);
                const double r = rng.uniform(0.5, 19.5);
                noisy.push_back(pt(r * std::cos(az), r * std::sin(az),
                                   rng.uniform(10.0, 1e5)));
            }
            st = update_polygon_ism(st, noisy, kPose0, static_cast<double>(f), cfg);
            CHECK(static_cast<int>(st.polygon.vertices.size()) <= sectors);
        }
    }
}

TEST_CASE("state_memory_report counts the stored footprint") {
    SUBCASE("empty state") {
        const MemoryReport r = state_memory_report({});
        CHECK(r.vertex_count == 0);
        CHECK(r.uncertain_count == 0);
        CHECK(r.bytes_estimate == 0);
    }
    SUBCASE("full-circle polygon stays O(sector count)") {
        IsmConfig cfg;
        cfg.formation.sector.fov_start = -kPi;
        cfg.formation.sector.fov_end = kPi;
        cfg.formation.sector.delta_theta = deg2rad(0.5);
        std::vector<RadarPoint> frame;
        for (int s = 0; s < cfg.formation.sector.sector_count(); ++s) {
            const double az = cfg.formation.sector.sector_center(s);
            for (int k = 0; k < 4; ++k)
                frame.push_back(pt(8.0 * std::cos(az), 8.0 * std::sin(az)));
        }
        const PolygonState s = update_polygon_ism({}, frame, kPose0, 0.0, cfg);
        const MemoryReport r = state_memory_report(s);
        CHECK(r.vertex_count <= 721);
        CHECK(r.vertex_count > 0);
        CHECK(r.bytes_estimate == r.vertex_count * sizeof(PolygonVertex) +
                                      r.uncertain_count * sizeof(UncertainVertex));
    }
}

TEST_CASE("pose compensation keeps a static wall put while the ego moves") {
    const IsmConfig cfg;
    // Wall at world x = 6; ego advances 0.5 m per frame along +x. In each
    // sensor frame the wall appears at 6 - ego_x.
    auto frame_at = [&](double ego_x) { return cluster(6.0 - ego_x, 0.0, 8); };

    PolygonState s = update_polygon_ism({}, frame_at(0.0), Pose{0, 0, 0}, 0.0, cfg);
    for (int i = 1; i <= 4; ++i) {
        const double ego_x = 0.5 * i;
        s = update_polygon_ism(s, frame_at(ego_x), Pose{ego_x, 0, 0},
                               static_cast<double>(i), cfg);
        REQUIRE(s.polygon.vertices.size() == 1);
        // Tracked every frame: compensation maps the old vertex exactly onto
        // the new detection, so confidence accumulates.
        CHECK(s.polygon.vertices[0].position.x == doctest::Approx(6.0 - ego_x));
        CHECK(s.polygon.vertices[0].age == i);
    }
    CHECK(s.polygon.vertices[0].confidence >
          std::log(kP8 / (1.0 - kP8)) * 4.0);
}
