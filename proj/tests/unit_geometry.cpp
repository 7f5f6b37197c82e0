#include <stdexcept>
#include <doctest.h>

#include <cmath>

#include "radpoly/collision.hpp"
#include "radpoly/geometry.hpp"
#include "radpoly/rng.hpp"
#include "support/oracle.hpp"

using namespace radpoly;

namespace {

RadarPolygon square_polygon() {
    RadarPolygon poly;
    poly.closed_through_origin = false;
    for (Vec2 p : {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}}) {
        PolygonVertex v;
        v.position = p;
        poly.vertices.push_back(v);
    }
    return poly;
}

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
    CHECK(wrap_angle(7 * kTwoPi + 0.25) == doctest::Approx(0.25));
}

TEST_CASE("sector config counts and validates") {
    SectorConfig cfg;  // defaults: 2 deg sectors over [-65, 65] deg
    cfg.validate();
    CHECK(cfg.sector_count() == 65);
    CHECK_FALSE(cfg.full_circle());

    SectorConfig full;
    full.fov_start = -kPi;
    full.fov_end = kPi;
    full.delta_theta = deg2rad(0.5);
    full.validate();
    CHECK(full.full_circle());
    CHECK(full.sector_count() == 720);

    SectorConfig bad = cfg;
    bad.delta_theta = deg2rad(3.0);  // 130 / 3 is not an integer
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.delta_theta = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.fov_end = bad.fov_start;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.max_range = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sector_index bins azimuths") {
    SectorConfig cfg;
    CHECK(sector_index(cfg.fov_start, cfg) == 0);
    CHECK(sector_index(0.0, cfg) == 32);  // floor((0 - (-65)) / 2)
    CHECK_FALSE(sector_index(cfg.fov_end + 0.1, cfg).has_value());
    CHECK_FALSE(sector_index(cfg.fov_end, cfg).has_value());  // half-open interval
    CHECK_FALSE(sector_index(cfg.fov_start - 1e-9, cfg).has_value());

    SUBCASE("piecewise constant with breakpoints at sector edges") {
        for (int s = 0; s < cfg.sector_count(); ++s) {
            const double lo = cfg.fov_start + s * cfg.delta_theta;
            CHECK(sector_index(lo + 1e-9, cfg) == s);
            CHECK(sector_index(lo + cfg.delta_theta - 1e-9, cfg) == s);
        }
    }

    SUBCASE("full circle wraps") {
        SectorConfig full;
        full.fov_start = -kPi;
        full.fov_end = kPi;
        full.delta_theta = deg2rad(1.0);
        CHECK(sector_index(kPi + 0.01, full).has_value());  // wraps past the seam
        CHECK(sector_index(-kPi - 0.01, full).has_value());
    }
}

TEST_CASE("ring closure and degeneracy") {
    RadarPolygon poly;
    poly.closed_through_origin = true;
    CHECK(poly.ring().size() == 1);
    CHECK(poly.degenerate());

    PolygonVertex v;
    v.position = {3.0, 0.0};
    poly.vertices.push_back(v);
    v.position = {0.0, 3.0};
    poly.vertices.push_back(v);
    CHECK(poly.ring().size() == 3);  // two vertices + origin
    CHECK_FALSE(poly.degenerate());
    CHECK(poly.area() == doctest::Approx(4.5));

    poly.closed_through_origin = false;
    CHECK(poly.ring().size() == 2);
    CHECK(poly.degenerate());
}

TEST_CASE("polygon_is_simple") {
    CHECK(polygon_is_simple(square_polygon()));

    RadarPolygon bowtie;
    bowtie.closed_through_origin = false;
    for (Vec2 p : {Vec2{0, 0}, Vec2{1, 1}, Vec2{1, 0}, Vec2{0, 1}}) {
        PolygonVertex v;
        v.position = p;
        bowtie.vertices.push_back(v);
    }
    CHECK_FALSE(polygon_is_simple(bowtie));
}

TEST_CASE("rasterize_polygon marks interior centers") {
    const RadarPolygon sq = square_polygon();
    SUBCASE("unit square, 0.5 m cells over [0,1]^2: all 4 centers free") {
        const FreeSpaceMask m = rasterize_polygon(sq, {0, 0}, 0.5, 2, 2);
        CHECK(m.count_free() == 4);
        CHECK_FALSE(m.degenerate_source);
    }
    SUBCASE("degenerate input flags an empty mask") {
        RadarPolygon two;
        two.closed_through_origin = false;
        PolygonVertex v;
        v.position = {1, 0};
        two.vertices.push_back(v);
        v.position = {0, 1};
        two.vertices.push_back(v);
        const FreeSpaceMask m = rasterize_polygon(two, {0, 0}, 0.5, 2, 2);
        CHECK(m.degenerate_source);
        CHECK(m.count_free() == 0);
    }
    SUBCASE("disjoint grid extent stays empty") {
        const FreeSpaceMask m = rasterize_polygon(sq, {10, 10}, 0.5, 4, 4);
        CHECK(m.count_free() == 0);
    }
    SUBCASE("agrees with the brute-force oracle on random star polygons") {
        Rng rng(2024);
        for (int trial = 0; trial < 200; ++trial) {
            const auto ring = oracle::random_star_polygon(rng, 3 + static_cast<int>(rng.next_u64() % 30));
            RadarPolygon poly;
            poly.closed_through_origin = false;
            for (const auto& p : ring) {
                PolygonVertex v;
                v.position = p;
                poly.vertices.push_back(v);
            }
            const FreeSpaceMask m = rasterize_polygon(poly, {-14, -14}, 1.75, 16, 16);
            for (int iy = 0; iy < m.height; ++iy) {
                for (int ix = 0; ix < m.width; ++ix) {
                    const Vec2 c = m.cell_center(ix, iy);
                    const bool expect = oracle::point_in_polygon_bruteforce(ring, c.x, c.y);
                    REQUIRE(static_cast<bool>(m.at(ix, iy)) == expect);
                }
            }
        }
    }
}

TEST_CASE("mask_iou") {
    FreeSpaceMask a = FreeSpaceMask::make({0, 0}, 1.0, 10, 10);
    FreeSpaceMask b = a;
    SUBCASE("both empty -> 1 by convention") { CHECK(mask_iou(a, b) == 1.0); }
    SUBCASE("identity") {
        for (int i = 0; i < 10; ++i) a.set(i, i, 1);
        CHECK(mask_iou(a, a) == 1.0);
    }
    SUBCASE("disjoint -> 0") {
        a.set(0, 0, 1);
        b.set(9, 9, 1);
        CHECK(mask_iou(a, b) == 0.0);
    }
    SUBCASE("left half vs all -> 0.5") {
        for (int iy = 0; iy < 10; ++iy)
            for (int ix = 0; ix < 10; ++ix) {
                b.set(ix, iy, 1);
                if (ix < 5) a.set(ix, iy, 1);
            }
        CHECK(mask_iou(a, b) == doctest::Approx(0.5));
        CHECK(mask_iou(b, a) == doctest::Approx(0.5));  // symmetric
    }
    SUBCASE("mismatched grids throw") {
        const FreeSpaceMask c = FreeSpaceMask::make({0, 0}, 0.5, 10, 10);
        CHECK_THROWS_AS(mask_iou(a, c), std::invalid_argument);
    }
}

TEST_CASE("polygon_iou") {
    const RadarPolygon sq = square_polygon();
    SUBCASE("identity is exactly 1") {
        CHECK(polygon_iou(sq, sq, 0.05) == 1.0);
        CHECK(polygon_iou(sq, sq, 0.37) == 1.0);
    }
    SUBCASE("half-overlapping unit squares -> 1/3") {
        RadarPolygon shifted = sq;
        for (auto& v : shifted.vertices) v.position.x += 0.5;
        CHECK(polygon_iou(sq, shifted, 0.01) == doctest::Approx(1.0 / 3.0).epsilon(0.02));
    }
    SUBCASE("disjoint squares -> 0") {
        RadarPolygon far = sq;
        for (auto& v : far.vertices) v.position.x += 5.0;
        CHECK(polygon_iou(sq, far, 0.05) == 0.0);
    }
    SUBCASE("degenerate input throws") {
        RadarPolygon empty;
        empty.closed_through_origin = false;
        CHECK_THROWS_AS(polygon_iou(sq, empty, 0.1), std::invalid_argument);
    }
}
