#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <vector>

#include "radpoly/metrics.hpp"

using namespace radpoly;

namespace {

RadarPolygon square_polygon(double half, Vec2 center = {0, 0}) {
    RadarPolygon poly;
    poly.closed_through_origin = false;
    const Vec2 corners[4] = {{center.x - half, center.y - half},
                             {center.x + half, center.y - half},
                             {center.x + half, center.y + half},
                             {center.x - half, center.y + half}};
    for (const Vec2& c : corners) {
        PolygonVertex v;
        v.position = c;
        poly.vertices.push_back(v);
    }
    return poly;
}

RadarPolygon circle_polygon(double radius, double doppler, int n = 90) {
    RadarPolygon poly;
    poly.closed_through_origin = false;
    for (int i = 0; i < n; ++i) {
        const double az = kTwoPi * i / n;
        PolygonVertex v;
        v.position = {radius * std::cos(az), radius * std::sin(az)};
        v.doppler = doppler;
        poly.vertices.push_back(v);
    }
    return poly;
}

}  // namespace

TEST_CASE("iou_gt compares the polygon to a mask on the mask's grid") {
    const RadarPolygon sq = square_polygon(2.0);
    FreeSpaceMask gt = FreeSpaceMask::make({-3, -3}, 0.1, 60, 60);
    const FreeSpaceMask raster = rasterize_like(sq, gt);
    for (int iy = 0; iy < gt.height; ++iy)
        for (int ix = 0; ix < gt.width; ++ix) gt.set(ix, iy, raster.at(ix, iy));

    CHECK(iou_gt(sq, gt) == 1.0);

    SUBCASE("half-overlapping truth") {
        // Truth free only where x > 0: intersection is half the square.
        FreeSpaceMask half = FreeSpaceMask::make({-3, -3}, 0.1, 60, 60);
        for (int iy = 0; iy < half.height; ++iy)
            for (int ix = 0; ix < half.width; ++ix)
                half.set(ix, iy, raster.at(ix, iy) && half.cell_center(ix, iy).x > 0.0);
        CHECK(iou_gt(sq, half) == doctest::Approx(0.5).epsilon(0.02));
    }
    SUBCASE("degenerate polygon scores zero") {
        RadarPolygon degen;
        degen.closed_through_origin = false;
        CHECK(iou_gt(degen, gt) == 0.0);
    }
}

TEST_CASE("iou_smooth is invariant to rigid ego motion") {
    // One fixed world-frame square seen from two poses.
    const Pose pa{0, 0, 0};
    const Pose pb{1.0, -0.5, 0.3};
    const RadarPolygon in_a = square_polygon(2.0, {5, 0});
    const RadarPolygon in_b = compensate_polygon(in_a, pa, pb);

    CHECK(iou_smooth(in_a, pa, in_a, pa, 0.05) == 1.0);
    CHECK(iou_smooth(in_a, pa, in_b, pb, 0.02) == doctest::Approx(1.0).epsilon(0.03));

    SUBCASE("an actual shape change lowers the score") {
        const RadarPolygon smaller = square_polygon(1.0, {5, 0});
        const double v = iou_smooth(in_a, pa, smaller, pa, 0.02);
        CHECK(v == doctest::Approx(0.25).epsilon(0.05));
    }
    SUBCASE("degenerate input scores zero") {
        RadarPolygon degen;
        degen.closed_through_origin = false;
        CHECK(iou_smooth(degen, pa, in_a, pa, 0.05) == 0.0);
    }
}

TEST_CASE("mse_free is the mask mismatch fraction") {
    FreeSpaceMask a = FreeSpaceMask::make({0, 0}, 1.0, 10, 10);
    FreeSpaceMask b = FreeSpaceMask::make({0, 0}, 1.0, 10, 10);
    CHECK(mse_free(a, b) == 0.0);

    for (int i = 0; i < 10; ++i) a.set(i, 0, true);  // 10 of 100 cells differ
    CHECK(mse_free(a, b) == doctest::Approx(0.1));
    for (int i = 0; i < 10; ++i) b.set(i, 0, true);
    CHECK(mse_free(a, b) == 0.0);

    FreeSpaceMask other = FreeSpaceMask::make({0, 0}, 1.0, 5, 5);
    CHECK_THROWS_AS(mse_free(a, other), std::invalid_argument);
}

TEST_CASE("prediction_iou scores the Doppler forecast") {
    const RadarPolygon now = circle_polygon(10.0, -1.0);  // shrinking toward the sensor
    const RadarPolygon next_truth = circle_polygon(9.0, -1.0);

    const double with_prediction = prediction_iou(now, 1.0, next_truth, 0.05);
    CHECK(with_prediction == doctest::Approx(1.0).epsilon(0.02));

    const double frozen = prediction_iou(now, 0.0, next_truth, 0.05);
    CHECK(frozen == doctest::Approx(0.81).epsilon(0.03));  // area ratio (9/10)^2
    CHECK(with_prediction > frozen);

    SUBCASE("degenerate inputs score zero") {
        RadarPolygon degen;
        degen.closed_through_origin = false;
        CHECK(prediction_iou(degen, 1.0, next_truth, 0.05) == 0.0);
        CHECK(prediction_iou(now, 1.0, degen, 0.05) == 0.0);
    }
}

TEST_CASE("memory_ratio contrasts dense grid cells with stored vertices") {
    // Full-circle polygon at 0.5-degree sectors: 720 vertices.
    IsmConfig cfg;
    cfg.formation.sector.fov_start = -kPi;
    cfg.formation.sector.fov_end = kPi;
    cfg.formation.sector.delta_theta = deg2rad(0.5);
    std::vector<RadarPoint> frame;
    for (int s = 0; s < cfg.formation.sector.sector_count(); ++s) {
        const double az = cfg.formation.sector.sector_center(s);
        for (int k = 0; k < 4; ++k)
            frame.push_back(RadarPoint{8.0 * std::cos(az), 8.0 * std::sin(az), 0.0, 0.0, 1e15});
    }
    const PolygonState state = update_polygon_ism({}, frame, Pose{0, 0, 0}, 0.0, cfg);
    REQUIRE(state.polygon.vertices.size() == 720);

    const OccupancyGrid grid = OccupancyGrid::make(GridConfig{});  // 200 x 200
    CHECK(memory_ratio(grid, state) == doctest::Approx(40000.0 / 720.0).epsilon(1e-6));

    SUBCASE("empty state throws") {
        CHECK_THROWS_AS(memory_ratio(grid, PolygonState{}), std::invalid_argument);
    }
}

TEST_CASE("RuntimeStats summarizes per-frame timings") {
    RuntimeStats s;
    for (int i = 1; i <= 100; ++i) s.per_frame_ms.push_back(static_cast<double>(i));
    CHECK(s.mean() == doctest::Approx(50.5));
    CHECK(s.p95() == doctest::Approx(95.0));
    CHECK(s.max() == 100.0);

    RuntimeStats one;
    one.per_frame_ms = {3.0};
    CHECK(one.mean() == 3.0);
    CHECK(one.p95() == 3.0);
    CHECK(one.max() == 3.0);
}
