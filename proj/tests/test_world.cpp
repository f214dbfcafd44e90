#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rvnav/rng.hpp"
#include "rvnav/world.hpp"

using namespace rvnav;

TEST_CASE("raycast examples against plain geometry") {
    WorldMap world;

    // east wall from the center
    const LidarScan center = raycast_scan({2.5, 2.5, 0.0}, world);
    REQUIRE(center.range[0] == Catch::Approx(2.5).margin(1e-9));

    // west wall at 180 degrees, within range
    const LidarScan west = raycast_scan({0.5, 2.5, 0.0}, world);
    REQUIRE(west.range[180] == Catch::Approx(0.5).margin(1e-9));

    // ray-circle intersection straight ahead
    world.obstacles.push_back(Obstacle{{2.3, 0.3}, 0.5});
    const LidarScan obst = raycast_scan({0.3, 0.3, 0.0}, world);
    REQUIRE(obst.range[0] == Catch::Approx(1.5).margin(1e-9));
}

TEST_CASE("raycast range limits map to no-return") {
    WorldMap world;
    const LidarScan scan = raycast_scan({2.5, 2.5, 0.0}, world);
    // all walls are exactly 2.5 m away on axis rays; diagonals reach ~3.54 m
    REQUIRE(LidarScan::is_return(scan.range[0]));
    REQUIRE(LidarScan::is_return(scan.range[90]));
    // a pose close to a wall makes the near ray shorter than the minimum range
    const LidarScan near = raycast_scan({0.05, 2.5, 0.0}, world);
    REQUIRE_FALSE(LidarScan::is_return(near.range[180]));
    REQUIRE_THROWS_AS(raycast_scan({-0.1, 2.5, 0.0}, world), std::invalid_argument);
}

TEST_CASE("raycast returns the true nearest-surface distance") {
    WorldMap world;
    world.obstacles.push_back(Obstacle{{3.0, 3.0}, 0.4});
    world.obstacles.push_back(Obstacle{{1.2, 3.8}, 0.25});
    Rng rng(5150);
    for (int i = 0; i < 40; ++i) {
        const Pose pose{uniform(rng, 0.5, 4.5), uniform(rng, 0.5, 4.5),
                        uniform(rng, -M_PI, M_PI)};
        if (world.obstacle_clearance({pose.x, pose.y}) < 0.05) continue;
        const LidarScan scan = raycast_scan(pose, world);
        for (int ray = 0; ray < LidarScan::kRays; ray += 7) {
            if (!LidarScan::is_return(scan.range[std::size_t(ray)])) continue;
            // march along the ray: no surface crossing before the reading
            const double bearing = pose.theta + ray * M_PI / 180.0;
            const double r = scan.range[std::size_t(ray)];
            for (double f = 0.05; f < 0.999; f += 0.05) {
                const Vec2 p{pose.x + f * r * std::cos(bearing),
                             pose.y + f * r * std::sin(bearing)};
                REQUIRE(world.obstacle_clearance(p) > -1e-9);
                REQUIRE(p.x > -1e-9);
                REQUIRE(p.x < world.side + 1e-9);
            }
        }
    }
}

TEST_CASE("localize: zero noise equals truth; noise stays within bounds") {
    Rng rng(1);
    const Pose truth{1.5, 2.5, 0.7};
    const LocalizationEstimate exact = localize(truth, {0, 0, 0}, rng);
    REQUIRE(exact.pose.x == truth.x);
    REQUIRE(exact.pose.y == truth.y);
    REQUIRE(exact.pose.theta == truth.theta);

    for (int i = 0; i < 2000; ++i) {
        const LocalizationEstimate est = localize(truth, {0.01, 0.01, 0.01}, rng);
        REQUIRE(std::fabs(est.pose.x - truth.x) <= 0.01);
        REQUIRE(std::fabs(est.pose.y - truth.y) <= 0.01);
        REQUIRE(std::fabs(est.pose.theta - truth.theta) <= 0.01);
    }

    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const LocalizationEstimate ea = localize(truth, {0.01, 0.01, 0.01}, a);
        const LocalizationEstimate eb = localize(truth, {0.01, 0.01, 0.01}, b);
        REQUIRE(ea.pose.x == eb.pose.x);
        REQUIRE(ea.pose.theta == eb.pose.theta);
    }
}

TEST_CASE("minimal enclosing circle contains all points and is minimal") {
    Rng rng(64);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Vec2> pts;
        const int n = 1 + int(uniform_index(rng, 12));
        for (int i = 0; i < n; ++i)
            pts.push_back({uniform(rng, -2, 2), uniform(rng, -2, 2)});
        const Circle c = min_enclosing_circle(pts);
        double spread = 0.0;
        for (const Vec2& p : pts) {
            REQUIRE((p - c.center).norm() <= c.radius + 1e-9);
            for (const Vec2& q : pts) spread = std::max(spread, (p - q).norm());
        }
        // minimality: never bigger than the brute-force pairwise diameter bound
        REQUIRE(c.radius <= spread / std::sqrt(3.0) + 1e-9);
    }
}

TEST_CASE("detection: empty world yields no detections") {
    WorldMap world;
    Rng rng(2);
    const Pose pose{2.5, 2.5, 0.3};
    const LocalizationEstimate est = localize(pose, {0.01, 0.01, 0.01}, rng);
    const auto detections = detect_obstacles(raycast_scan(pose, world), est, world);
    REQUIRE(detections.empty());
}

TEST_CASE("detection: obstacle beyond sensor range is invisible") {
    WorldMap world;
    world.obstacles.push_back(Obstacle{{4.5, 4.5}, 0.2});
    Rng rng(3);
    const Pose pose{0.5, 0.5, 0.0};  // ~5.6 m away
    const LocalizationEstimate est = localize(pose, {0.01, 0.01, 0.01}, rng);
    const auto detections = detect_obstacles(raycast_scan(pose, world), est, world);
    REQUIRE(detections.empty());
}

TEST_CASE("detection recovers a visible obstacle within tight bounds") {
    Rng rng(4);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        WorldMap world;
        const Obstacle truth{{uniform(rng, 1.4, 3.6), uniform(rng, 1.4, 3.6)},
                             uniform(rng, 0.15, 0.4)};
        world.obstacles.push_back(truth);
        const Pose pose{uniform(rng, 0.8, 4.2), uniform(rng, 0.8, 4.2),
                        uniform(rng, -M_PI, M_PI)};
        const double dist = (Vec2{pose.x, pose.y} - truth.center).norm();
        if (dist < truth.radius + 0.3 || dist > 3.0) continue;  // fully visible cases
        ++checked;
        const LocalizationEstimate est = localize(pose, {0.01, 0.01, 0.01}, rng);
        const auto detections =
            detect_obstacles(raycast_scan(pose, world), est, world);
        REQUIRE(detections.size() == 1);
        const Obstacle& d = detections.front();
        REQUIRE((d.center - truth.center).norm() < 0.1);
        REQUIRE(d.radius >= truth.radius - 0.05);
        REQUIRE(d.radius <= truth.radius + std::hypot(0.01, 0.01) + 0.1);

        // soundness: the true disc is covered by the detection
        const double gap = (d.center - truth.center).norm() + truth.radius;
        REQUIRE(gap <= d.radius + 1e-9);
    }
    REQUIRE(checked > 20);
}

TEST_CASE("detection covers the true disc whenever part of it is visible") {
    Rng rng(6);
    int covered_checks = 0;
    for (int trial = 0; trial < 80; ++trial) {
        WorldMap world;
        const Obstacle truth{{uniform(rng, 1.0, 4.0), uniform(rng, 1.0, 4.0)},
                             uniform(rng, 0.15, 0.4)};
        world.obstacles.push_back(truth);
        const Pose pose{uniform(rng, 0.6, 4.4), uniform(rng, 0.6, 4.4),
                        uniform(rng, -M_PI, M_PI)};
        const double dist = (Vec2{pose.x, pose.y} - truth.center).norm();
        if (dist < truth.radius + 0.25 || dist > 3.4) continue;
        const LocalizationEstimate est = localize(pose, {0.01, 0.01, 0.01}, rng);
        const auto detections =
            detect_obstacles(raycast_scan(pose, world), est, world);
        REQUIRE(!detections.empty());
        // the union of detections covers the true disc: check boundary samples
        for (int k = 0; k < 64; ++k) {
            const double a = 2.0 * M_PI * k / 64;
            const Vec2 boundary = truth.center + Vec2{std::cos(a), std::sin(a)} * truth.radius;
            bool inside_any = false;
            for (const Obstacle& d : detections)
                inside_any = inside_any || (boundary - d.center).norm() <= d.radius + 1e-9;
            REQUIRE(inside_any);
        }
        ++covered_checks;
    }
    REQUIRE(covered_checks > 25);
}
