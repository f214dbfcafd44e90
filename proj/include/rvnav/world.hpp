#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rvnav/controllers.hpp"
#include "rvnav/geometry.hpp"
#include "rvnav/rng.hpp"
#include "rvnav/unicycle.hpp"

namespace rvnav {

// Square world bounded by walls at x,y in {0, side}; obstacles are discs.
struct WorldMap {
    double side = 5.0;
    double robot_radius = 0.11;
    std::vector<Obstacle> obstacles;

    bool inside(double x, double y) const {
        return x >= 0.0 && x <= side && y >= 0.0 && y <= side;
    }

    // True distance from a point to the nearest obstacle surface; walls are
    // handled separately by callers that care about them.
    double obstacle_clearance(const Vec2& p) const {
        double best = std::numeric_limits<double>::infinity();
        for (const Obstacle& o : obstacles)
            best = std::min(best, (p - o.center).norm() - o.radius);
        return best;
    }
};

// One range reading per degree in the robot frame. Readings outside the
// sensor's span are reported as no-return.
struct LidarScan {
    static constexpr int kRays = 360;
    static constexpr double kMinRange = 0.12;
    static constexpr double kMaxRange = 3.6;

    std::array<double, kRays> range{};  // meters; negative means no return

    static bool is_return(double r) { return r >= 0.0; }
};

// Exact ray casting against walls and obstacle discs.
inline LidarScan raycast_scan(const Pose& true_pose, const WorldMap& world) {
    if (!world.inside(true_pose.x, true_pose.y))
        throw std::invalid_argument("raycast_scan: pose outside world bounds");

    const Vec2 origin{true_pose.x, true_pose.y};
    const std::array<std::pair<Vec2, Vec2>, 4> walls = {
        std::pair<Vec2, Vec2>{{0.0, 0.0}, {world.side, 0.0}},
        std::pair<Vec2, Vec2>{{world.side, 0.0}, {world.side, world.side}},
        std::pair<Vec2, Vec2>{{world.side, world.side}, {0.0, world.side}},
        std::pair<Vec2, Vec2>{{0.0, world.side}, {0.0, 0.0}}};

    LidarScan scan;
    for (int i = 0; i < LidarScan::kRays; ++i) {
        const double bearing = true_pose.theta + double(i) * M_PI / 180.0;
        const Vec2 dir{std::cos(bearing), std::sin(bearing)};
        double hit = std::numeric_limits<double>::infinity();
        for (const auto& w : walls)
            if (auto t = ray_segment_intersection(origin, dir, w.first, w.second))
                hit = std::min(hit, *t);
        for (const Obstacle& o : world.obstacles)
            if (auto t = ray_circle_intersection(origin, dir, Circle{o.center, o.radius}))
                hit = std::min(hit, *t);
        scan.range[std::size_t(i)] =
            (hit >= LidarScan::kMinRange && hit <= LidarScan::kMaxRange) ? hit : -1.0;
    }
    return scan;
}

// Bounded-noise localization oracle: the estimate is the true pose plus
// uniform noise within the stated half-widths, so the containment guarantee
// holds by construction. theta is left unwrapped to keep it an interval
// around the true value.
struct LocalizationEstimate {
    Pose pose;
    double ux = 0.0;      // m
    double uy = 0.0;      // m
    double utheta = 0.0;  // rad
};

inline LocalizationEstimate localize(const Pose& true_pose,
                                     const std::array<double, 3>& half_widths, Rng& rng) {
    LocalizationEstimate est;
    est.pose.x = true_pose.x + uniform(rng, -half_widths[0], half_widths[0]);
    est.pose.y = true_pose.y + uniform(rng, -half_widths[1], half_widths[1]);
    est.pose.theta = true_pose.theta + uniform(rng, -half_widths[2], half_widths[2]);
    est.ux = half_widths[0];
    est.uy = half_widths[1];
    est.utheta = half_widths[2];
    return est;
}

namespace detail {

inline double wall_distance(const Vec2& p, double side) {
    return std::min({p.x, side - p.x, p.y, side - p.y});
}

struct ScanPoint {
    int ray = 0;
    Vec2 world;
    double range = 0.0;
};

}  // namespace detail

// Turns a scan into world-frame obstacle discs: wall returns are discarded,
// the rest are clustered by angular adjacency, and each cluster becomes a
// circle inflated by the localization uncertainty. A least-squares circle fit
// recovers the full disc from the visible arc (the ranges are exact, so the
// fit is too); degenerate clusters fall back to the minimal enclosing circle.
inline std::vector<Obstacle> detect_obstacles(const LidarScan& scan,
                                              const LocalizationEstimate& estimate,
                                              const WorldMap& world) {
    constexpr double kWallFilter = 0.05;
    constexpr double kClusterGap = 0.15;
    constexpr int kMaxRayGap = 2;

    std::vector<detail::ScanPoint> points;
    for (int i = 0; i < LidarScan::kRays; ++i) {
        const double r = scan.range[std::size_t(i)];
        if (!LidarScan::is_return(r)) continue;
        const double bearing = estimate.pose.theta + double(i) * M_PI / 180.0;
        const Vec2 p{estimate.pose.x + r * std::cos(bearing),
                     estimate.pose.y + r * std::sin(bearing)};
        if (detail::wall_distance(p, world.side) <= kWallFilter) continue;
        points.push_back({i, p, r});
    }
    if (points.empty()) return {};

    std::vector<std::vector<detail::ScanPoint>> clusters;
    clusters.emplace_back();
    clusters.back().push_back(points.front());
    for (std::size_t k = 1; k < points.size(); ++k) {
        const detail::ScanPoint& prev = clusters.back().back();
        const detail::ScanPoint& cur = points[k];
        const bool adjacent = (cur.ray - prev.ray) <= kMaxRayGap &&
                              (cur.world - prev.world).norm() <= kClusterGap;
        if (!adjacent) clusters.emplace_back();
        clusters.back().push_back(cur);
    }
    // wrap-around: ray 359 may continue into ray 0
    if (clusters.size() > 1) {
        const detail::ScanPoint& last = clusters.back().back();
        const detail::ScanPoint& first = clusters.front().front();
        if (first.ray + LidarScan::kRays - last.ray <= kMaxRayGap &&
            (first.world - last.world).norm() <= kClusterGap) {
            clusters.front().insert(clusters.front().begin(), clusters.back().begin(),
                                    clusters.back().end());
            clusters.pop_back();
        }
    }

    std::vector<Obstacle> detections;
    for (const auto& cluster : clusters) {
        std::vector<Vec2> pts;
        double max_range = 0.0;
        pts.reserve(cluster.size());
        for (const detail::ScanPoint& sp : cluster) {
            pts.push_back(sp.world);
            max_range = std::max(max_range, sp.range);
        }
        const double inflate =
            std::hypot(estimate.ux, estimate.uy) + estimate.utheta * max_range + 0.01;

        Circle circle{};
        bool fitted = false;
        if (auto fit = fit_circle(pts)) {
            double max_resid = 0.0;
            for (const Vec2& p : pts)
                max_resid = std::max(max_resid,
                                     std::fabs((p - fit->center).norm() - fit->radius));
            if (fit->radius <= 1.0 && max_resid <= 0.05) {
                circle = Circle{fit->center, fit->radius + max_resid};
                fitted = true;
            }
        }
        if (!fitted) circle = min_enclosing_circle(pts);
        detections.push_back(Obstacle{circle.center, circle.radius + inflate});
    }
    return detections;
}

}  // namespace rvnav
