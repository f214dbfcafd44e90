#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rvnav/geometry.hpp"
#include "rvnav/unicycle.hpp"

namespace rvnav {

struct Obstacle {
    Vec2 center;
    double radius = 0.0;
};

// Obstacle-avoidance controller configuration. tangential_source selects the
// operand of the 90-degree rotation that produces the circulation component:
// the robot-to-center vector keeps the robot circulating at the standoff
// distance, the standoff-error vector stalls exactly at that distance.
enum class TangentialSource { CenterVector, StandoffVector };

struct AvoidanceConfig {
    double standoff = 0.9;  // distance to hold from the obstacle center, m
    double v_cap = kMaxLinearSpeed;
    double omega_cap = kMaxAngularSpeed;
    TangentialSource tangential_source = TangentialSource::CenterVector;
};

// Geometric obstacle-avoidance controller: blend of a standoff-keeping
// component and a counterclockwise circulation component, capped to the
// actuator limits.
inline ControlInput kb_control(const Pose& pose, const Obstacle& obstacle,
                               const AvoidanceConfig& cfg) {
    const Vec2 to_center{obstacle.center.x - pose.x, obstacle.center.y - pose.y};
    const double dist = to_center.norm();
    if (dist < 1e-9)
        throw std::invalid_argument("kb_control: robot coincides with obstacle center");

    const Vec2 standoff_err = to_center - to_center * (cfg.standoff / dist);
    const Vec2 tangential = (cfg.tangential_source == TangentialSource::CenterVector)
                                ? to_center.rot90ccw()
                                : standoff_err.rot90ccw();
    const Vec2 u = standoff_err + tangential;

    const double phi = std::atan2(u.y, u.x);
    const double v = std::min(cfg.v_cap, u.norm());
    const double omega = clamp(wrap_to_pi(phi - pose.theta), -cfg.omega_cap, cfg.omega_cap);
    return ControlInput{v, omega};
}

// Left-turn reference path: a straight run, a quarter arc, then a straight
// climb into the goal zone. Parameterized by arc length.
struct ReferencePath {
    double start_x = 0.5;
    double start_y = 1.0;
    double corner_x = 3.0;
    double arc_radius = 1.0;
    double end_y = 4.5;
    double goal_y = 4.0;

    double first_len() const { return corner_x - start_x; }
    double arc_len() const { return arc_radius * M_PI / 2.0; }
    double second_x() const { return corner_x + arc_radius; }
    double length() const {
        return first_len() + arc_len() + (end_y - (start_y + arc_radius));
    }
    Vec2 arc_center() const { return {corner_x, start_y + arc_radius}; }

    Vec2 point_at(double s) const {
        s = clamp(s, 0.0, length());
        if (s <= first_len()) return {start_x + s, start_y};
        if (s <= first_len() + arc_len()) {
            const double a = -M_PI / 2.0 + (s - first_len()) / arc_radius;
            const Vec2 c = arc_center();
            return {c.x + arc_radius * std::cos(a), c.y + arc_radius * std::sin(a)};
        }
        return {second_x(), start_y + arc_radius + (s - first_len() - arc_len())};
    }

    double heading_at(double s) const {
        s = clamp(s, 0.0, length());
        if (s <= first_len()) return 0.0;
        if (s <= first_len() + arc_len())
            return (s - first_len()) / arc_radius;  // sweeps 0 .. pi/2
        return M_PI / 2.0;
    }

    // Arc-length of the closest path point to (x, y).
    double closest_s(double x, double y) const {
        const Vec2 p{x, y};
        double best_s = 0.0;
        double best_d = std::numeric_limits<double>::infinity();
        auto consider = [&](double s) {
            const double d = (point_at(s) - p).norm();
            if (d < best_d) {
                best_d = d;
                best_s = s;
            }
        };
        // straight 1
        consider(clamp(x - start_x, 0.0, first_len()));
        // arc: clamp the polar angle to [-pi/2, 0], splitting the wrap-around
        // side at its angular midpoint (3pi/4)
        const Vec2 c = arc_center();
        double a = std::atan2(y - c.y, x - c.x);
        if (a > 0.75 * M_PI || a < -M_PI / 2.0)
            a = -M_PI / 2.0;
        else if (a > 0.0)
            a = 0.0;
        consider(first_len() + (a + M_PI / 2.0) * arc_radius);
        // straight 2
        consider(first_len() + arc_len() +
                 clamp(y - (start_y + arc_radius), 0.0, end_y - start_y - arc_radius));
        return best_s;
    }
};

// Scripted pure-pursuit expert used to generate demonstrations. Commands the
// full translational speed and a curvature-tracking turn rate toward a fixed
// lookahead point; zero once the goal zone or the path end is reached.
inline ControlInput expert_control(const Pose& pose, const ReferencePath& path,
                                   double lookahead = 0.35) {
    if (pose.y >= path.goal_y) return ControlInput{0.0, 0.0};
    const double s = path.closest_s(pose.x, pose.y);
    if (s >= path.length() - 1e-9) return ControlInput{0.0, 0.0};

    const Vec2 target = path.point_at(std::min(s + lookahead, path.length()));
    const double alpha = wrap_to_pi(std::atan2(target.y - pose.y, target.x - pose.x) -
                                    pose.theta);
    const double v = kMaxLinearSpeed;
    const double omega = clamp(2.0 * v * std::sin(alpha) / lookahead, -kMaxAngularSpeed,
                               kMaxAngularSpeed);
    return ControlInput{v, omega};
}

}  // namespace rvnav
