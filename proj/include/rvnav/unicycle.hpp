#pragma once

#include <cmath>

namespace rvnav {

// Turtlebot 3 Burger actuator limits.
inline constexpr double kMaxLinearSpeed = 0.22;   // m/s
inline constexpr double kMaxAngularSpeed = 2.84;  // rad/s

inline double wrap_to_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

inline double clamp(double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

struct Pose {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // rad
};

struct ControlInput {
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s
};

inline ControlInput clamp_control(const ControlInput& u) {
    return ControlInput{clamp(u.v, -kMaxLinearSpeed, kMaxLinearSpeed),
                        clamp(u.omega, -kMaxAngularSpeed, kMaxAngularSpeed)};
}

// Exact solution of xdot = v cos(theta), ydot = v sin(theta), thetadot = omega
// under constant control: straight-line limit for tiny omega, arc otherwise.
inline Pose closed_form_unicycle(const Pose& p, const ControlInput& u, double t) {
    if (std::fabs(u.omega) < 1e-9) {
        return Pose{p.x + u.v * t * std::cos(p.theta), p.y + u.v * t * std::sin(p.theta),
                    p.theta + u.omega * t};
    }
    const double th1 = p.theta + u.omega * t;
    const double k = u.v / u.omega;
    return Pose{p.x + k * (std::sin(th1) - std::sin(p.theta)),
                p.y + k * (std::cos(p.theta) - std::cos(th1)), th1};
}

}  // namespace rvnav
