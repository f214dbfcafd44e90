#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rvnav/supervisor.hpp"
#include "rvnav/world.hpp"

namespace rvnav {

namespace detail {

inline constexpr double kSvgScale = 120.0;  // px per meter

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
}

inline double sx(double x) { return x * kSvgScale; }
inline double sy(double y, double side) { return (side - y) * kSvgScale; }

}  // namespace detail

// Draws walls, obstacles, the trajectory colored by the active controller
// (green for the learned one, red for the backup), and the per-tick reachable
// set boxes in matching colors.
inline void render_episode_svg(const WorldMap& world, const EpisodeLog& log, double goal_y,
                               const std::string& path) {
    using detail::fmt;
    using detail::sx;
    using detail::sy;
    const double side = world.side;
    const double size = side * detail::kSvgScale;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("render_episode_svg: cannot open " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(size) << "\" height=\""
        << fmt(size) << "\" viewBox=\"0 0 " << fmt(size) << " " << fmt(size) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(size) << "\" height=\"" << fmt(size)
        << "\" fill=\"white\" stroke=\"black\" stroke-width=\"3\"/>\n";

    // goal line
    out << "<line x1=\"0\" y1=\"" << fmt(sy(goal_y, side)) << "\" x2=\"" << fmt(size)
        << "\" y2=\"" << fmt(sy(goal_y, side))
        << "\" stroke=\"#888\" stroke-dasharray=\"8 6\" stroke-width=\"1.5\"/>\n";

    // reachable-set boxes under the trajectory
    for (const TickRecord& tick : log.ticks) {
        const char* color = tick.mode == Mode::NN ? "#2c9f2c" : "#cc2c2c";
        for (const auto& b : tick.boxes) {
            const double w = (b[1] - b[0]) * detail::kSvgScale;
            const double h = (b[3] - b[2]) * detail::kSvgScale;
            out << "<rect x=\"" << fmt(sx(b[0])) << "\" y=\"" << fmt(sy(b[3], side))
                << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"" << color
                << "\" fill-opacity=\"0.05\" stroke=\"" << color
                << "\" stroke-opacity=\"0.25\" stroke-width=\"0.5\"/>\n";
        }
    }

    for (const Obstacle& o : world.obstacles)
        out << "<circle cx=\"" << fmt(sx(o.center.x)) << "\" cy=\"" << fmt(sy(o.center.y, side))
            << "\" r=\"" << fmt(o.radius * detail::kSvgScale)
            << "\" fill=\"#555\" fill-opacity=\"0.8\"/>\n";

    // trajectory, one polyline per contiguous mode run
    for (std::size_t i = 0; i < log.ticks.size();) {
        const Mode mode = log.ticks[i].mode;
        std::string pts;
        std::size_t j = i;
        for (; j < log.ticks.size() && log.ticks[j].mode == mode; ++j)
            pts += fmt(sx(log.ticks[j].pose.x)) + "," + fmt(sy(log.ticks[j].pose.y, side)) + " ";
        if (j < log.ticks.size())  // connect to the switch point
            pts += fmt(sx(log.ticks[j].pose.x)) + "," + fmt(sy(log.ticks[j].pose.y, side));
        out << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\""
            << (mode == Mode::NN ? "#2c9f2c" : "#cc2c2c") << "\" stroke-width=\"2.5\"/>\n";
        i = j;
    }

    if (!log.ticks.empty()) {
        const Pose& s = log.ticks.front().pose;
        out << "<circle cx=\"" << fmt(sx(s.x)) << "\" cy=\"" << fmt(sy(s.y, side))
            << "\" r=\"5\" fill=\"#1f5fbf\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("render_episode_svg: write failed for " + path);
}

}  // namespace rvnav
