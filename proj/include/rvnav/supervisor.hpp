#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rvnav/controllers.hpp"
#include "rvnav/flowpipe.hpp"
#include "rvnav/network.hpp"
#include "rvnav/nn_reach.hpp"
#include "rvnav/unicycle.hpp"
#include "rvnav/world.hpp"

namespace rvnav {

struct VerifySettings {
    int tm_degree = 2;
    int bp_order = 2;
    bool symbolic_remainder = true;
    int substeps = 10;
    int picard_iters = 4;
    double delta = 0.2;  // control period, s
};

// Outcome of one reachability call. first_violation carries the step index
// and the obstacle index (-1 for the walls). engine_failure marks verdicts
// that are unsafe because the flowpipe could not be certified.
struct SafetyVerdict {
    bool safe = false;
    bool engine_failure = false;
    std::optional<std::pair<int, int>> first_violation;
    Flowpipe flowpipe;
    double runtime_seconds = 0.0;
};

inline Interval clamp_interval(const Interval& iv, double cap) {
    return Interval{clamp(iv.lo, -cap, cap), clamp(iv.hi, -cap, cap)};
}

// Reachability of the NN-controlled loop from the localized state over
// `steps` control periods: propagate the network over the state enclosure,
// collapse its output to capped control intervals, flow the dynamics for one
// period, and test every segment box against the inflated obstacles and the
// walls. Returns at the first violation.
inline SafetyVerdict verify_nn_safe(const LocalizationEstimate& estimate,
                                    const NetworkSpec& net,
                                    const std::vector<Obstacle>& obstacles,
                                    const WorldMap& world, int steps,
                                    const VerifySettings& vs) {
    if (steps < 1) throw std::invalid_argument("verify_nn_safe: steps < 1");
    const auto t0 = std::chrono::steady_clock::now();

    SafetyVerdict verdict;
    TaylorModelVector cur =
        tm_from_box({estimate.pose.x, estimate.pose.y, estimate.pose.theta},
                    {estimate.ux, estimate.uy, estimate.utheta}, vs.tm_degree);

    const double rr = world.robot_radius;
    const FlowStepSettings flow_settings{vs.tm_degree, vs.picard_iters, 20};

    try {
        for (int step = 0; step < steps && !verdict.first_violation; ++step) {
            const TaylorModelVector u =
                nn_tm_propagate(net, cur, vs.bp_order, vs.tm_degree, vs.symbolic_remainder);
            const Interval v = clamp_interval(tm_range(u[0]), kMaxLinearSpeed);
            const Interval w = clamp_interval(tm_range(u[1]), kMaxAngularSpeed);

            ControlPeriodFlow flow =
                flow_control_period(cur, v, w, vs.delta, vs.substeps, flow_settings);
            for (FlowSegment& seg : flow.segments) {
                seg.t_begin += vs.delta * double(step);
                seg.t_end += vs.delta * double(step);
                const bool hits_wall = seg.x_box.lo < rr || seg.x_box.hi > world.side - rr ||
                                       seg.y_box.lo < rr || seg.y_box.hi > world.side - rr;
                if (hits_wall && !verdict.first_violation)
                    verdict.first_violation = {step, -1};
                for (std::size_t oi = 0; oi < obstacles.size() && !verdict.first_violation;
                     ++oi)
                    if (box_intersects_circle(seg.x_box, seg.y_box, obstacles[oi].center,
                                              obstacles[oi].radius + rr))
                        verdict.first_violation = {step, int(oi)};
                verdict.flowpipe.segments.push_back(std::move(seg));
                if (verdict.first_violation) break;
            }
            cur = std::move(flow.end_state);
        }
        verdict.safe = !verdict.first_violation.has_value();
    } catch (const FlowpipeFailure&) {
        verdict.safe = false;
        verdict.engine_failure = true;
    }

    verdict.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return verdict;
}

enum class Mode { NN, Backup };

struct SupervisorState {
    Mode mode = Mode::NN;
    int backup_obstacle = -1;  // index into the detections when in Backup
};

namespace detail {

inline int nearest_obstacle_index(const Pose& pose, const std::vector<Obstacle>& obstacles) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const double d = (Vec2{pose.x, pose.y} - obstacles[i].center).norm();
        if (d < best_d) {
            best_d = d;
            best = int(i);
        }
    }
    return best;
}

// When the walls alone triggered the verdict there is no disc to circle;
// treat the nearest wall boundary point as a zero-radius obstacle so the
// backup controller slides along the wall instead of stalling.
inline Obstacle virtual_wall_obstacle(const Pose& pose, const WorldMap& world) {
    const double cx = clamp(pose.x, 0.0, world.side);
    const double cy = clamp(pose.y, 0.0, world.side);
    const double d_left = cx, d_right = world.side - cx;
    const double d_bottom = cy, d_top = world.side - cy;
    const double m = std::min({d_left, d_right, d_bottom, d_top});
    if (m == d_left) return Obstacle{{0.0, cy}, 0.0};
    if (m == d_right) return Obstacle{{world.side, cy}, 0.0};
    if (m == d_bottom) return Obstacle{{cx, 0.0}, 0.0};
    return Obstacle{{cx, world.side}, 0.0};
}

}  // namespace detail

// Mealy transition of the Simplex mode machine: the verdict decides which
// controller produces this tick's command. Backup targets the nearest
// detected obstacle and is re-aimed every tick.
inline std::pair<SupervisorState, ControlInput> supervisor_step(
    const SupervisorState& state, const SafetyVerdict& verdict,
    const LocalizationEstimate& estimate, const std::vector<Obstacle>& obstacles,
    const NetworkSpec& net, const AvoidanceConfig& cfg, const WorldMap& world) {
    if (verdict.safe) {
        const std::vector<double> out =
            nn_eval(net, {estimate.pose.x, estimate.pose.y, estimate.pose.theta});
        return {SupervisorState{Mode::NN, -1},
                clamp_control(ControlInput{out[0], out[1]})};
    }

    // aim at the violating entity: the flagged obstacle, the wall when the
    // walls triggered the verdict, else the nearest detection
    int target = -1;
    bool wall_target = false;
    if (verdict.first_violation) {
        const int oi = verdict.first_violation->second;
        if (oi >= 0 && oi < int(obstacles.size()))
            target = oi;
        else if (oi < 0)
            wall_target = true;
    }
    if (target < 0 && !wall_target)
        target = detail::nearest_obstacle_index(estimate.pose, obstacles);

    Obstacle obs = (target >= 0) ? obstacles[std::size_t(target)]
                                 : detail::virtual_wall_obstacle(estimate.pose, world);

    AvoidanceConfig effective = cfg;
    effective.standoff =
        std::max(cfg.standoff, obs.radius + world.robot_radius + 0.2);

    const double dist = (Vec2{estimate.pose.x, estimate.pose.y} - obs.center).norm();
    const ControlInput u = (dist < 1e-9)
                               ? ControlInput{0.0, 0.0}
                               : kb_control(estimate.pose, obs, effective);
    return {SupervisorState{Mode::Backup, target}, clamp_control(u)};
}

struct Scenario {
    WorldMap world;
    Pose start{0.5, 1.0, 0.0};
    double goal_y = 4.0;
    std::array<double, 3> noise_half_widths{0.01, 0.01, 0.01};
    std::uint64_t seed = 1;
    AvoidanceConfig avoidance;
};

enum class EpisodeStatus { Goal, Collision, Timeout };

struct TickRecord {
    double t = 0.0;
    Pose pose;
    Mode mode = Mode::NN;
    ControlInput control;
    bool safe = false;
    bool engine_failure = false;
    double verify_seconds = 0.0;
    bool deadline_miss = false;
    // per-segment reachable-set boxes (x_lo, x_hi, y_lo, y_hi), for rendering
    std::vector<std::array<double, 4>> boxes;
};

struct EpisodeLog {
    std::vector<TickRecord> ticks;
    EpisodeStatus status = EpisodeStatus::Timeout;
    double delta = 0.2;
    int backup_to_nn_transitions = 0;
    bool any_engine_failure = false;

    double total_time() const { return delta * double(ticks.size()); }
    double backup_time() const {
        std::size_t n = 0;
        for (const TickRecord& t : ticks) n += (t.mode == Mode::Backup);
        return delta * double(n);
    }
    double backup_utilization_pct() const {
        return ticks.empty() ? 0.0 : 100.0 * backup_time() / total_time();
    }
    double mean_verify_seconds() const {
        if (ticks.empty()) return 0.0;
        double acc = 0.0;
        for (const TickRecord& t : ticks) acc += t.verify_seconds;
        return acc / double(ticks.size());
    }
};

struct EpisodeOptions {
    int steps = 10;
    double deadline_s = 0.2;
    double timeout_s = 200.0;
    bool record_boxes = true;
};

// Fixed-step closed loop at the control period: sense, detect, localize,
// verify, switch, then integrate the true dynamics exactly. Verification is
// logically instantaneous; its wall-clock cost is measured and logged but
// does not alter the simulation.
inline EpisodeLog run_episode(const Scenario& scenario, const NetworkSpec& net,
                              const VerifySettings& vs, const EpisodeOptions& opts) {
    EpisodeLog log;
    log.delta = vs.delta;
    Rng rng(scenario.seed);
    Pose pose = scenario.start;
    SupervisorState sup;
    const int max_ticks = int(opts.timeout_s / vs.delta + 0.5);

    if (scenario.world.obstacle_clearance({pose.x, pose.y}) < scenario.world.robot_radius) {
        log.status = EpisodeStatus::Collision;
        return log;
    }

    for (int tick = 0; tick < max_ticks; ++tick) {
        if (pose.y >= scenario.goal_y) {
            log.status = EpisodeStatus::Goal;
            return log;
        }

        const LidarScan scan = raycast_scan(pose, scenario.world);
        const LocalizationEstimate est = localize(pose, scenario.noise_half_widths, rng);
        const std::vector<Obstacle> detected = detect_obstacles(scan, est, scenario.world);
        const SafetyVerdict verdict =
            verify_nn_safe(est, net, detected, scenario.world, opts.steps, vs);

        const Mode prev_mode = sup.mode;
        ControlInput u;
        std::tie(sup, u) = supervisor_step(sup, verdict, est, detected, net,
                                           scenario.avoidance, scenario.world);
        if (prev_mode == Mode::Backup && sup.mode == Mode::NN)
            ++log.backup_to_nn_transitions;
        log.any_engine_failure = log.any_engine_failure || verdict.engine_failure;

        TickRecord rec;
        rec.t = vs.delta * double(tick);
        rec.pose = pose;
        rec.mode = sup.mode;
        rec.control = u;
        rec.safe = verdict.safe;
        rec.engine_failure = verdict.engine_failure;
        rec.verify_seconds = verdict.runtime_seconds;
        rec.deadline_miss = verdict.runtime_seconds > opts.deadline_s;
        if (opts.record_boxes)
            for (const FlowSegment& seg : verdict.flowpipe.segments)
                rec.boxes.push_back({seg.x_box.lo, seg.x_box.hi, seg.y_box.lo, seg.y_box.hi});
        log.ticks.push_back(std::move(rec));

        // integrate the true dynamics, checking clearance inside the period;
        // driving the body into a wall ends the episode like any collision
        bool collided = false;
        const double rr = scenario.world.robot_radius;
        for (int k = 1; k <= 5; ++k) {
            const Pose p = closed_form_unicycle(pose, u, vs.delta * double(k) / 5.0);
            const bool wall_hit = p.x < rr || p.x > scenario.world.side - rr || p.y < rr ||
                                  p.y > scenario.world.side - rr;
            if (wall_hit ||
                scenario.world.obstacle_clearance({p.x, p.y}) < rr) {
                collided = true;
                break;
            }
        }
        pose = closed_form_unicycle(pose, u, vs.delta);
        pose.theta = wrap_to_pi(pose.theta);
        if (collided) {
            log.status = EpisodeStatus::Collision;
            return log;
        }
    }
    log.status = EpisodeStatus::Timeout;
    return log;
}

// Episode log file: one row per tick. The two wall-clock columns at the end
// are the only nondeterministic fields.
inline void save_episode_log(const EpisodeLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_episode_log: cannot open " + path);
    out << "t,x,y,theta,mode,v,omega,verdict,verify_runtime_s,deadline_miss\n";
    char buf[384];
    for (const TickRecord& r : log.ticks) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%s,%.6f,%d\n",
                      r.t, r.pose.x, r.pose.y, r.pose.theta,
                      r.mode == Mode::NN ? "NN" : "BACKUP", r.control.v, r.control.omega,
                      r.engine_failure ? "fail" : (r.safe ? "safe" : "unsafe"),
                      r.verify_seconds, r.deadline_miss ? 1 : 0);
        out << buf;
    }
    const char* status = log.status == EpisodeStatus::Goal
                             ? "goal"
                             : (log.status == EpisodeStatus::Collision ? "collision"
                                                                       : "timeout");
    out << "# status," << status << "\n";
    if (!out) throw std::runtime_error("save_episode_log: write failed for " + path);
}

inline void save_flowpipe_boxes(const EpisodeLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_flowpipe_boxes: cannot open " + path);
    out << "tick,mode,x_lo,x_hi,y_lo,y_hi\n";
    char buf[256];
    for (std::size_t i = 0; i < log.ticks.size(); ++i)
        for (const auto& b : log.ticks[i].boxes) {
            std::snprintf(buf, sizeof buf, "%zu,%s,%.8f,%.8f,%.8f,%.8f\n", i,
                          log.ticks[i].mode == Mode::NN ? "NN" : "BACKUP", b[0], b[1], b[2],
                          b[3]);
            out << buf;
        }
    if (!out) throw std::runtime_error("save_flowpipe_boxes: write failed for " + path);
}

}  // namespace rvnav
