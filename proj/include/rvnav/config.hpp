#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvnav/controllers.hpp"
#include "rvnav/rng.hpp"
#include "rvnav/supervisor.hpp"
#include "rvnav/trainer.hpp"
#include "rvnav/world.hpp"

namespace rvnav {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Minimal sectioned key-value file: `[section]`, `key = values...`, `#`
// comments. Repeated keys are kept in order (used for obstacle lists).
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), path);
    }

    static ConfigFile parse_text(const std::string& text, const std::string& origin = "<text>") {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                cfg.entries_[section];
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            cfg.entries_[section].emplace_back(key, value);
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto it = entries_.find(section);
        if (it == entries_.end()) return false;
        for (const auto& kv : it->second)
            if (kv.first == key) return true;
        return false;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        auto it = entries_.find(section);
        if (it != entries_.end())
            for (const auto& kv : it->second)
                if (kv.first == key) return kv.second;
        return fallback;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return fallback;
        return parse_double(section, key, s);
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return fallback;
        try {
            return std::stoi(s);
        } catch (...) {
            throw ConfigError("config: [" + section + "] " + key + ": not an integer: " + s);
        }
    }

    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return fallback;
        try {
            return std::stoull(s);
        } catch (...) {
            throw ConfigError("config: [" + section + "] " + key + ": not an integer: " + s);
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return fallback;
        if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
        if (s == "0" || s == "false" || s == "off" || s == "no") return false;
        throw ConfigError("config: [" + section + "] " + key + ": not a boolean: " + s);
    }

    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
        const std::string s = get(section, key, "");
        if (s.empty()) return fallback;
        return parse_doubles(section, key, s);
    }

    std::vector<std::vector<double>> get_all_doubles(const std::string& section,
                                                     const std::string& key) const {
        std::vector<std::vector<double>> out;
        auto it = entries_.find(section);
        if (it == entries_.end()) return out;
        for (const auto& kv : it->second)
            if (kv.first == key) out.push_back(parse_doubles(section, key, kv.second));
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const char* ws = " \t\r\n";
        const std::size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return "";
        const std::size_t e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    }

    static double parse_double(const std::string& section, const std::string& key,
                               const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw ConfigError("config: [" + section + "] " + key + ": not a number: " + s);
        }
    }

    static std::vector<double> parse_doubles(const std::string& section, const std::string& key,
                                             const std::string& s) {
        std::istringstream in(s);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(parse_double(section, key, tok));
        return out;
    }

    std::map<std::string, std::vector<std::pair<std::string, std::string>>> entries_;
};

struct SweepConfig {
    std::vector<int> steps_list{10, 15, 20, 30};
    std::vector<int> tm_degrees{1, 2, 3};
    std::vector<int> bp_orders{1, 2, 3};
    int episodes_per_combo = 10;
};

struct ObstacleGenConfig {
    int count = 0;  // 0 => use the explicit obstacle list
    double radius_min = 0.15;
    double radius_max = 0.4;
    double lateral_max = 0.2;        // offset from the reference path, m
    double path_margin_start = 1.2;  // keep-out arc length near the start
    double path_margin_end = 1.8;    // keep-out arc length near the goal
    double wall_margin = 1.0;        // minimum center distance to any wall
    double pairwise_min = 1.5;       // minimum center-to-center spacing
};

// Obstacles of random size and location along the reference path corridor,
// spaced so the backup controller can orbit each one without being pushed
// into a neighbor or a wall. A greedy placement can paint itself into a
// corner, so whole sets are retried from scratch.
inline std::vector<Obstacle> generate_corridor_obstacles(const ReferencePath& path,
                                                         const ObstacleGenConfig& gen,
                                                         const Pose& start, double world_side,
                                                         std::uint64_t seed) {
    Rng rng(seed);
    const double s_lo = gen.path_margin_start;
    const double s_hi = path.length() - gen.path_margin_end;
    if (s_hi <= s_lo) throw ConfigError("obstacle generation: path margins leave no corridor");

    for (int restart = 0; restart < 200; ++restart) {
        std::vector<Obstacle> out;
        for (int tries = 0; int(out.size()) < gen.count && tries < 80; ++tries) {
            const double s = uniform(rng, s_lo, s_hi);
            const double lateral = uniform(rng, -gen.lateral_max, gen.lateral_max);
            const double radius = uniform(rng, gen.radius_min, gen.radius_max);
            const Vec2 p = path.point_at(s);
            const double heading = path.heading_at(s);
            const Vec2 normal{-std::sin(heading), std::cos(heading)};
            const Vec2 center = p + normal * lateral;

            if (center.x < gen.wall_margin || center.y < gen.wall_margin) continue;
            if (center.x > world_side - gen.wall_margin ||
                center.y > world_side - gen.wall_margin)
                continue;
            if ((center - Vec2{start.x, start.y}).norm() < 1.1 + radius) continue;
            bool spaced = true;
            for (const Obstacle& o : out)
                spaced = spaced && (center - o.center).norm() >= gen.pairwise_min;
            if (!spaced) continue;
            out.push_back(Obstacle{center, radius});
        }
        if (int(out.size()) == gen.count) return out;
    }
    throw ConfigError("obstacle generation: could not place the requested obstacles");
}

struct ExperimentConfig {
    Scenario scenario;
    ReferencePath path;
    TrainingConfig training;
    VerifySettings verify;
    EpisodeOptions episode;
    SweepConfig sweep;
    ObstacleGenConfig obstacle_gen;
    std::uint64_t obstacle_seed = 0;

    // Regenerates the random obstacles (if any) from the current seeds; call
    // after overriding seeds so scenario layouts follow them.
    void refresh_obstacles() {
        if (obstacle_gen.count > 0)
            scenario.world.obstacles = generate_corridor_obstacles(
                path, obstacle_gen, scenario.start, scenario.world.side, obstacle_seed);
    }
};


inline ExperimentConfig load_experiment_config(const ConfigFile& cfg) {
    ExperimentConfig ec;

    // [world]
    ec.scenario.world.side = cfg.get_double("world", "side", 5.0);
    ec.scenario.world.robot_radius = cfg.get_double("world", "robot_radius", 0.11);
    for (const auto& vals : cfg.get_all_doubles("world", "obstacle")) {
        if (vals.size() != 3)
            throw ConfigError("config: [world] obstacle expects 'x y radius'");
        ec.scenario.world.obstacles.push_back(Obstacle{{vals[0], vals[1]}, vals[2]});
    }

    // [path]
    ec.path.start_x = cfg.get_double("path", "start_x", 0.5);
    ec.path.start_y = cfg.get_double("path", "start_y", 1.0);
    ec.path.corner_x = cfg.get_double("path", "corner_x", 3.0);
    ec.path.arc_radius = cfg.get_double("path", "arc_radius", 1.0);
    ec.path.end_y = cfg.get_double("path", "end_y", 4.5);
    ec.path.goal_y = cfg.get_double("path", "goal_y", 4.0);

    // [scenario]
    const std::vector<double> start =
        cfg.get_doubles("scenario", "start", {ec.path.start_x, ec.path.start_y, 0.0});
    if (start.size() != 3) throw ConfigError("config: [scenario] start expects 'x y theta'");
    ec.scenario.start = Pose{start[0], start[1], start[2]};
    ec.scenario.goal_y = cfg.get_double("scenario", "goal_y", ec.path.goal_y);
    const std::vector<double> noise =
        cfg.get_doubles("scenario", "noise", {0.01, 0.01, 0.01});
    if (noise.size() != 3) throw ConfigError("config: [scenario] noise expects three values");
    ec.scenario.noise_half_widths = {noise[0], noise[1], noise[2]};
    ec.scenario.seed = cfg.get_u64("scenario", "seed", 1);

    // [avoidance]
    ec.scenario.avoidance.standoff = cfg.get_double("avoidance", "standoff", 0.9);
    const std::string tang = cfg.get("avoidance", "tangential", "center");
    if (tang == "center")
        ec.scenario.avoidance.tangential_source = TangentialSource::CenterVector;
    else if (tang == "standoff")
        ec.scenario.avoidance.tangential_source = TangentialSource::StandoffVector;
    else
        throw ConfigError("config: [avoidance] tangential must be 'center' or 'standoff'");

    // [obstacles] random generation
    ec.obstacle_gen.count = cfg.get_int("obstacles", "random_count", 0);
    ec.obstacle_gen.radius_min = cfg.get_double("obstacles", "radius_min", 0.15);
    ec.obstacle_gen.radius_max = cfg.get_double("obstacles", "radius_max", 0.4);
    ec.obstacle_gen.lateral_max = cfg.get_double("obstacles", "lateral_max", 0.2);
    ec.obstacle_gen.wall_margin = cfg.get_double("obstacles", "wall_margin", 1.0);
    ec.obstacle_gen.pairwise_min = cfg.get_double("obstacles", "pairwise_min", 1.5);
    ec.obstacle_seed = cfg.get_u64("obstacles", "seed", ec.scenario.seed);
    ec.refresh_obstacles();

    // [training]
    ec.training.n_traj = cfg.get_int("training", "trajectories", 100);
    ec.training.rate_hz = cfg.get_double("training", "rate_hz", 20.0);
    ec.training.epochs = cfg.get_int("training", "epochs", 120);
    ec.training.batch = cfg.get_int("training", "batch", 64);
    ec.training.learning_rate = cfg.get_double("training", "learning_rate", 0.003);
    ec.training.momentum = cfg.get_double("training", "momentum", 0.9);
    ec.training.decay_every_epochs = cfg.get_int("training", "decay_every", 40);
    ec.training.decay_factor = cfg.get_double("training", "decay_factor", 0.5);
    ec.training.seed = cfg.get_u64("training", "seed", 7);
    const std::vector<double> jitter =
        cfg.get_doubles("training", "jitter", {0.05, 0.05, 0.05});
    if (jitter.size() != 3) throw ConfigError("config: [training] jitter expects three values");
    ec.training.start_jitter = {jitter[0], jitter[1], jitter[2]};
    ec.training.path_start_fraction =
        cfg.get_double("training", "path_start_fraction", 0.5);
    ec.training.path_lateral_jitter =
        cfg.get_double("training", "path_lateral_jitter", 0.3);
    ec.training.path_heading_jitter =
        cfg.get_double("training", "path_heading_jitter", 0.5);

    // [verification]
    ec.episode.steps = cfg.get_int("verification", "steps", 10);
    ec.verify.tm_degree = cfg.get_int("verification", "tm_degree", 2);
    ec.verify.bp_order = cfg.get_int("verification", "bp_order", 2);
    ec.verify.symbolic_remainder = cfg.get_bool("verification", "symbolic_remainder", true);
    ec.verify.substeps = cfg.get_int("verification", "substeps", 10);
    ec.verify.picard_iters = cfg.get_int("verification", "picard_iters", 4);
    ec.verify.delta = cfg.get_double("verification", "delta", 0.2);
    ec.episode.deadline_s = cfg.get_double("verification", "deadline", 0.2);
    ec.episode.timeout_s = cfg.get_double("verification", "episode_timeout", 200.0);

    // [sweep]
    auto to_ints = [](const std::vector<double>& v) {
        std::vector<int> out;
        for (double d : v) out.push_back(int(d + 0.5));
        return out;
    };
    ec.sweep.steps_list =
        to_ints(cfg.get_doubles("sweep", "steps_list", {10, 15, 20, 30}));
    ec.sweep.tm_degrees = to_ints(cfg.get_doubles("sweep", "tm_degrees", {1, 2, 3}));
    ec.sweep.bp_orders = to_ints(cfg.get_doubles("sweep", "bp_orders", {1, 2, 3}));
    ec.sweep.episodes_per_combo = cfg.get_int("sweep", "episodes_per_combo", 10);

    if (ec.verify.tm_degree < 1 || ec.verify.bp_order < 1 || ec.episode.steps < 1 ||
        ec.verify.substeps < 1)
        throw ConfigError("config: verification settings must be positive");
    return ec;
}

inline ExperimentConfig load_experiment_config_file(const std::string& path) {
    return load_experiment_config(ConfigFile::parse_file(path));
}

}  // namespace rvnav
