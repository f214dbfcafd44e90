// rvnav — runtime-verified navigation experiments.
//
// Subcommands: train, run, sweep-steps, sweep-orders, render.
// Exit codes: 0 success, 2 collision, 3 verification failure or timeout,
// 4 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rvnav/config.hpp"
#include "rvnav/network.hpp"
#include "rvnav/supervisor.hpp"
#include "rvnav/svg.hpp"
#include "rvnav/trainer.hpp"

namespace fs = std::filesystem;
using namespace rvnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCollision = 2;
constexpr int kExitVerification = 3;
constexpr int kExitConfig = 4;

ExperimentConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return load_experiment_config(ConfigFile::parse_text(""));
    return load_experiment_config_file(path);
}

void apply_overrides(ExperimentConfig& ec, std::uint64_t seed, bool seed_set, int steps,
                     int tm_degree, int bp_order, double deadline) {
    if (seed_set) {
        ec.scenario.seed = seed;
        ec.training.seed = seed;
        ec.obstacle_seed = seed;
        ec.refresh_obstacles();
    }
    if (steps > 0) ec.episode.steps = steps;
    if (tm_degree > 0) ec.verify.tm_degree = tm_degree;
    if (bp_order > 0) ec.verify.bp_order = bp_order;
    if (deadline > 0) ec.episode.deadline_s = deadline;
}

int cmd_train(const ExperimentConfig& ec, const std::string& out_dir) {
    fs::create_directories(out_dir);
    DatasetReport ds_report;
    const auto demos =
        generate_dataset(ec.path, ec.scenario.start, ec.training, &ds_report);
    save_dataset(demos, (fs::path(out_dir) / "dataset.csv").string());
    if (ds_report.discarded > 0)
        std::cerr << "note: discarded " << ds_report.discarded
                  << " expert trajectories that missed the timeout\n";

    TrainReport report;
    const NetworkSpec net = train(demos, ec.training, &report);
    save_network(net, (fs::path(out_dir) / "weights.txt").string());

    std::ofstream curve((fs::path(out_dir) / "training_report.csv").string());
    curve << "epoch,learning_rate,train_loss,holdout_loss\n";
    char buf[160];
    for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e, report.lr[e],
                      report.train_loss[e], report.holdout_loss[e]);
        curve << buf;
    }
    std::printf("trained %zu trajectories, best holdout MSE %.6g (epoch %d)\n", demos.size(),
                report.best_holdout, report.best_epoch);
    return kExitOk;
}

int episode_exit_code(const EpisodeLog& log) {
    if (log.status == EpisodeStatus::Collision) return kExitCollision;
    if (log.status == EpisodeStatus::Timeout || log.any_engine_failure)
        return kExitVerification;
    return kExitOk;
}

int cmd_run(const ExperimentConfig& ec, const std::string& weights,
            const std::string& out_dir) {
    fs::create_directories(out_dir);
    const NetworkSpec net = load_network(weights);
    const EpisodeLog log = run_episode(ec.scenario, net, ec.verify, ec.episode);
    save_episode_log(log, (fs::path(out_dir) / "episode.csv").string());
    save_flowpipe_boxes(log, (fs::path(out_dir) / "flowpipe_boxes.csv").string());
    render_episode_svg(ec.scenario.world, log, ec.scenario.goal_y,
                       (fs::path(out_dir) / "episode.svg").string());

    const char* status = log.status == EpisodeStatus::Goal
                             ? "goal"
                             : (log.status == EpisodeStatus::Collision ? "collision"
                                                                       : "timeout");
    std::printf("status=%s ticks=%zu total=%.1fs backup=%.1fs (%.1f%%) mean_verify=%.4fs "
                "cycles=%d\n",
                status, log.ticks.size(), log.total_time(), log.backup_time(),
                log.backup_utilization_pct(), log.mean_verify_seconds(),
                log.backup_to_nn_transitions);
    return episode_exit_code(log);
}

int cmd_sweep_steps(const ExperimentConfig& ec, const std::string& weights,
                    const std::vector<int>& steps_list, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const NetworkSpec net = load_network(weights);

    std::vector<EpisodeLog> logs;
    for (int steps : steps_list) {
        EpisodeOptions opts = ec.episode;
        opts.steps = steps;
        opts.record_boxes = false;
        logs.push_back(run_episode(ec.scenario, net, ec.verify, opts));
    }

    const fs::path table_path = fs::path(out_dir) / "sweep_steps.csv";
    std::ofstream table(table_path);
    table << "metric";
    for (int steps : steps_list) table << "," << steps;
    table << "\n";
    auto row = [&](const std::string& name, auto getter) {
        table << name;
        char buf[64];
        for (const EpisodeLog& log : logs) {
            std::snprintf(buf, sizeof buf, ",%.6g", getter(log));
            table << buf;
        }
        table << "\n";
    };
    row("verification_runtime_s", [](const EpisodeLog& l) { return l.mean_verify_seconds(); });
    row("task_total_time_s", [](const EpisodeLog& l) { return l.total_time(); });
    row("backup_time_s", [](const EpisodeLog& l) { return l.backup_time(); });
    row("backup_utilization_pct",
        [](const EpisodeLog& l) { return l.backup_utilization_pct(); });

    std::printf("wrote %s\n", table_path.string().c_str());
    for (const EpisodeLog& log : logs)
        if (log.status == EpisodeStatus::Collision) return kExitCollision;
    return kExitOk;
}

int cmd_sweep_orders(const ExperimentConfig& ec, const std::string& weights,
                     const std::vector<int>& tm_degrees, const std::vector<int>& bp_orders,
                     int episodes, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const NetworkSpec net = load_network(weights);

    const fs::path table_path = fs::path(out_dir) / "sweep_orders.csv";
    std::ofstream table(table_path);
    table << "tm_degree,bp_order,mean_verification_runtime_s,valid\n";
    for (int tm : tm_degrees)
        for (int bp : bp_orders) {
            VerifySettings vs = ec.verify;
            vs.tm_degree = tm;
            vs.bp_order = bp;
            EpisodeOptions opts = ec.episode;
            opts.steps = 10;
            opts.record_boxes = false;
            double acc = 0.0;
            std::size_t ticks = 0;
            for (int e = 0; e < episodes; ++e) {
                Scenario sc = ec.scenario;
                sc.seed = ec.scenario.seed + std::uint64_t(e);
                const EpisodeLog log = run_episode(sc, net, vs, opts);
                for (const TickRecord& t : log.ticks) acc += t.verify_seconds;
                ticks += log.ticks.size();
            }
            const double mean = ticks == 0 ? 0.0 : acc / double(ticks);
            char buf[96];
            std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%d\n", tm, bp, mean,
                          mean < ec.episode.deadline_s ? 1 : 0);
            table << buf;
        }
    std::printf("wrote %s\n", table_path.string().c_str());
    return kExitOk;
}

int cmd_render(const ExperimentConfig& ec, const std::string& log_path,
               const std::string& boxes_path, const std::string& out_path) {
    std::ifstream in(log_path);
    if (!in) throw std::runtime_error("render: cannot open " + log_path);
    std::string line;
    std::getline(in, line);  // header
    EpisodeLog log;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        TickRecord t;
        std::string mode, verdict;
        int miss = 0;
        if (!(row >> t.t >> t.pose.x >> t.pose.y >> t.pose.theta >> mode >> t.control.v >>
              t.control.omega >> verdict >> t.verify_seconds >> miss))
            throw std::runtime_error("render: malformed row in " + log_path);
        t.mode = (mode == "NN") ? Mode::NN : Mode::Backup;
        t.safe = verdict == "safe";
        log.ticks.push_back(t);
    }
    if (!boxes_path.empty()) {
        std::ifstream boxes(boxes_path);
        if (!boxes) throw std::runtime_error("render: cannot open " + boxes_path);
        std::getline(boxes, line);
        while (std::getline(boxes, line)) {
            if (line.empty()) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            std::size_t tick = 0;
            std::string mode;
            std::array<double, 4> b{};
            if (!(row >> tick >> mode >> b[0] >> b[1] >> b[2] >> b[3]))
                throw std::runtime_error("render: malformed row in " + boxes_path);
            if (tick < log.ticks.size()) log.ticks[tick].boxes.push_back(b);
        }
    }
    render_episode_svg(ec.scenario.world, log, ec.scenario.goal_y, out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Runtime-verified navigation for a differential-drive robot"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, weights_path, out_dir = "out", log_path, boxes_path,
                svg_path = "episode.svg";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int steps = 0, tm_degree = 0, bp_order = 0;
    double deadline = 0.0;
    std::vector<int> steps_list{10, 15, 20, 30};
    std::vector<int> tm_degrees{1, 2, 3};
    std::vector<int> bp_orders{1, 2, 3};
    int episodes = 10;

    app.add_option("--config", config_path, "Experiment configuration file");
    app.add_option("--out-dir", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Override the scenario/training seed");
    app.add_option("--steps", steps, "Verification steps per call");
    app.add_option("--tm-degree", tm_degree, "Taylor-model degree");
    app.add_option("--bp-order", bp_order, "Bernstein-polynomial order");
    app.add_option("--deadline", deadline, "Verification deadline in seconds");

    auto* train_cmd = app.add_subcommand("train", "Generate demonstrations and train the controller");
    auto* run_cmd = app.add_subcommand("run", "Run one verified navigation episode");
    run_cmd->add_option("--weights", weights_path, "Controller weight file")->required();
    auto* sweep_steps_cmd =
        app.add_subcommand("sweep-steps", "Episode metrics across verification step counts");
    sweep_steps_cmd->add_option("--weights", weights_path)->required();
    sweep_steps_cmd->add_option("--steps-list", steps_list, "Step counts to sweep");
    auto* sweep_orders_cmd = app.add_subcommand(
        "sweep-orders", "Verification runtime across TM degrees and BP orders");
    sweep_orders_cmd->add_option("--weights", weights_path)->required();
    sweep_orders_cmd->add_option("--tm-degrees", tm_degrees);
    sweep_orders_cmd->add_option("--bp-orders", bp_orders);
    sweep_orders_cmd->add_option("--episodes", episodes, "Episodes per combination");
    auto* render_cmd = app.add_subcommand("render", "Render an episode log to SVG");
    render_cmd->add_option("--log", log_path, "Episode log CSV")->required();
    render_cmd->add_option("--boxes", boxes_path, "Flowpipe boxes CSV");
    render_cmd->add_option("--out", svg_path, "Output SVG path");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        ExperimentConfig ec = load_config_or_default(config_path);
        apply_overrides(ec, seed, seed_set, steps, tm_degree, bp_order, deadline);

        if (train_cmd->parsed()) return cmd_train(ec, out_dir);
        if (run_cmd->parsed()) return cmd_run(ec, weights_path, out_dir);
        if (sweep_steps_cmd->parsed())
            return cmd_sweep_steps(ec, weights_path, steps_list, out_dir);
        if (sweep_orders_cmd->parsed())
            return cmd_sweep_orders(ec, weights_path, tm_degrees, bp_orders, episodes,
                                    out_dir);
        if (render_cmd->parsed()) return cmd_render(ec, log_path, boxes_path, svg_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    }
    return kExitOk;
}
