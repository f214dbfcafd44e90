#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvnav/controllers.hpp"
#include "rvnav/network.hpp"
#include "rvnav/rng.hpp"
#include "rvnav/unicycle.hpp"

namespace rvnav {

struct Sample {
    int traj_id = 0;
    double t = 0.0;
    double x = 0.0, y = 0.0, theta = 0.0;
    double v = 0.0, omega = 0.0;
};

struct Demonstration {
    int id = 0;
    std::vector<Sample> samples;  // 20 Hz state-action pairs
};

struct TrainingConfig {
    int n_traj = 100;
    double rate_hz = 20.0;
    std::array<double, 3> start_jitter{0.05, 0.05, 0.05};
    // Fraction of trajectories started part-way along the reference path with
    // lateral/heading offsets. The recovery behavior the supervisor relies on
    // after an avoidance detour only exists in the data if the tube around
    // the whole path is covered, not just the nominal start.
    double path_start_fraction = 0.5;
    double path_lateral_jitter = 0.3;
    double path_heading_jitter = 0.5;
    double demo_timeout_s = 60.0;
    int epochs = 120;
    int batch = 64;
    // the loss surface is violent at init (raw map coordinates, He-scale
    // weights); rates much above this kill the trunk before it can learn
    double learning_rate = 0.003;
    double momentum = 0.9;
    int decay_every_epochs = 40;
    double decay_factor = 0.5;
    std::uint64_t seed = 7;
};

// Simulates the scripted expert from jittered starts until the goal zone.
// Trajectories that miss the timeout are discarded (and counted); generation
// is deterministic in the seed, with an independent stream per attempt.
struct DatasetReport {
    int discarded = 0;
};

inline std::vector<Demonstration> generate_dataset(const ReferencePath& path,
                                                   const Pose& start,
                                                   const TrainingConfig& cfg,
                                                   DatasetReport* report = nullptr) {
    if (cfg.n_traj < 1) throw std::invalid_argument("generate_dataset: n_traj < 1");
    const double dt = 1.0 / cfg.rate_hz;
    std::vector<Demonstration> demos;
    demos.reserve(std::size_t(cfg.n_traj));
    int discarded = 0;

    const int max_attempts = 2 * cfg.n_traj + 16;
    for (int attempt = 0; attempt < max_attempts && int(demos.size()) < cfg.n_traj;
         ++attempt) {
        Rng rng(cfg.seed + 1000003ULL * std::uint64_t(attempt));
        Pose pose;
        if (uniform01(rng) < cfg.path_start_fraction) {
            const double s = uniform(rng, 0.0, path.length() - 0.8);
            const Vec2 p = path.point_at(s);
            const double heading = path.heading_at(s);
            const Vec2 normal{-std::sin(heading), std::cos(heading)};
            const double lateral =
                uniform(rng, -cfg.path_lateral_jitter, cfg.path_lateral_jitter);
            pose = Pose{p.x + normal.x * lateral, p.y + normal.y * lateral,
                        wrap_to_pi(heading + uniform(rng, -cfg.path_heading_jitter,
                                                     cfg.path_heading_jitter))};
        } else {
            pose = Pose{start.x + uniform(rng, -cfg.start_jitter[0], cfg.start_jitter[0]),
                        start.y + uniform(rng, -cfg.start_jitter[1], cfg.start_jitter[1]),
                        start.theta + uniform(rng, -cfg.start_jitter[2], cfg.start_jitter[2])};
        }
        Demonstration demo;
        demo.id = int(demos.size());
        bool reached = false;
        for (double t = 0.0; t <= cfg.demo_timeout_s; t += dt) {
            if (pose.y >= path.goal_y) {
                reached = true;
                break;
            }
            const ControlInput u = expert_control(pose, path);
            if (std::fabs(u.v) > kMaxLinearSpeed + 1e-12 ||
                std::fabs(u.omega) > kMaxAngularSpeed + 1e-12)
                throw std::logic_error("generate_dataset: expert label exceeds caps");
            demo.samples.push_back(Sample{demo.id, t, pose.x, pose.y, pose.theta, u.v,
                                          u.omega});
            pose = closed_form_unicycle(pose, u, dt);
            pose.theta = wrap_to_pi(pose.theta);
        }
        if (reached && !demo.samples.empty())
            demos.push_back(std::move(demo));
        else
            ++discarded;
    }
    if (int(demos.size()) < cfg.n_traj)
        throw std::runtime_error("generate_dataset: expert failed to reach the goal often enough");
    if (report) report->discarded = discarded;
    return demos;
}

namespace detail {

inline NetworkSpec make_controller_net(Rng& rng) {
    auto make_layer = [&](int in, int out, Activation act) {
        NetworkLayer l;
        l.in = in;
        l.out = out;
        l.act = act;
        const double limit = std::sqrt(6.0 / double(in));
        l.weight.resize(std::size_t(in) * std::size_t(out));
        for (double& w : l.weight) w = uniform(rng, -limit, limit);
        l.bias.assign(std::size_t(out), 0.0);
        return l;
    };
    NetworkSpec net;
    net.layers.push_back(make_layer(3, 64, Activation::Relu));
    net.layers.push_back(make_layer(64, 64, Activation::Relu));
    net.layers.push_back(make_layer(64, 2, Activation::Identity));
    return net;
}

struct Gradients {
    std::vector<std::vector<double>> weight;  // parallel to net.layers
    std::vector<std::vector<double>> bias;

    explicit Gradients(const NetworkSpec& net) {
        for (const NetworkLayer& l : net.layers) {
            weight.emplace_back(l.weight.size(), 0.0);
            bias.emplace_back(l.bias.size(), 0.0);
        }
    }

    void zero() {
        for (auto& w : weight) std::fill(w.begin(), w.end(), 0.0);
        for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
    }
};

// Forward pass with cached activations, then backprop of the squared-error
// loss. Gradients accumulate (caller averages); returns the summed loss.
inline double backprop_sample(const NetworkSpec& net, const Sample& s, Gradients& g) {
    const std::size_t n_layers = net.layers.size();
    std::vector<std::vector<double>> activ(n_layers + 1);
    std::vector<std::vector<double>> preact(n_layers);
    activ[0] = {s.x, s.y, s.theta};
    for (std::size_t li = 0; li < n_layers; ++li) {
        const NetworkLayer& l = net.layers[li];
        preact[li].assign(std::size_t(l.out), 0.0);
        activ[li + 1].assign(std::size_t(l.out), 0.0);
        for (int i = 0; i < l.out; ++i) {
            double acc = l.bias[std::size_t(i)];
            for (int j = 0; j < l.in; ++j) acc += l.w(i, j) * activ[li][std::size_t(j)];
            preact[li][std::size_t(i)] = acc;
            activ[li + 1][std::size_t(i)] =
                (l.act == Activation::Relu && acc < 0.0) ? 0.0 : acc;
        }
    }

    const std::vector<double>& out = activ[n_layers];
    const double dv = out[0] - s.v;
    const double dw = out[1] - s.omega;
    const double loss = dv * dv + dw * dw;

    std::vector<double> delta{2.0 * dv, 2.0 * dw};
    for (std::size_t li = n_layers; li-- > 0;) {
        const NetworkLayer& l = net.layers[li];
        if (l.act == Activation::Relu)
            for (int i = 0; i < l.out; ++i)
                if (preact[li][std::size_t(i)] <= 0.0) delta[std::size_t(i)] = 0.0;
        for (int i = 0; i < l.out; ++i) {
            const double d = delta[std::size_t(i)];
            if (d == 0.0) continue;
            g.bias[li][std::size_t(i)] += d;
            for (int j = 0; j < l.in; ++j)
                g.weight[li][std::size_t(i * l.in + j)] += d * activ[li][std::size_t(j)];
        }
        if (li > 0) {
            std::vector<double> prev(std::size_t(l.in), 0.0);
            for (int i = 0; i < l.out; ++i) {
                const double d = delta[std::size_t(i)];
                if (d == 0.0) continue;
                for (int j = 0; j < l.in; ++j) prev[std::size_t(j)] += d * l.w(i, j);
            }
            delta = std::move(prev);
        }
    }
    return loss;
}

inline double mse_loss(const NetworkSpec& net, const std::vector<Sample>& samples) {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const Sample& s : samples) {
        const std::vector<double> out = nn_eval(net, {s.x, s.y, s.theta});
        const double dv = out[0] - s.v;
        const double dw = out[1] - s.omega;
        acc += dv * dv + dw * dw;
    }
    return acc / double(samples.size());
}

}  // namespace detail

struct TrainReport {
    std::vector<double> train_loss;    // per epoch
    std::vector<double> holdout_loss;  // per epoch
    std::vector<double> lr;            // per epoch
    int best_epoch = -1;
    double best_holdout = 0.0;
};

// Mini-batch gradient descent with momentum on the MSE loss; 90/10
// train/held-out split by trajectory; returns the weights that achieved the
// best held-out loss. Deterministic given the seed.
inline NetworkSpec train(const std::vector<Demonstration>& demos, const TrainingConfig& cfg,
                         TrainReport* report = nullptr) {
    if (demos.empty()) throw std::invalid_argument("train: empty dataset");
    for (const Demonstration& d : demos)
        for (const Sample& s : d.samples)
            if (std::fabs(s.v) > kMaxLinearSpeed + 1e-12 ||
                std::fabs(s.omega) > kMaxAngularSpeed + 1e-12)
                throw std::invalid_argument("train: label outside actuator caps");

    Rng rng(cfg.seed);

    // split by trajectory
    std::vector<std::size_t> order(demos.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[uniform_index(rng, i)]);
    const std::size_t n_hold = std::max<std::size_t>(demos.size() / 10, demos.size() > 1 ? 1 : 0);
    std::vector<Sample> train_set, holdout;
    for (std::size_t k = 0; k < order.size(); ++k) {
        auto& dst = (k < n_hold) ? holdout : train_set;
        const Demonstration& d = demos[order[k]];
        dst.insert(dst.end(), d.samples.begin(), d.samples.end());
    }
    if (train_set.empty()) throw std::invalid_argument("train: no training samples");

    NetworkSpec net = detail::make_controller_net(rng);
    NetworkSpec best = net;
    detail::Gradients grads(net);
    detail::Gradients vel(net);
    double best_holdout = std::numeric_limits<double>::infinity();
    int best_epoch = -1;

    std::vector<std::size_t> idx(train_set.size());
    std::iota(idx.begin(), idx.end(), 0);

    double lr = cfg.learning_rate;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (epoch > 0 && cfg.decay_every_epochs > 0 && epoch % cfg.decay_every_epochs == 0)
            lr *= cfg.decay_factor;
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[uniform_index(rng, i)]);

        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < idx.size(); begin += std::size_t(cfg.batch)) {
            const std::size_t end = std::min(begin + std::size_t(cfg.batch), idx.size());
            grads.zero();
            double batch_loss = 0.0;
            for (std::size_t k = begin; k < end; ++k)
                batch_loss += detail::backprop_sample(net, train_set[idx[k]], grads);
            const double inv = 1.0 / double(end - begin);
            epoch_loss += batch_loss;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: loss diverged (non-finite)");
            for (std::size_t li = 0; li < net.layers.size(); ++li) {
                NetworkLayer& l = net.layers[li];
                for (std::size_t w = 0; w < l.weight.size(); ++w) {
                    vel.weight[li][w] =
                        cfg.momentum * vel.weight[li][w] - lr * grads.weight[li][w] * inv;
                    l.weight[w] += vel.weight[li][w];
                }
                for (std::size_t b = 0; b < l.bias.size(); ++b) {
                    vel.bias[li][b] = cfg.momentum * vel.bias[li][b] - lr * grads.bias[li][b] * inv;
                    l.bias[b] += vel.bias[li][b];
                }
            }
        }
        epoch_loss /= double(train_set.size());

        const double hold = holdout.empty() ? epoch_loss : detail::mse_loss(net, holdout);
        if (!std::isfinite(hold)) throw std::runtime_error("train: loss diverged (non-finite)");
        if (hold < best_holdout) {
            best_holdout = hold;
            best = net;
            best_epoch = epoch;
        }
        if (report) {
            report->train_loss.push_back(epoch_loss);
            report->holdout_loss.push_back(hold);
            report->lr.push_back(lr);
        }
    }
    if (report) {
        report->best_epoch = best_epoch;
        report->best_holdout = best_holdout;
    }
    return best;
}

// Analytic-vs-central-finite-difference gradient comparison on a batch;
// returns the maximum relative error over the probed weights.
inline double gradient_check(const NetworkSpec& net, const std::vector<Sample>& batch,
                             int probes = 100, std::uint64_t seed = 99) {
    if (batch.empty()) throw std::invalid_argument("gradient_check: empty batch");
    detail::Gradients grads(net);
    for (const Sample& s : batch) detail::backprop_sample(net, s, grads);

    auto batch_loss = [&](const NetworkSpec& n) {
        double acc = 0.0;
        for (const Sample& s : batch) {
            const std::vector<double> out = nn_eval(n, {s.x, s.y, s.theta});
            const double dv = out[0] - s.v;
            const double dw = out[1] - s.omega;
            acc += dv * dv + dw * dw;
        }
        return acc;
    };

    Rng rng(seed);
    NetworkSpec probe = net;
    const double eps = 1e-5;
    double max_rel = 0.0;
    for (int k = 0; k < probes; ++k) {
        const std::size_t li = uniform_index(rng, probe.layers.size());
        NetworkLayer& l = probe.layers[li];
        const std::size_t wi = uniform_index(rng, l.weight.size());
        const double saved = l.weight[wi];
        l.weight[wi] = saved + eps;
        const double up = batch_loss(probe);
        l.weight[wi] = saved - eps;
        const double down = batch_loss(probe);
        l.weight[wi] = saved;
        const double fd = (up - down) / (2.0 * eps);
        const double an = grads.weight[li][wi];
        const double denom = std::max({std::fabs(fd), std::fabs(an), 1e-6});
        max_rel = std::max(max_rel, std::fabs(fd - an) / denom);
    }
    return max_rel;
}

// Dataset file: one sample per row, traj_id,t,x,y,theta,v,omega.
inline void save_dataset(const std::vector<Demonstration>& demos, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    out << "traj_id,t,x,y,theta,v,omega\n";
    char buf[256];
    for (const Demonstration& d : demos)
        for (const Sample& s : d.samples) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          s.traj_id, s.t, s.x, s.y, s.theta, s.v, s.omega);
            out << buf;
        }
    if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

inline std::vector<Demonstration> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_dataset: empty file " + path);
    std::vector<Demonstration> demos;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Sample s;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        if (!(row >> s.traj_id >> s.t >> s.x >> s.y >> s.theta >> s.v >> s.omega))
            throw std::runtime_error("load_dataset: malformed row in " + path);
        if (demos.empty() || demos.back().id != s.traj_id) {
            demos.push_back(Demonstration{s.traj_id, {}});
        }
        demos.back().samples.push_back(s);
    }
    return demos;
}

}  // namespace rvnav
