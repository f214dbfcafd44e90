#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvnav {

enum class Activation { Relu, Identity };

struct NetworkLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weight;  // row-major, out x in
    std::vector<double> bias;    // out
    Activation act = Activation::Identity;

    double w(int row, int col) const { return weight[std::size_t(row * in + col)]; }
};

// Feed-forward network description, both exactly evaluable and propagatable
// as Taylor models. The trained controller is 3 -> 64 -> 64 -> 2 with ReLU
// hidden layers and an identity output layer.
struct NetworkSpec {
    std::vector<NetworkLayer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }

    void validate() const {
        if (layers.empty()) throw std::invalid_argument("NetworkSpec: no layers");
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const NetworkLayer& l = layers[i];
            if (l.in <= 0 || l.out <= 0 ||
                l.weight.size() != std::size_t(l.in) * std::size_t(l.out) ||
                l.bias.size() != std::size_t(l.out))
                throw std::invalid_argument("NetworkSpec: bad layer shape");
            if (i + 1 < layers.size() && layers[i + 1].in != l.out)
                throw std::invalid_argument("NetworkSpec: layer dimensions do not chain");
        }
        if (layers.back().act != Activation::Identity)
            throw std::invalid_argument("NetworkSpec: final activation must be identity");
    }
};

// Exact forward pass: affine then activation per layer.
inline std::vector<double> nn_eval(const NetworkSpec& net, const std::vector<double>& input) {
    if (int(input.size()) != net.input_dim())
        throw std::invalid_argument("nn_eval: input dimension mismatch");
    std::vector<double> cur = input;
    for (const NetworkLayer& l : net.layers) {
        std::vector<double> next(std::size_t(l.out));
        for (int i = 0; i < l.out; ++i) {
            double acc = l.bias[std::size_t(i)];
            for (int j = 0; j < l.in; ++j) acc += l.w(i, j) * cur[std::size_t(j)];
            if (l.act == Activation::Relu && acc < 0.0) acc = 0.0;
            next[std::size_t(i)] = acc;
        }
        cur = std::move(next);
    }
    return cur;
}

namespace detail {

inline std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return std::string(buf);
}

}  // namespace detail

// Weight file: plain text, one layer block per layer, hexadecimal float
// serialization so that reloading reproduces evaluation bit for bit.
inline void save_network(const NetworkSpec& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_network: cannot open " + path);
    out << "rvnav-network 1\n";
    out << "layers " << net.layers.size() << "\n";
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const NetworkLayer& l = net.layers[li];
        out << "layer " << li << "\n";
        out << "in " << l.in << "\n";
        out << "out " << l.out << "\n";
        out << "activation " << (l.act == Activation::Relu ? "relu" : "identity") << "\n";
        out << "weights";
        for (double v : l.weight) out << ' ' << detail::hex_double(v);
        out << "\nbias";
        for (double v : l.bias) out << ' ' << detail::hex_double(v);
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_network: write failed for " + path);
}

inline NetworkSpec load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_network: cannot open " + path);
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "rvnav-network" || version != 1)
        throw std::runtime_error("load_network: unrecognized header in " + path);
    std::string key;
    std::size_t n_layers = 0;
    in >> key >> n_layers;
    if (key != "layers") throw std::runtime_error("load_network: missing layer count");

    NetworkSpec net;
    net.layers.resize(n_layers);
    for (std::size_t li = 0; li < n_layers; ++li) {
        NetworkLayer& l = net.layers[li];
        std::size_t idx = 0;
        std::string act;
        in >> key >> idx;
        if (key != "layer" || idx != li) throw std::runtime_error("load_network: bad layer block");
        in >> key >> l.in;
        if (key != "in") throw std::runtime_error("load_network: missing 'in'");
        in >> key >> l.out;
        if (key != "out") throw std::runtime_error("load_network: missing 'out'");
        in >> key >> act;
        if (key != "activation") throw std::runtime_error("load_network: missing activation");
        if (act == "relu")
            l.act = Activation::Relu;
        else if (act == "identity")
            l.act = Activation::Identity;
        else
            throw std::runtime_error("load_network: unsupported activation '" + act + "'");
        in >> key;
        if (key != "weights") throw std::runtime_error("load_network: missing weights");
        l.weight.resize(std::size_t(l.in) * std::size_t(l.out));
        std::string tok;
        for (double& v : l.weight) {
            in >> tok;
            v = std::strtod(tok.c_str(), nullptr);
        }
        in >> key;
        if (key != "bias") throw std::runtime_error("load_network: missing bias");
        l.bias.resize(std::size_t(l.out));
        for (double& v : l.bias) {
            in >> tok;
            v = std::strtod(tok.c_str(), nullptr);
        }
    }
    if (!in) throw std::runtime_error("load_network: truncated file " + path);
    net.validate();
    return net;
}

}  // namespace rvnav
