#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "rvnav/network.hpp"
#include "rvnav/rng.hpp"

using namespace rvnav;

namespace {

NetworkSpec identity_net(int dim) {
    NetworkLayer l;
    l.in = l.out = dim;
    l.weight.assign(std::size_t(dim) * std::size_t(dim), 0.0);
    for (int i = 0; i < dim; ++i) l.weight[std::size_t(i * dim + i)] = 1.0;
    l.bias.assign(std::size_t(dim), 0.0);
    l.act = Activation::Identity;
    NetworkSpec net;
    net.layers.push_back(l);
    return net;
}

NetworkSpec random_net(Rng& rng, std::vector<int> dims) {
    NetworkSpec net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        NetworkLayer l;
        l.in = dims[i];
        l.out = dims[i + 1];
        l.act = (i + 2 == dims.size()) ? Activation::Identity : Activation::Relu;
        l.weight.resize(std::size_t(l.in) * std::size_t(l.out));
        l.bias.resize(std::size_t(l.out));
        for (double& w : l.weight) w = uniform(rng, -1.0, 1.0);
        for (double& b : l.bias) b = uniform(rng, -0.5, 0.5);
        net.layers.push_back(std::move(l));
    }
    return net;
}

}  // namespace

TEST_CASE("all-zero network maps everything to zero") {
    NetworkSpec net;
    NetworkLayer l;
    l.in = 3;
    l.out = 2;
    l.weight.assign(6, 0.0);
    l.bias.assign(2, 0.0);
    l.act = Activation::Identity;
    net.layers.push_back(l);
    const auto out = nn_eval(net, {4.2, -1.0, 0.5});
    REQUIRE(out[0] == 0.0);
    REQUIRE(out[1] == 0.0);
}

TEST_CASE("relu clamps negatives in the hidden pass") {
    NetworkSpec net = identity_net(3);
    net.layers[0].act = Activation::Relu;
    NetworkLayer out_layer = identity_net(3).layers[0];
    net.layers.push_back(out_layer);
    const auto out = nn_eval(net, {-1.0, 2.0, 0.0});
    REQUIRE(out[0] == 0.0);
    REQUIRE(out[1] == 2.0);
    REQUIRE(out[2] == 0.0);
}

TEST_CASE("dimension mismatch is rejected") {
    const NetworkSpec net = identity_net(3);
    REQUIRE_THROWS_AS(nn_eval(net, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("weight files round-trip bit for bit") {
    Rng rng(321);
    const NetworkSpec net = random_net(rng, {3, 8, 5, 2});
    const std::string path = "test_net_roundtrip.txt";
    save_network(net, path);
    const NetworkSpec back = load_network(path);

    REQUIRE(back.layers.size() == net.layers.size());
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        for (std::size_t i = 0; i < net.layers[li].weight.size(); ++i)
            REQUIRE(back.layers[li].weight[i] == net.layers[li].weight[i]);
        for (std::size_t i = 0; i < net.layers[li].bias.size(); ++i)
            REQUIRE(back.layers[li].bias[i] == net.layers[li].bias[i]);
    }

    Rng prng(50);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> in{uniform(prng, -5, 5), uniform(prng, -5, 5),
                                     uniform(prng, -5, 5)};
        const auto a = nn_eval(net, in);
        const auto b = nn_eval(back, in);
        REQUIRE(a[0] == b[0]);
        REQUIRE(a[1] == b[1]);
    }
    std::remove(path.c_str());
}

TEST_CASE("loader rejects unsupported activations and bad shapes") {
    const std::string path = "test_net_bad.txt";
    {
        std::ofstream out(path);
        out << "rvnav-network 1\nlayers 1\nlayer 0\nin 1\nout 1\nactivation tanh\n"
               "weights 0x1p+0\nbias 0x0p+0\n";
    }
    REQUIRE_THROWS(load_network(path));
    std::remove(path.c_str());

    NetworkSpec bad;
    NetworkLayer l;
    l.in = 2;
    l.out = 1;
    l.weight.assign(2, 1.0);
    l.bias.assign(1, 0.0);
    l.act = Activation::Relu;  // final layer must be identity
    bad.layers.push_back(l);
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}
