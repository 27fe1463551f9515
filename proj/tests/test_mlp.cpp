#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fso/mlp.hpp"

using namespace fso;

namespace {
// Forward pass re-implemented from the definition, for the re-evaluation
// oracle below.
std::vector<double> reference_forward(const Mlp& net, const std::vector<double>& in) {
    std::vector<double> x = in;
    const MlpSpec& spec = net.spec();
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        int nin = spec.sizes[l], nout = spec.sizes[l + 1];
        std::vector<double> y(nout, 0.0);
        for (int o = 0; o < nout; ++o) {
            y[o] = net.biases()[l][o];
            for (int i = 0; i < nin; ++i)
                y[o] += net.weights()[l][static_cast<std::size_t>(o) * nin + i] * x[i];
        }
        if (l + 1 < spec.layer_count())
            for (double& v : y) v = std::max(0.0, v);
        x = std::move(y);
    }
    return x;
}

double upstream_dot_output(const Mlp& net, const std::vector<double>& in,
                           const std::vector<double>& up) {
    std::vector<double> out = net.forward(in);
    double v = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) v += up[i] * out[i];
    return v;
}
} // namespace

TEST_CASE("forward: all-zero parameters give the zero vector", "[mlp]") {
    Rng rng(1);
    Mlp net(MlpSpec{{3, 4, 2}}, rng);
    for (auto& layer : net.weights()) std::fill(layer.begin(), layer.end(), 0.0);
    std::vector<double> out = net.forward(std::vector<double>{1.0, -2.0, 3.0});
    REQUIRE(out == std::vector<double>{0.0, 0.0});
}

TEST_CASE("forward: identity single linear layer passes the input through", "[mlp]") {
    Rng rng(2);
    Mlp net(MlpSpec{{3, 3}}, rng);
    auto& w = net.weights()[0];
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i) * 3 + i] = 1.0;
    std::vector<double> in = {0.4, -1.5, 2.25};
    REQUIRE(net.forward(in) == in);
}

TEST_CASE("forward: matches the independent matrix re-evaluation", "[mlp]") {
    Rng rng(3);
    Mlp net(MlpSpec{{5, 7, 4, 3}}, rng);
    for (auto& b : net.biases())
        for (double& v : b) v = rng.uniform(-0.5, 0.5);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> in(5);
        for (double& v : in) v = rng.uniform(-2.0, 2.0);
        std::vector<double> got = net.forward(in);
        std::vector<double> want = reference_forward(net, in);
        for (std::size_t i = 0; i < got.size(); ++i)
            REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-12));
    }
}

TEST_CASE("backward: zero upstream gradient gives zero parameter gradient", "[mlp]") {
    Rng rng(4);
    Mlp net(MlpSpec{{3, 5, 2}}, rng);
    MlpCache cache;
    net.forward(std::vector<double>{0.3, -0.7, 1.1}, &cache);
    MlpGrad g = net.make_grad();
    net.backward(cache, std::vector<double>{0.0, 0.0}, g);
    for (const auto& layer : g.dw)
        for (double v : layer) REQUIRE(v == 0.0);
    for (const auto& layer : g.db)
        for (double v : layer) REQUIRE(v == 0.0);
}

TEST_CASE("backward: linear net gradient is the upstream/input outer product", "[mlp]") {
    Rng rng(5);
    Mlp net(MlpSpec{{3, 2}}, rng);
    std::vector<double> in = {0.5, -1.0, 2.0};
    std::vector<double> up = {1.5, -0.25};
    MlpCache cache;
    net.forward(in, &cache);
    MlpGrad g = net.make_grad();
    net.backward(cache, up, g);
    for (int o = 0; o < 2; ++o) {
        REQUIRE(g.db[0][o] == Catch::Approx(up[o]));
        for (int i = 0; i < 3; ++i)
            REQUIRE(g.dw[0][static_cast<std::size_t>(o) * 3 + i] ==
                    Catch::Approx(up[o] * in[i]));
    }
}

TEST_CASE("backward: central finite differences on a 4-8-3 net", "[mlp]") {
    Rng rng(6);
    Mlp net(MlpSpec{{4, 8, 3}}, rng);
    for (auto& b : net.biases())
        for (double& v : b) v = rng.uniform(0.05, 0.4); // keep units off the ReLU kink
    std::vector<double> in = {0.8, -0.6, 1.2, 0.35};
    std::vector<double> up = {0.7, -1.3, 0.4};
    MlpCache cache;
    net.forward(in, &cache);
    MlpGrad g = net.make_grad();
    net.backward(cache, up, g);
    const double eps = 1e-6;
    int checked = 0;
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        for (std::size_t i = 0; i < net.weights()[l].size(); i += 7) {
            double saved = net.weights()[l][i];
            net.weights()[l][i] = saved + eps;
            double fp = upstream_dot_output(net, in, up);
            net.weights()[l][i] = saved - eps;
            double fm = upstream_dot_output(net, in, up);
            net.weights()[l][i] = saved;
            double num = (fp - fm) / (2.0 * eps);
            double ana = g.dw[l][i];
            REQUIRE(std::abs(num - ana) <= 1e-5 * std::max(1.0, std::abs(num)));
            ++checked;
        }
        for (std::size_t i = 0; i < net.biases()[l].size(); ++i) {
            double saved = net.biases()[l][i];
            net.biases()[l][i] = saved + eps;
            double fp = upstream_dot_output(net, in, up);
            net.biases()[l][i] = saved - eps;
            double fm = upstream_dot_output(net, in, up);
            net.biases()[l][i] = saved;
            double num = (fp - fm) / (2.0 * eps);
            REQUIRE(std::abs(num - g.db[l][i]) <= 1e-5 * std::max(1.0, std::abs(num)));
            ++checked;
        }
    }
    REQUIRE(checked > 10);
}

TEST_CASE("adam: zero gradient with zero moments leaves parameters unchanged", "[mlp]") {
    Rng rng(7);
    Mlp net(MlpSpec{{2, 3}}, rng);
    std::vector<std::vector<double>> before = net.weights();
    MlpGrad g = net.make_grad();
    net.adam_step(g, 0.1);
    REQUIRE(net.weights() == before);
}

TEST_CASE("adam: first step moves each coordinate by about lr", "[mlp]") {
    Rng rng(8);
    Mlp net(MlpSpec{{2, 2}}, rng);
    std::vector<std::vector<double>> before = net.weights();
    MlpGrad g = net.make_grad();
    for (auto& layer : g.dw)
        for (double& v : layer) v = 3.7; // any nonzero constant
    net.adam_step(g, 0.01);
    for (std::size_t l = 0; l < before.size(); ++l)
        for (std::size_t i = 0; i < before[l].size(); ++i)
            REQUIRE(before[l][i] - net.weights()[l][i] == Catch::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("adam: three steps on a scalar match the reference recursion", "[mlp]") {
    Rng rng(9);
    Mlp net(MlpSpec{{1, 1}}, rng);
    net.weights()[0][0] = 0.5;
    net.biases()[0][0] = 0.0;
    const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double theta = 0.5, m = 0.0, v = 0.0;
    std::vector<double> grads = {0.3, -1.1, 0.7};
    for (int t = 1; t <= 3; ++t) {
        double gr = grads[t - 1];
        MlpGrad g = net.make_grad();
        g.dw[0][0] = gr;
        net.adam_step(g, lr, b1, b2, eps, false);
        // hand-rolled recursion
        m = b1 * m + (1 - b1) * gr;
        v = b2 * v + (1 - b2) * gr * gr;
        double mhat = m / (1 - std::pow(b1, t));
        double vhat = v / (1 - std::pow(b2, t));
        theta -= lr * mhat / (std::sqrt(vhat) + eps);
        REQUIRE(net.weights()[0][0] == Catch::Approx(theta).epsilon(1e-12));
    }
}

TEST_CASE("adam: maximize flips the direction", "[mlp]") {
    Rng rng(10);
    Mlp net(MlpSpec{{1, 1}}, rng);
    net.weights()[0][0] = 0.0;
    MlpGrad g = net.make_grad();
    g.dw[0][0] = 1.0;
    net.adam_step(g, 0.01, 0.9, 0.999, 1e-8, true);
    REQUIRE(net.weights()[0][0] > 0.0);
}
