/**
 * \file test_network.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "support.hpp"

#include "jforge/error.hpp"
#include "jforge/model_io.hpp"

#include <doctest.h>

#include <limits>
#include <sstream>

using namespace jforge;
using testing::random_dense;
using testing::random_network;
using testing::random_tensor;

namespace {

Dense identity_dense(std::size_t n) {
    Dense d;
    d.weights = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    d.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    return d;
}

Network identity_net(std::size_t n) { return Network{{n}, {identity_dense(n)}}; }

Network and_network() {
    Dense hidden;
    hidden.weights.resize(2, 2);
    hidden.weights << 6.0, 6.0, -4.0, 3.0;
    hidden.bias = Eigen::Vector2d(-9.0, 1.0);
    Dense out;
    out.weights.resize(1, 2);
    out.weights << 12.0, -2.0;
    out.bias = Eigen::VectorXd::Constant(1, -5.0);
    return Network{{2}, {hidden, Activation{ActivationKind::sigmoid}, out, Activation{ActivationKind::sigmoid}}};
}

std::string text_of(const Network &net) {
    std::ostringstream os;
    write_model(os, net);
    return os.str();
}

Network parse(const std::string &text) {
    std::istringstream is(text);
    return read_model(is);
}

} // namespace

TEST_CASE("softmax of equal logits is uniform") {
    const Network net{{3}, {Softmax{}}};
    const Tensor y = evaluate(net, Tensor({3}, 0.0));
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(y[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("identity dense then sigmoid maps zero to one half") {
    Network net = identity_net(1);
    net.layers.push_back(Activation{ActivationKind::sigmoid});
    CHECK(evaluate(net, Tensor({1}, 0.0))[0] == 0.5);
}

TEST_CASE("forward trace has one entry per layer plus the input") {
    std::mt19937_64 rng(1);
    const Network net = random_network(1, rng);
    const Tensor x = random_tensor(net.input_shape, rng);
    const auto trace = forward(net, x);
    REQUIRE(trace.size() == net.layers.size() + 1);
    CHECK(trace.front() == x);
    const auto shapes = layer_shapes(net);
    for (std::size_t k = 0; k < trace.size(); ++k)
        CHECK(trace[k].shape() == shapes[k]);
}

TEST_CASE("predict_label takes the highest output with ties to the lowest index") {
    std::vector<double> fig8(10, 0.0);
    fig8[2] = 0.99;
    CHECK(predict_label(identity_net(10), Tensor({10}, fig8)) == 2);
    CHECK(predict_label(identity_net(4), Tensor({4}, 0.25)) == 0);
    CHECK(predict_label(identity_net(2), Tensor({2}, std::vector<double>{0.1, 0.9})) == 1);
    const std::vector<double> tie{0.2, 0.4, 0.4};
    CHECK(argmax(tie) == 1);
}

TEST_CASE("validate reports every chaining problem") {
    SUBCASE("empty network") {
        const auto issues = validate(Network{{4}, {}});
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].message.find("no layers") != std::string::npos);
    }
    SUBCASE("matching dense chain") {
        std::mt19937_64 rng(2);
        const Network net{{784}, {random_dense(500, 784, rng), random_dense(10, 500, rng)}};
        CHECK(validate(net).empty());
    }
    SUBCASE("mismatched dense chain") {
        std::mt19937_64 rng(3);
        const Network net{{784}, {random_dense(500, 784, rng), random_dense(10, 499, rng)}};
        const auto issues = validate(net);
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].layer == 1);
    }
    SUBCASE("softmax before the last layer") {
        std::mt19937_64 rng(4);
        const Network net{{3}, {Softmax{}, random_dense(2, 3, rng)}};
        const auto issues = validate(net);
        REQUIRE(!issues.empty());
        CHECK(issues[0].layer == 0);
    }
    SUBCASE("dense weights and bias disagree") {
        Dense d = identity_dense(3);
        d.bias = Eigen::VectorXd::Zero(2);
        CHECK(validate(Network{{3}, {d}}).size() == 1);
    }
    SUBCASE("convolution channel count") {
        std::mt19937_64 rng(5);
        const Network net{{2, 6, 6}, {testing::random_conv(3, 1, 3, 1, rng)}};
        CHECK(validate(net).size() == 1);
    }
}

TEST_CASE("forward rejects inputs of the wrong shape or with non-finite values") {
    std::mt19937_64 rng(6);
    const Network net{{4}, {random_dense(3, 4, rng), Softmax{}}};
    CHECK_THROWS_AS(forward(net, Tensor({5}, 0.1)), DimensionError);
    try {
        forward(net, Tensor({5}, 0.1));
    } catch (const DimensionError &e) {
        CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
    }
    Tensor bad({4}, 0.1);
    bad[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward(net, bad), InputError);
}

TEST_CASE("tensors keep their invariants") {
    CHECK_THROWS_AS(Tensor(Shape{}), DimensionError);
    CHECK_THROWS_AS(Tensor(Shape{2, 0}), DimensionError);
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>(3)), DimensionError);
    const Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(t.reshaped({6}).values()[4] == 5.0);
    CHECK_THROWS_AS(t.reshaped({4}), DimensionError);
}

TEST_CASE("softmax output is a probability vector for any finite logits") {
    std::mt19937_64 rng(7);
    const Network net{{6}, {Softmax{}}};
    for (int trial = 0; trial < 200; ++trial) {
        const double scale = trial < 100 ? 10.0 : 700.0;
        const Tensor y = evaluate(net, random_tensor({6}, rng, -scale, scale));
        double sum = 0.0;
        for (double v : y.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("activation ranges and pooling order") {
    std::mt19937_64 rng(8);
    const Tensor z = random_tensor({50}, rng, -30.0, 30.0);
    const Tensor sig = apply_layer(Activation{ActivationKind::sigmoid}, z);
    for (double v : sig.values()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    const Tensor relu = apply_layer(Activation{ActivationKind::relu}, z);
    for (double v : relu.values())
        CHECK(v >= 0.0);
    const Tensor img = random_tensor({2, 7, 7}, rng);
    const Tensor mx = apply_layer(MaxPool{2}, img);
    const Tensor av = apply_layer(AvgPool{2}, img);
    CHECK(mx.shape() == Shape{2, 3, 3});
    for (std::size_t i = 0; i < mx.size(); ++i)
        CHECK(mx[i] >= av[i]);
}

TEST_CASE("convolution matches a direct valid-padding sum") {
    std::mt19937_64 rng(9);
    const Conv2D conv = testing::random_conv(2, 2, 3, 2, rng);
    const Tensor x = random_tensor({2, 7, 7}, rng);
    const Tensor y = apply_layer(conv, x);
    REQUIRE(y.shape() == Shape{2, 3, 3});
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) {
                double sum = conv.bias[o];
                for (std::size_t ch = 0; ch < 2; ++ch)
                    for (std::size_t ky = 0; ky < 3; ++ky)
                        for (std::size_t kx = 0; kx < 3; ++kx)
                            sum += conv.kernel(o, ch, ky, kx) * x[(ch * 7 + r * 2 + ky) * 7 + c * 2 + kx];
                CHECK(y[(o * 3 + r) * 3 + c] == doctest::Approx(sum).epsilon(1e-14));
            }
}

TEST_CASE("forward pass is deterministic") {
    std::mt19937_64 rng(10);
    const Network net = random_network(3, rng);
    const Tensor x = random_tensor(net.input_shape, rng);
    CHECK(forward(net, x) == forward(net, x));
}

TEST_CASE("model files round-trip bit for bit") {
    std::mt19937_64 rng(11);
    for (int variant = 0; variant < 4; ++variant) {
        Network net = random_network(variant, rng);
        const Network back = parse(text_of(net));
        CHECK(text_of(back) == text_of(net));
        const auto a = parameter_arrays(net);
        Network copy = back;
        const auto b = parameter_arrays(copy);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(std::equal(a[k].begin(), a[k].end(), b[k].begin(), b[k].end()));
    }
}

TEST_CASE("toy AND model round-trip preserves outputs on random inputs") {
    const Network net = and_network();
    const Network back = parse(text_of(net));
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        const Tensor x = random_tensor({2}, rng);
        CHECK(evaluate(back, x) == evaluate(net, x));
    }
}

TEST_CASE("malformed model files are rejected") {
    const std::string good = text_of(and_network());
    SUBCASE("truncated") {
        CHECK_THROWS_AS(parse(good.substr(0, good.size() / 2)), ParseError);
        CHECK_THROWS_AS(parse(""), ParseError);
    }
    SUBCASE("altered magic") {
        std::string bad = good;
        bad.replace(bad.find("v1"), 2, "v2");
        CHECK_THROWS_AS(parse(bad), VersionError);
    }
    SUBCASE("bad number names the line") {
        std::string bad = good;
        const auto pos = bad.find('\n', bad.find("LAYER 0")) + 1;
        bad.insert(pos, "x");
        try {
            parse(bad);
            FAIL("expected a parse error");
        } catch (const ParseError &e) {
            CHECK(std::string(e.what()).find("line 4") != std::string::npos);
        }
    }
    SUBCASE("unknown layer") {
        std::string bad = good;
        bad.replace(bad.find("activation"), 10, "activatiox");
        CHECK_THROWS_AS(parse(bad), ParseError);
    }
}

TEST_CASE("model file layout") {
    const std::string text = text_of(and_network());
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    CHECK(line == "JFORGE-MODEL v1");
    std::getline(is, line);
    CHECK(line == "2");
    std::getline(is, line);
    CHECK(line == "LAYER 0 dense 2 2");
    std::getline(is, line);
    CHECK(line == "6 6 -4 3");
}
