/**
 * \file test_train.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "support.hpp"

#include "jforge/error.hpp"
#include "jforge/model_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace jforge;
using testing::numeric_gradients;
using testing::random_dense;
using testing::random_tensor;

namespace {

LabeledDataset random_dataset(const Shape &shape, std::size_t classes, std::size_t count, std::mt19937_64 &rng) {
    LabeledDataset data{{}, classes};
    std::uniform_int_distribution<std::size_t> label(0, classes - 1);
    for (std::size_t i = 0; i < count; ++i)
        data.samples.push_back({random_tensor(shape, rng), label(rng)});
    return data;
}

void check_gradients(const Network &net, const LabeledDataset &data, Loss loss) {
    const auto analytic = backprop_gradients(net, data.samples, loss);
    const auto numeric = numeric_gradients(net, data.samples, loss, 1e-5);
    REQUIRE(analytic.size() == numeric.size());
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        REQUIRE(analytic[k].size() == numeric[k].size());
        for (std::size_t i = 0; i < analytic[k].size(); ++i) {
            const double scale = std::max({1.0, std::abs(analytic[k][i]), std::abs(numeric[k][i])});
            CHECK(std::abs(analytic[k][i] - numeric[k][i]) <= 1e-6 * scale);
        }
    }
}

std::string text_of(const Network &net) {
    std::ostringstream os;
    write_model(os, net);
    return os.str();
}

} // namespace

TEST_CASE("init_params is deterministic with zero biases and bounded weights") {
    const Architecture arch = parse_architecture({2}, "dense:2,sigmoid,dense:1,sigmoid");
    CHECK(text_of(init_params(arch, 42)) == text_of(init_params(arch, 42)));
    CHECK(text_of(init_params(arch, 42)) != text_of(init_params(arch, 43)));
    const Network net = init_params(arch, 7);
    CHECK(std::get<Dense>(net.layers[0]).bias.isZero(0.0));
    CHECK(std::get<Dense>(net.layers[2]).bias.isZero(0.0));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Network square = init_params(parse_architecture({3}, "dense:3"), seed);
        const auto &w = std::get<Dense>(square.layers[0]).weights;
        CHECK(w.maxCoeff() <= 1.0);
        CHECK(w.minCoeff() >= -1.0);
    }
}

TEST_CASE("architecture recipes") {
    const Architecture arch = parse_architecture({1, 8, 8}, "conv:3x3, relu, maxpool:2, flatten, dense:4, softmax");
    CHECK(arch.layers.size() == 6);
    const Network net = init_params(arch, 1);
    CHECK(validate(net).empty());
    CHECK(net.output_dim() == 4);
    CHECK(architecture_string(architecture_of(net)) == "conv:3x3,relu,maxpool:2,flatten,dense:4,softmax");
    CHECK_THROWS_AS(parse_architecture({4}, ""), InputError);
    CHECK_THROWS_AS(parse_architecture({4}, "dense:3,,softmax"), InputError);
    CHECK_THROWS(init_params(parse_architecture({4}, "wobble"), 0));
    CHECK_THROWS(init_params(parse_architecture({4}, "conv:2x3"), 0));
}

TEST_CASE("gradients vanish at a strict minimum of a linear unit") {
    Dense d;
    d.weights = Eigen::MatrixXd::Constant(1, 1, 1.0);
    d.bias = Eigen::VectorXd::Zero(1);
    const Network net{{1}, {d}};
    const std::vector<Sample> batch{{Tensor({1}, 1.0), 1}};
    const auto g = backprop_gradients(net, batch, Loss::mean_squared_error);
    for (const auto &array : g)
        for (double v : array)
            CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("backprop matches central differences for every layer type") {
    std::mt19937_64 rng(3);
    SUBCASE("dense chains with each activation") {
        for (const char *act : {"sigmoid", "relu", "tanh"}) {
            const Architecture arch = parse_architecture({5}, std::string("dense:4,") + act + ",dense:3,softmax");
            const Network net = init_params(arch, 11);
            check_gradients(net, random_dataset({5}, 3, 6, rng), Loss::cross_entropy);
        }
    }
    SUBCASE("random two-layer net with biases") {
        const Network net{{6}, {random_dense(5, 6, rng), Activation{ActivationKind::tanh}, random_dense(3, 5, rng),
                                Softmax{}}};
        check_gradients(net, random_dataset({6}, 3, 8, rng), Loss::cross_entropy);
    }
    SUBCASE("convolution with max pooling") {
        Network net = testing::random_network(1, rng, 3);
        check_gradients(net, random_dataset(net.input_shape, 3, 4, rng), Loss::cross_entropy);
    }
    SUBCASE("convolutions with average pooling and stride") {
        const Network net = init_params(
            parse_architecture({2, 7, 7}, "conv:3x3/2,sigmoid,avgpool:1,conv:2x2,tanh,flatten,dense:3,softmax"), 5);
        check_gradients(net, random_dataset(net.input_shape, 3, 4, rng), Loss::cross_entropy);
    }
    SUBCASE("squared error on a single sigmoid output") {
        const Network net = init_params(parse_architecture({2}, "dense:2,sigmoid,dense:1,sigmoid"), 2);
        check_gradients(net, random_dataset({2}, 2, 10, rng), Loss::mean_squared_error);
    }
    SUBCASE("squared error against one-hot targets") {
        const Network net = init_params(parse_architecture({4}, "dense:3,relu,dense:3,softmax"), 2);
        check_gradients(net, random_dataset({4}, 3, 5, rng), Loss::mean_squared_error);
    }
}

TEST_CASE("gradients are means over the batch") {
    std::mt19937_64 rng(4);
    const Network net = init_params(parse_architecture({4}, "dense:3,sigmoid,dense:2,softmax"), 9);
    const LabeledDataset data = random_dataset({4}, 2, 5, rng);
    std::vector<Sample> doubled;
    for (const auto &s : data.samples) {
        doubled.push_back(s);
        doubled.push_back(s);
    }
    const auto a = backprop_gradients(net, data.samples, Loss::cross_entropy);
    const auto b = backprop_gradients(net, doubled, Loss::cross_entropy);
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a[k].size(); ++i)
            CHECK(a[k][i] == doctest::Approx(b[k][i]).epsilon(1e-13));
}

TEST_CASE("labels out of range are rejected") {
    const Network net = init_params(parse_architecture({2}, "dense:2,softmax"), 0);
    const std::vector<Sample> batch{{Tensor({2}, 0.5), 5}};
    CHECK_THROWS_AS(backprop_gradients(net, batch, Loss::cross_entropy), DataError);
}

TEST_CASE("toy AND network learns the truth table") {
    const Architecture arch = parse_architecture({2}, "dense:2,sigmoid,dense:1,sigmoid");
    TrainConfig config;
    config.learning_rate = 0.0663;
    config.epochs = 100;
    config.batch_size = 1;
    config.loss = Loss::mean_squared_error;
    const auto result = sgd_train(init_params(arch, 0), and_dataset(1000), config);
    CHECK(result.history.size() == 100);
    for (double x1 : {0.0, 1.0})
        for (double x2 : {0.0, 1.0}) {
            const double y = evaluate(result.network, Tensor({2}, std::vector<double>{x1, x2}))[0];
            CHECK(round_half_up(y) == and_truth(x1, x2));
        }
    CHECK(accuracy(result.network, and_dataset(4)) == 1.0);
}

TEST_CASE("training is reproducible and zero epochs change nothing") {
    std::mt19937_64 rng(5);
    const LabeledDataset data = random_dataset({4}, 3, 40, rng);
    const Network start = init_params(parse_architecture({4}, "dense:5,relu,dense:3,softmax"), 3);
    TrainConfig config;
    config.batch_size = 7;
    config.epochs = 3;
    config.seed = 17;
    CHECK(text_of(sgd_train(start, data, config).network) == text_of(sgd_train(start, data, config).network));
    config.epochs = 0;
    const auto idle = sgd_train(start, data, config);
    CHECK(text_of(idle.network) == text_of(start));
    CHECK(idle.history.empty());
}

TEST_CASE("training history is finite and written as CSV") {
    std::mt19937_64 rng(6);
    const LabeledDataset data = random_dataset({3}, 2, 20, rng);
    TrainConfig config;
    config.batch_size = 5;
    config.epochs = 4;
    const auto result = sgd_train(init_params(parse_architecture({3}, "dense:2,softmax"), 1), data, config, &data);
    REQUIRE(result.history.size() == 4);
    for (const auto &h : result.history) {
        CHECK(std::isfinite(h.loss));
        REQUIRE(h.test_accuracy.has_value());
    }
    std::ostringstream os;
    write_history_csv(os, result.history);
    CHECK(os.str().rfind("epoch,loss,train_acc,test_acc\n1,", 0) == 0);
}

TEST_CASE("training input checks") {
    std::mt19937_64 rng(7);
    const LabeledDataset data = random_dataset({3}, 2, 10, rng);
    const Network net = init_params(parse_architecture({3}, "dense:2,softmax"), 1);
    TrainConfig config;
    config.batch_size = 11;
    CHECK_THROWS_AS(sgd_train(net, data, config), InputError);
    config.batch_size = 2;
    config.learning_rate = 1e300;
    config.loss = Loss::mean_squared_error;
    const Network relu = init_params(parse_architecture({3}, "dense:4,relu,dense:2"), 1);
    try {
        sgd_train(relu, data, config);
        FAIL("expected divergence");
    } catch (const DivergenceError &e) {
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("accuracy") {
    SUBCASE("zero weights predict class 0") {
        const Network net = init_params(parse_architecture({3}, "dense:3,softmax"), 0);
        Network zero = net;
        std::get<Dense>(zero.layers[0]).weights.setZero();
        std::mt19937_64 rng(8);
        const LabeledDataset data = random_dataset({3}, 3, 60, rng);
        const double zeros = static_cast<double>(std::count_if(data.samples.begin(), data.samples.end(),
                                                               [](const Sample &s) { return s.label == 0; }));
        CHECK(accuracy(zero, data) == doctest::Approx(zeros / 60.0));
    }
    SUBCASE("hand-built AND unit is a perfect lookup and fails on flipped labels") {
        Dense d;
        d.weights.resize(1, 2);
        d.weights << 10.0, 10.0;
        d.bias = Eigen::VectorXd::Constant(1, -15.0);
        const Network net{{2}, {d, Activation{ActivationKind::sigmoid}}};
        LabeledDataset data = and_dataset(4);
        CHECK(accuracy(net, data) == 1.0);
        for (auto &s : data.samples)
            s.label = 1 - s.label;
        CHECK(accuracy(net, data) == 0.0);
    }
}

TEST_CASE("AND dataset and rounding") {
    const LabeledDataset data = and_dataset(1000);
    CHECK(data.size() == 1000);
    CHECK(data.class_count == 2);
    std::size_t ones = 0;
    for (const auto &s : data.samples) {
        CHECK(s.label == static_cast<std::size_t>(and_truth(s.x[0], s.x[1])));
        ones += s.label;
    }
    CHECK(ones == 250);
    CHECK(round_half_up(0.5) == 1);
    CHECK(round_half_up(0.49) == 0);
    CHECK(and_truth(0.6, 0.5) == 1);
    CHECK(and_truth(1.0, 0.43) == 0);
}

TEST_CASE("retraining with no adversarial samples equals plain training") {
    std::mt19937_64 rng(9);
    const LabeledDataset data = random_dataset({4}, 2, 30, rng);
    const Architecture arch = parse_architecture({4}, "dense:3,tanh,dense:2,softmax");
    TrainConfig config;
    config.batch_size = 5;
    config.epochs = 3;
    config.seed = 21;
    const auto plain = sgd_train(init_params(arch, config.seed), data, config);
    const auto retrained = augment_retrain(arch, data, LabeledDataset{{}, 2}, config);
    CHECK(text_of(plain.network) == text_of(retrained.network));
}
