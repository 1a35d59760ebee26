/**
 * \file support.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Random networks, finite-difference helpers and search oracles shared by the tests.
 */

#ifndef JFORGE_TESTS_SUPPORT_HPP
#define JFORGE_TESTS_SUPPORT_HPP

#include "jforge/network.hpp"
#include "jforge/saliency.hpp"
#include "jforge/train.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace jforge;

inline Tensor random_tensor(const Shape &shape, std::mt19937_64 &rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor t(shape);
    for (double &v : t.values())
        v = dist(rng);
    return t;
}

inline Dense random_dense(std::size_t out, std::size_t in, std::mt19937_64 &rng, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale / std::sqrt(static_cast<double>(in)));
    Dense d;
    d.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
    d.bias.resize(static_cast<Eigen::Index>(out));
    for (Eigen::Index r = 0; r < d.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.weights.cols(); ++c)
            d.weights(r, c) = dist(rng);
        d.bias(r) = dist(rng);
    }
    return d;
}

inline Conv2D random_conv(std::size_t count, std::size_t channels, std::size_t k, std::size_t stride,
                          std::mt19937_64 &rng) {
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(channels * k * k)));
    Conv2D c;
    c.count = count;
    c.channels = channels;
    c.kernel_h = c.kernel_w = k;
    c.stride = stride;
    c.kernels.resize(count * channels * k * k);
    c.bias.resize(count);
    for (double &v : c.kernels)
        v = dist(rng);
    for (double &v : c.bias)
        v = dist(rng);
    return c;
}

inline ActivationKind random_activation(std::mt19937_64 &rng) {
    const ActivationKind kinds[] = {ActivationKind::sigmoid, ActivationKind::relu, ActivationKind::tanh};
    return kinds[std::uniform_int_distribution<int>(0, 2)(rng)];
}

/**
 * Random network with at most 64 inputs. Variant 0 is a dense chain, 1 a
 * convolution with max pooling, 2 a convolution with average pooling, 3 two
 * convolutions. All end with a softmax over `classes` outputs.
 */
inline Network random_network(int variant, std::mt19937_64 &rng, std::size_t classes = 4) {
    Network net;
    if (variant == 0) {
        const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 64)(rng);
        const std::size_t h = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        net.input_shape = {m};
        net.layers = {random_dense(h, m, rng), Activation{random_activation(rng)}, random_dense(classes, h, rng),
                      Softmax{}};
        return net;
    }
    const std::size_t channels = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    const std::size_t side = channels == 1 ? 8 : 5;
    net.input_shape = {channels, side, side};
    const std::size_t count = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    net.layers.push_back(random_conv(count, channels, 3, 1, rng));
    net.layers.push_back(Activation{random_activation(rng)});
    Shape shape = {count, side - 2, side - 2};
    if (variant == 3) {
        net.layers.push_back(random_conv(2, count, 2, 1, rng));
        shape = {2, side - 3, side - 3};
        net.layers.push_back(Activation{random_activation(rng)});
    }
    if (variant == 1)
        net.layers.push_back(MaxPool{2});
    else
        net.layers.push_back(AvgPool{2});
    net.layers.push_back(Flatten{});
    net.layers.push_back(random_dense(classes, shape_size(layer_shapes(net).back()), rng));
    net.layers.push_back(Softmax{});
    return net;
}

inline bool has_maxpool(const Network &net) {
    return std::any_of(net.layers.begin(), net.layers.end(),
                       [](const Layer &l) { return std::holds_alternative<MaxPool>(l); });
}

/// Central difference of the batch loss with respect to every parameter.
inline ParameterGradients numeric_gradients(Network net, std::span<const Sample> batch, Loss loss, double h) {
    ParameterGradients out;
    auto arrays = parameter_arrays(net);
    for (auto &array : arrays) {
        std::vector<double> g(array.size());
        for (std::size_t i = 0; i < array.size(); ++i) {
            const double saved = array[i];
            array[i] = saved + h;
            const double up = batch_loss(net, batch, loss);
            array[i] = saved - h;
            const double down = batch_loss(net, batch, loss);
            array[i] = saved;
            g[i] = (up - down) / (2.0 * h);
        }
        out.push_back(std::move(g));
    }
    return out;
}

inline double max_abs_diff(const Eigen::Ref<const Eigen::MatrixXd> &a, const Eigen::Ref<const Eigen::MatrixXd> &b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// Random N x M Jacobian; `gridded` draws multiples of 1/4 in [-3/4, 3/4] so that ties are common.
inline Jacobian random_jacobian(std::size_t n, std::size_t m, std::mt19937_64 &rng, bool gridded) {
    JacobianMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    std::uniform_real_distribution<double> real(-1.0, 1.0);
    std::uniform_int_distribution<int> step(-3, 3);
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            values(r, c) = gridded ? step(rng) * 0.25 : real(rng);
    return Jacobian{values, Tap::probabilities};
}

struct BrutePair {
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    double score = 0.0;
};

/// Exhaustive search over every ordered pair p < q of `domain`, written from the definitions.
inline BrutePair brute_pair_search(const Jacobian &jac, const std::vector<std::size_t> &domain, std::size_t t,
                                   Variant variant) {
    auto a = [&](std::size_t i) { return jac.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)); };
    auto b = [&](std::size_t i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < jac.values.rows(); ++j)
            if (static_cast<std::size_t>(j) != t)
                sum += jac.values(j, static_cast<Eigen::Index>(i));
        return sum;
    };
    BrutePair best;
    for (std::size_t x = 0; x < domain.size(); ++x)
        for (std::size_t y = 0; y < domain.size(); ++y) {
            const std::size_t p = domain[x], q = domain[y];
            if (p >= q)
                continue;
            const double alpha = a(p) + a(q), beta = b(p) + b(q);
            const bool ok = variant == Variant::increase ? alpha > 0 && beta < 0 : alpha < 0 && beta > 0;
            if (!ok)
                continue;
            const double score = -alpha * beta;
            const bool better = !best.pair || score > best.score ||
                                (score == best.score && std::make_pair(p, q) < *best.pair);
            if (better) {
                best.pair = std::make_pair(p, q);
                best.score = score;
            }
        }
    return best;
}

} // namespace testing

#endif // JFORGE_TESTS_SUPPORT_HPP
