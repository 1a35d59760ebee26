/**
 * \file network.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#ifndef JFORGE_NETWORK_HPP
#define JFORGE_NETWORK_HPP

#include "jforge/tensor.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace jforge {

/// Fully connected layer: y = W x + b, W is out x in.
struct Dense {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

/**
 * Valid-padding 2-D convolution over a (channels, height, width) input.
 * Kernels are stored row-major as count x channels x kh x kw.
 */
struct Conv2D {
    std::size_t count = 0;
    std::size_t channels = 0;
    std::size_t kernel_h = 0;
    std::size_t kernel_w = 0;
    std::size_t stride = 1;
    std::vector<double> kernels;
    std::vector<double> bias;

    double kernel(std::size_t o, std::size_t c, std::size_t y, std::size_t x) const {
        return kernels[((o * channels + c) * kernel_h + y) * kernel_w + x];
    }
};

/// Non-overlapping square pooling windows; trailing rows/columns that do not fill a window are dropped.
struct MaxPool {
    std::size_t window = 2;
};

struct AvgPool {
    std::size_t window = 2;
};

enum class ActivationKind { sigmoid, relu, tanh };

struct Activation {
    ActivationKind kind = ActivationKind::sigmoid;
};

struct Flatten {};

struct Softmax {};

using Layer = std::variant<Dense, Conv2D, MaxPool, AvgPool, Activation, Flatten, Softmax>;

std::string layer_name(const Layer &layer);
std::string activation_name(ActivationKind kind);
ActivationKind parse_activation(const std::string &name);

/// Ordered list of layers applied to inputs of `input_shape`.
struct Network {
    Shape input_shape;
    std::vector<Layer> layers;

    std::size_t input_size() const { return shape_size(input_shape); }
    /// Number of outputs; throws DimensionError when the layer chain is invalid.
    std::size_t output_dim() const;
    bool ends_with_softmax() const;
};

/// One chaining violation found by validate(); `layer` is the offending layer index.
struct ShapeIssue {
    std::size_t layer;
    std::string message;
};

/// Every shape violation in the network; empty means the network is usable.
std::vector<ShapeIssue> validate(const Network &net);

/// Output shape of `layer` when fed `input`; throws DimensionError on mismatch.
Shape layer_output_shape(const Layer &layer, const Shape &input);

/**
 * Shapes flowing through the network: entry 0 is the input shape, entry k+1 the
 * output of layer k. Throws DimensionError naming the first bad layer.
 */
std::vector<Shape> layer_shapes(const Network &net);

/// Input followed by the output of every layer; the last entry is F(x).
using ActivationTrace = std::vector<Tensor>;

ActivationTrace forward(const Network &net, const Tensor &x);

/// F(x) without keeping intermediate outputs.
Tensor evaluate(const Network &net, const Tensor &x);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

std::size_t predict_label(const Network &net, const Tensor &x);

/// Output of a single layer on a single input.
Tensor apply_layer(const Layer &layer, const Tensor &input);

} // namespace jforge

#endif // JFORGE_NETWORK_HPP
