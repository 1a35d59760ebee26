/**
 * \file network.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/network.hpp"

#include "jforge/error.hpp"
#include "layer_ops.hpp"

#include <cmath>

namespace jforge {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

std::string layer_prefix(std::size_t index, const Layer &layer) {
    return "layer " + std::to_string(index) + " (" + layer_name(layer) + "): ";
}

Shape image_output(const Shape &in, std::size_t window, const char *what) {
    if (in.size() != 3)
        throw DimensionError(std::string(what) + " needs a (channels, height, width) input, got " + shape_string(in));
    if (window == 0)
        throw DimensionError(std::string(what) + " window must be positive");
    if (in[1] < window || in[2] < window)
        throw DimensionError(std::string(what) + " window " + std::to_string(window) + " larger than input " +
                             shape_string(in));
    return {in[0], in[1] / window, in[2] / window};
}

} // namespace

std::string activation_name(ActivationKind kind) {
    switch (kind) {
    case ActivationKind::sigmoid:
        return "sigmoid";
    case ActivationKind::relu:
        return "relu";
    case ActivationKind::tanh:
        return "tanh";
    }
    return "?";
}

ActivationKind parse_activation(const std::string &name) {
    if (name == "sigmoid")
        return ActivationKind::sigmoid;
    if (name == "relu")
        return ActivationKind::relu;
    if (name == "tanh")
        return ActivationKind::tanh;
    throw InputError("unknown activation '" + name + "'");
}

std::string layer_name(const Layer &layer) {
    return std::visit(overloaded{
                          [](const Dense &) -> std::string { return "dense"; },
                          [](const Conv2D &) -> std::string { return "conv2d"; },
                          [](const MaxPool &) -> std::string { return "maxpool"; },
                          [](const AvgPool &) -> std::string { return "avgpool"; },
                          [](const Activation &a) -> std::string { return activation_name(a.kind); },
                          [](const Flatten &) -> std::string { return "flatten"; },
                          [](const Softmax &) -> std::string { return "softmax"; },
                      },
                      layer);
}

Shape layer_output_shape(const Layer &layer, const Shape &in) {
    return std::visit(
        overloaded{
            [&](const Dense &d) -> Shape {
                if (d.weights.rows() != d.bias.size())
                    throw DimensionError("weight rows " + std::to_string(d.weights.rows()) + " != bias length " +
                                         std::to_string(d.bias.size()));
                if (d.weights.size() == 0)
                    throw DimensionError("empty weight matrix");
                if (in.size() != 1 || in[0] != static_cast<std::size_t>(d.weights.cols()))
                    throw DimensionError("expects input (" + std::to_string(d.weights.cols()) + "), got " +
                                         shape_string(in));
                return {static_cast<std::size_t>(d.weights.rows())};
            },
            [&](const Conv2D &c) -> Shape {
                if (c.count == 0 || c.channels == 0 || c.kernel_h == 0 || c.kernel_w == 0 || c.stride == 0)
                    throw DimensionError("convolution dimensions must be positive");
                if (c.kernels.size() != c.count * c.channels * c.kernel_h * c.kernel_w)
                    throw DimensionError("kernel array length does not match count x channels x kh x kw");
                if (c.bias.size() != c.count)
                    throw DimensionError("bias length " + std::to_string(c.bias.size()) + " != kernel count " +
                                         std::to_string(c.count));
                if (in.size() != 3)
                    throw DimensionError("needs a (channels, height, width) input, got " + shape_string(in));
                if (in[0] != c.channels)
                    throw DimensionError("kernels expect " + std::to_string(c.channels) + " channels, input has " +
                                         std::to_string(in[0]));
                if (in[1] < c.kernel_h || in[2] < c.kernel_w)
                    throw DimensionError("kernel larger than input " + shape_string(in));
                return {c.count, (in[1] - c.kernel_h) / c.stride + 1, (in[2] - c.kernel_w) / c.stride + 1};
            },
            [&](const MaxPool &p) -> Shape { return image_output(in, p.window, "max pooling"); },
            [&](const AvgPool &p) -> Shape { return image_output(in, p.window, "average pooling"); },
            [&](const Activation &) -> Shape { return in; },
            [&](const Flatten &) -> Shape { return {shape_size(in)}; },
            [&](const Softmax &) -> Shape { return in; },
        },
        layer);
}

std::vector<ShapeIssue> validate(const Network &net) {
    std::vector<ShapeIssue> issues;
    if (net.layers.empty()) {
        issues.push_back({0, "no layers"});
        return issues;
    }
    if (net.input_shape.empty() || shape_size(net.input_shape) == 0) {
        issues.push_back({0, "input shape " + shape_string(net.input_shape) + " is empty"});
        return issues;
    }
    Shape shape = net.input_shape;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Layer &layer = net.layers[k];
        if (std::holds_alternative<Softmax>(layer) && k + 1 != net.layers.size())
            issues.push_back({k, layer_prefix(k, layer) + "softmax must be the final layer"});
        try {
            shape = layer_output_shape(layer, shape);
        } catch (const DimensionError &e) {
            issues.push_back({k, layer_prefix(k, layer) + e.what()});
            // Keep chaining where the layer's own output shape is still known.
            if (const auto *d = std::get_if<Dense>(&layer); d && d->weights.rows() > 0)
                shape = {static_cast<std::size_t>(d->weights.rows())};
            else
                return issues;
        }
    }
    return issues;
}

std::vector<Shape> layer_shapes(const Network &net) {
    if (net.layers.empty())
        throw DimensionError("no layers");
    std::vector<Shape> shapes{net.input_shape};
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Layer &layer = net.layers[k];
        if (std::holds_alternative<Softmax>(layer) && k + 1 != net.layers.size())
            throw DimensionError(layer_prefix(k, layer) + "softmax must be the final layer");
        try {
            shapes.push_back(layer_output_shape(layer, shapes.back()));
        } catch (const DimensionError &e) {
            throw DimensionError(layer_prefix(k, layer) + e.what());
        }
    }
    return shapes;
}

std::size_t Network::output_dim() const { return shape_size(layer_shapes(*this).back()); }

bool Network::ends_with_softmax() const { return !layers.empty() && std::holds_alternative<Softmax>(layers.back()); }

Tensor apply_layer(const Layer &layer, const Tensor &input) {
    Shape out_shape = layer_output_shape(layer, input.shape());
    const Eigen::Map<const Eigen::MatrixXd> in(input.data(), static_cast<Eigen::Index>(input.size()), 1);
    detail::Batch out = detail::forward_batch(layer, input.shape(), in);
    return Tensor(std::move(out_shape), std::vector<double>(out.data(), out.data() + out.size()));
}

static void check_input(const Network &net, const Tensor &x) {
    if (x.shape() != net.input_shape)
        throw DimensionError("layer 0: input shape " + shape_string(x.shape()) + " does not match network input " +
                             shape_string(net.input_shape));
    for (double v : x.values())
        if (!std::isfinite(v))
            throw InputError("input contains a non-finite feature");
}

ActivationTrace forward(const Network &net, const Tensor &x) {
    check_input(net, x);
    if (net.layers.empty())
        throw DimensionError("no layers");
    ActivationTrace trace;
    trace.reserve(net.layers.size() + 1);
    trace.push_back(x);
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Layer &layer = net.layers[k];
        if (std::holds_alternative<Softmax>(layer) && k + 1 != net.layers.size())
            throw DimensionError(layer_prefix(k, layer) + "softmax must be the final layer");
        try {
            trace.push_back(apply_layer(layer, trace.back()));
        } catch (const DimensionError &e) {
            throw DimensionError(layer_prefix(k, layer) + e.what());
        }
    }
    return trace;
}

Tensor evaluate(const Network &net, const Tensor &x) { return forward(net, x).back(); }

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best])
            best = i;
    return best;
}

std::size_t predict_label(const Network &net, const Tensor &x) { return argmax(evaluate(net, x).values()); }

} // namespace jforge
