/**
 * \file jacobian.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/jacobian.hpp"

#include "jforge/error.hpp"
#include "layer_ops.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace jforge {

namespace {

std::size_t tapped_layer_count(const Network &net, Tap tap) {
    if (tap == Tap::logits) {
        if (!net.ends_with_softmax())
            throw ConfigError("logits tap requires a network whose final layer is softmax");
        return net.layers.size() - 1;
    }
    return net.layers.size();
}

Tensor evaluate_prefix(const Network &net, const Tensor &x, std::size_t count) {
    Tensor value = x;
    for (std::size_t k = 0; k < count; ++k)
        value = apply_layer(net.layers[k], value);
    return value;
}

} // namespace

Jacobian layer_pushforward(const Layer &layer, const Tensor &input, const Jacobian &jac_in) {
    const Tensor output = apply_layer(layer, input);
    return {detail::pushforward(layer, input.shape(), input.values(), output.values(), jac_in.values), jac_in.tap};
}

Jacobian forward_derivative(const Network &net, const Tensor &x, Tap tap) {
    const std::size_t count = tapped_layer_count(net, tap);
    const std::vector<Shape> shapes = layer_shapes(net);
    const ActivationTrace trace = forward(net, x);
    const auto m = static_cast<Eigen::Index>(x.size());

    std::size_t k = 0;
    JacobianMatrix jac;
    // W * I == W exactly, so a leading dense layer skips the identity product.
    if (count > 0 && std::holds_alternative<Dense>(net.layers[0])) {
        jac = std::get<Dense>(net.layers[0]).weights;
        k = 1;
    } else {
        jac = JacobianMatrix::Identity(m, m);
    }
    for (; k < count; ++k)
        jac = detail::pushforward(net.layers[k], shapes[k], trace[k].values(), trace[k + 1].values(), jac);
    return {std::move(jac), tap};
}

Jacobian finite_difference_jacobian(const Network &net, const Tensor &x, double h, Tap tap) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw InputError("finite-difference step must be positive and finite");
    const std::size_t count = tapped_layer_count(net, tap);
    (void)forward(net, x); // shape and finiteness checks

    const std::size_t m = x.size();
    const std::size_t n = evaluate_prefix(net, x, count).size();
    JacobianMatrix jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    Tensor probe = x;
    for (std::size_t i = 0; i < m; ++i) {
        probe[i] = x[i] + h;
        const Tensor up = evaluate_prefix(net, probe, count);
        probe[i] = x[i] - h;
        const Tensor down = evaluate_prefix(net, probe, count);
        probe[i] = x[i];
        for (std::size_t j = 0; j < n; ++j)
            jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = (up[j] - down[j]) / (2.0 * h);
    }
    return {std::move(jac), tap};
}

void write_jacobian_csv(std::ostream &os, const Jacobian &jac) {
    os << std::setprecision(17);
    for (std::size_t j = 0; j < jac.rows(); ++j) {
        for (std::size_t i = 0; i < jac.cols(); ++i) {
            if (i)
                os << ',';
            os << jac(j, i);
        }
        os << '\n';
    }
}

} // namespace jforge
