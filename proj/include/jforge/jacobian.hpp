/**
 * \file jacobian.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Input-output derivatives of a network, accumulated forward: the seed is the
 * M x M identity and every layer maps dIn/dx to dOut/dx by the chain rule.
 */

#ifndef JFORGE_JACOBIAN_HPP
#define JFORGE_JACOBIAN_HPP

#include "jforge/network.hpp"

#include <Eigen/Dense>

#include <iosfwd>

namespace jforge {

using JacobianMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Where the derivative is read: the final probabilities, or the logits feeding a final Softmax.
enum class Tap { probabilities, logits };

/// N x M matrix of dF_j/dx_i: row j is an output, column i an input feature.
struct Jacobian {
    JacobianMatrix values;
    Tap tap = Tap::probabilities;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
    double operator()(std::size_t j, std::size_t i) const { return values(j, i); }
};

/**
 * Pushes `jac_in` (rows = layer input size, one column per input feature)
 * through `layer` evaluated at `input`.
 */
Jacobian layer_pushforward(const Layer &layer, const Tensor &input, const Jacobian &jac_in);

/// dF/dx at `x`. With Tap::logits the trailing Softmax is skipped.
Jacobian forward_derivative(const Network &net, const Tensor &x, Tap tap);

/// Central differences (F(x + h e_i) - F(x - h e_i)) / 2h, no clamping of x.
Jacobian finite_difference_jacobian(const Network &net, const Tensor &x, double h, Tap tap);

/// One row per output, one column per input feature.
void write_jacobian_csv(std::ostream &os, const Jacobian &jac);

} // namespace jforge

#endif // JFORGE_JACOBIAN_HPP
