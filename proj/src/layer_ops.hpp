/**
 * \file layer_ops.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Per-layer kernels shared by evaluation, training and differentiation.
 * A batch is a matrix with one column per sample, features in row-major
 * tensor order down each column.
 */

#ifndef JFORGE_LAYER_OPS_HPP
#define JFORGE_LAYER_OPS_HPP

#include "jforge/jacobian.hpp"
#include "jforge/network.hpp"

#include <span>
#include <vector>

namespace jforge::detail {

using Batch = Eigen::MatrixXd;

double activate(ActivationKind kind, double z);
/// f'(z) expressed through the input z and the output y = f(z).
double activate_derivative(ActivationKind kind, double z, double y);

Batch forward_batch(const Layer &layer, const Shape &in_shape, const Batch &in);

/**
 * Propagates `grad_out` (dL/d output) back to dL/d input. When `param_grads`
 * is non-null, the per-parameter gradients summed over the batch are added
 * into it, one entry per parameter array in parameter_views() order.
 */
Batch backward_batch(const Layer &layer, const Shape &in_shape, const Batch &in, const Batch &out,
                     const Batch &grad_out, std::vector<std::vector<double>> *param_grads);

/// Chain rule for one layer: returns dOut/dx given dIn/dx (rows = layer input size).
JacobianMatrix pushforward(const Layer &layer, const Shape &in_shape, std::span<const double> in,
                           std::span<const double> out, const JacobianMatrix &jac_in);

/// Mutable views of a layer's parameter arrays (Dense: weights column-major, bias).
std::vector<std::span<double>> parameter_views(Layer &layer);
std::vector<std::span<const double>> parameter_views(const Layer &layer);

} // namespace jforge::detail

#endif // JFORGE_LAYER_OPS_HPP
