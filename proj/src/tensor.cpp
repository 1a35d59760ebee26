/**
 * \file tensor.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/tensor.hpp"

#include "jforge/error.hpp"

#include <functional>
#include <numeric>

namespace jforge {

std::size_t shape_size(const Shape &shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape &shape) {
    std::string out = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i)
            out += "x";
        out += std::to_string(shape[i]);
    }
    return out + ")";
}

static void check_shape(const Shape &shape) {
    if (shape.empty())
        throw DimensionError("tensor shape must have at least one dimension");
    for (auto d : shape)
        if (d == 0)
            throw DimensionError("tensor dimension must be positive in " + shape_string(shape));
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (data_.size() != shape_size(shape_))
        throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string(shape_));
}

Tensor Tensor::vector(std::span<const double> values) {
    return Tensor({values.size()}, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

} // namespace jforge
