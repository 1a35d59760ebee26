/**
 * \file tensor.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#ifndef JFORGE_TENSOR_HPP
#define JFORGE_TENSOR_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace jforge {

using Shape = std::vector<std::size_t>;

/// Number of elements described by a shape.
std::size_t shape_size(const Shape &shape);
std::string shape_string(const Shape &shape);

/**
 * Dense row-major array of doubles tagged with its shape.
 *
 * The shape is never empty and every dimension is at least one, so a tensor
 * always holds at least one value.
 */
class Tensor {
public:
    Tensor() : shape_{1}, data_(1, 0.0) {}
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    /// 1-D tensor holding a copy of `values`.
    static Tensor vector(std::span<const double> values);

    const Shape &shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    double &operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    double *data() { return data_.data(); }
    const double *data() const { return data_.data(); }

    /// Same data viewed under a different shape of equal size.
    Tensor reshaped(Shape shape) const;

    bool operator==(const Tensor &other) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

} // namespace jforge

#endif // JFORGE_TENSOR_HPP
