/**
 * \file layer_ops.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "layer_ops.hpp"

#include "jforge/error.hpp"

#include <cmath>
#include <limits>

namespace jforge::detail {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

struct ImageDims {
    std::size_t c, h, w;
};

ImageDims image_dims(const Shape &s) {
    if (s.size() != 3)
        throw DimensionError("expected a (channels, height, width) input, got " + shape_string(s));
    return {s[0], s[1], s[2]};
}

// Flat index of the winning element in each pooling window, lowest index on ties.
template <class Fn>
void for_each_window(const ImageDims &d, std::size_t window, Fn &&fn) {
    const std::size_t oh = d.h / window, ow = d.w / window;
    for (std::size_t c = 0; c < d.c; ++c)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                const std::size_t out = (c * oh + oy) * ow + ox;
                fn(out, c, oy * window, ox * window);
            }
}

std::size_t max_winner(const ImageDims &d, std::size_t window, std::size_t c, std::size_t y0, std::size_t x0,
                       const double *col) {
    std::size_t best = (c * d.h + y0) * d.w + x0;
    for (std::size_t ky = 0; ky < window; ++ky)
        for (std::size_t kx = 0; kx < window; ++kx) {
            const std::size_t idx = (c * d.h + y0 + ky) * d.w + x0 + kx;
            if (col[idx] > col[best])
                best = idx;
        }
    return best;
}

template <class Fn>
void for_each_conv_tap(const Conv2D &conv, const ImageDims &d, Fn &&fn) {
    const std::size_t oh = (d.h - conv.kernel_h) / conv.stride + 1;
    const std::size_t ow = (d.w - conv.kernel_w) / conv.stride + 1;
    for (std::size_t o = 0; o < conv.count; ++o)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                const std::size_t out = (o * oh + oy) * ow + ox;
                for (std::size_t c = 0; c < conv.channels; ++c)
                    for (std::size_t ky = 0; ky < conv.kernel_h; ++ky)
                        for (std::size_t kx = 0; kx < conv.kernel_w; ++kx) {
                            const std::size_t in =
                                (c * d.h + oy * conv.stride + ky) * d.w + ox * conv.stride + kx;
                            const std::size_t k = ((o * conv.channels + c) * conv.kernel_h + ky) * conv.kernel_w + kx;
                            fn(o, out, in, k);
                        }
            }
}

std::size_t conv_out_size(const Conv2D &conv, const ImageDims &d) {
    return conv.count * ((d.h - conv.kernel_h) / conv.stride + 1) * ((d.w - conv.kernel_w) / conv.stride + 1);
}

} // namespace

double activate(ActivationKind kind, double z) {
    switch (kind) {
    case ActivationKind::sigmoid:
        return 1.0 / (1.0 + std::exp(-z));
    case ActivationKind::relu:
        return z > 0.0 ? z : 0.0;
    case ActivationKind::tanh:
        return std::tanh(z);
    }
    return z;
}

double activate_derivative(ActivationKind kind, double z, double y) {
    switch (kind) {
    case ActivationKind::sigmoid:
        return y * (1.0 - y);
    case ActivationKind::relu:
        return z > 0.0 ? 1.0 : 0.0;
    case ActivationKind::tanh:
        return 1.0 - y * y;
    }
    return 1.0;
}

Batch forward_batch(const Layer &layer, const Shape &in_shape, const Batch &in) {
    return std::visit(
        overloaded{
            [&](const Dense &d) -> Batch {
                Batch out = d.weights * in;
                out.colwise() += d.bias;
                return out;
            },
            [&](const Conv2D &conv) -> Batch {
                const auto dims = image_dims(in_shape);
                Batch out(conv_out_size(conv, dims), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double *x = in.col(s).data();
                    double *y = out.col(s).data();
                    const std::size_t per = out.rows() / conv.count;
                    for (std::size_t o = 0; o < conv.count; ++o)
                        for (std::size_t j = 0; j < per; ++j)
                            y[o * per + j] = conv.bias[o];
                    for_each_conv_tap(conv, dims, [&](std::size_t, std::size_t oi, std::size_t ii, std::size_t k) {
                        y[oi] += conv.kernels[k] * x[ii];
                    });
                }
                return out;
            },
            [&](const MaxPool &p) -> Batch {
                const auto dims = image_dims(in_shape);
                Batch out(dims.c * (dims.h / p.window) * (dims.w / p.window), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double *x = in.col(s).data();
                    for_each_window(dims, p.window, [&](std::size_t o, std::size_t c, std::size_t y0, std::size_t x0) {
                        out(o, s) = x[max_winner(dims, p.window, c, y0, x0, x)];
                    });
                }
                return out;
            },
            [&](const AvgPool &p) -> Batch {
                const auto dims = image_dims(in_shape);
                const double scale = 1.0 / static_cast<double>(p.window * p.window);
                Batch out(dims.c * (dims.h / p.window) * (dims.w / p.window), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double *x = in.col(s).data();
                    for_each_window(dims, p.window, [&](std::size_t o, std::size_t c, std::size_t y0, std::size_t x0) {
                        double acc = 0.0;
                        for (std::size_t ky = 0; ky < p.window; ++ky)
                            for (std::size_t kx = 0; kx < p.window; ++kx)
                                acc += x[(c * dims.h + y0 + ky) * dims.w + x0 + kx];
                        out(o, s) = acc * scale;
                    });
                }
                return out;
            },
            [&](const Activation &a) -> Batch { return in.unaryExpr([&](double z) { return activate(a.kind, z); }); },
            [&](const Flatten &) -> Batch { return in; },
            [&](const Softmax &) -> Batch {
                Batch out(in.rows(), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double m = in.col(s).maxCoeff();
                    out.col(s) = (in.col(s).array() - m).exp().matrix();
                    out.col(s) /= out.col(s).sum();
                }
                return out;
            },
        },
        layer);
}

Batch backward_batch(const Layer &layer, const Shape &in_shape, const Batch &in, const Batch &out,
                     const Batch &grad_out, std::vector<std::vector<double>> *param_grads) {
    auto add_into = [](std::vector<double> &dst, const double *src, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i)
            dst[i] += src[i];
    };
    return std::visit(
        overloaded{
            [&](const Dense &d) -> Batch {
                if (param_grads) {
                    const Eigen::MatrixXd dw = grad_out * in.transpose();
                    const Eigen::VectorXd db = grad_out.rowwise().sum();
                    add_into((*param_grads)[0], dw.data(), static_cast<std::size_t>(dw.size()));
                    add_into((*param_grads)[1], db.data(), static_cast<std::size_t>(db.size()));
                }
                return d.weights.transpose() * grad_out;
            },
            [&](const Conv2D &conv) -> Batch {
                const auto dims = image_dims(in_shape);
                Batch grad_in = Batch::Zero(in.rows(), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double *x = in.col(s).data();
                    const double *g = grad_out.col(s).data();
                    double *gi = grad_in.col(s).data();
                    for_each_conv_tap(conv, dims, [&](std::size_t, std::size_t oi, std::size_t ii, std::size_t k) {
                        gi[ii] += conv.kernels[k] * g[oi];
                        if (param_grads)
                            (*param_grads)[0][k] += g[oi] * x[ii];
                    });
                    if (param_grads) {
                        const std::size_t per = static_cast<std::size_t>(grad_out.rows()) / conv.count;
                        for (std::size_t o = 0; o < conv.count; ++o)
                            for (std::size_t j = 0; j < per; ++j)
                                (*param_grads)[1][o] += g[o * per + j];
                    }
                }
                return grad_in;
            },
            [&](const MaxPool &p) -> Batch {
                const auto dims = image_dims(in_shape);
                Batch grad_in = Batch::Zero(in.rows(), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double *x = in.col(s).data();
                    for_each_window(dims, p.window, [&](std::size_t o, std::size_t c, std::size_t y0, std::size_t x0) {
                        grad_in(static_cast<Eigen::Index>(max_winner(dims, p.window, c, y0, x0, x)), s) +=
                            grad_out(o, s);
                    });
                }
                return grad_in;
            },
            [&](const AvgPool &p) -> Batch {
                const auto dims = image_dims(in_shape);
                const double scale = 1.0 / static_cast<double>(p.window * p.window);
                Batch grad_in = Batch::Zero(in.rows(), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s)
                    for_each_window(dims, p.window, [&](std::size_t o, std::size_t c, std::size_t y0, std::size_t x0) {
                        for (std::size_t ky = 0; ky < p.window; ++ky)
                            for (std::size_t kx = 0; kx < p.window; ++kx)
                                grad_in((c * dims.h + y0 + ky) * dims.w + x0 + kx, s) += grad_out(o, s) * scale;
                    });
                return grad_in;
            },
            [&](const Activation &a) -> Batch {
                Batch grad_in(in.rows(), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s)
                    for (Eigen::Index i = 0; i < in.rows(); ++i)
                        grad_in(i, s) = grad_out(i, s) * activate_derivative(a.kind, in(i, s), out(i, s));
                return grad_in;
            },
            [&](const Flatten &) -> Batch { return grad_out; },
            [&](const Softmax &) -> Batch {
                Batch grad_in(in.rows(), in.cols());
                for (Eigen::Index s = 0; s < in.cols(); ++s) {
                    const double dot = out.col(s).dot(grad_out.col(s));
                    grad_in.col(s) = out.col(s).cwiseProduct(grad_out.col(s)) - out.col(s) * dot;
                }
                return grad_in;
            },
        },
        layer);
}

JacobianMatrix pushforward(const Layer &layer, const Shape &in_shape, std::span<const double> in,
                           std::span<const double> out, const JacobianMatrix &jac_in) {
    if (static_cast<std::size_t>(jac_in.rows()) != in.size())
        throw DimensionError("seed Jacobian has " + std::to_string(jac_in.rows()) + " rows, layer input has " +
                             std::to_string(in.size()) + " values");
    const Eigen::Index cols = jac_in.cols();
    return std::visit(
        overloaded{
            [&](const Dense &d) -> JacobianMatrix { return d.weights * jac_in; },
            [&](const Conv2D &conv) -> JacobianMatrix {
                const auto dims = image_dims(in_shape);
                JacobianMatrix j = JacobianMatrix::Zero(static_cast<Eigen::Index>(out.size()), cols);
                for_each_conv_tap(conv, dims, [&](std::size_t, std::size_t oi, std::size_t ii, std::size_t k) {
                    j.row(oi) += conv.kernels[k] * jac_in.row(ii);
                });
                return j;
            },
            [&](const MaxPool &p) -> JacobianMatrix {
                const auto dims = image_dims(in_shape);
                JacobianMatrix j(static_cast<Eigen::Index>(out.size()), cols);
                for_each_window(dims, p.window, [&](std::size_t o, std::size_t c, std::size_t y0, std::size_t x0) {
                    j.row(o) = jac_in.row(max_winner(dims, p.window, c, y0, x0, in.data()));
                });
                return j;
            },
            [&](const AvgPool &p) -> JacobianMatrix {
                const auto dims = image_dims(in_shape);
                const double scale = 1.0 / static_cast<double>(p.window * p.window);
                JacobianMatrix j = JacobianMatrix::Zero(static_cast<Eigen::Index>(out.size()), cols);
                for_each_window(dims, p.window, [&](std::size_t o, std::size_t c, std::size_t y0, std::size_t x0) {
                    for (std::size_t ky = 0; ky < p.window; ++ky)
                        for (std::size_t kx = 0; kx < p.window; ++kx)
                            j.row(o) += jac_in.row((c * dims.h + y0 + ky) * dims.w + x0 + kx);
                    j.row(o) *= scale;
                });
                return j;
            },
            [&](const Activation &a) -> JacobianMatrix {
                JacobianMatrix j = jac_in;
                for (std::size_t i = 0; i < in.size(); ++i)
                    j.row(i) *= activate_derivative(a.kind, in[i], out[i]);
                return j;
            },
            [&](const Flatten &) -> JacobianMatrix { return jac_in; },
            [&](const Softmax &) -> JacobianMatrix {
                // (diag(y) - y y^T) J
                const Eigen::Map<const Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
                const Eigen::RowVectorXd yj = y.transpose() * jac_in;
                JacobianMatrix j = jac_in;
                for (Eigen::Index i = 0; i < j.rows(); ++i)
                    j.row(i) = y[i] * (jac_in.row(i) - yj);
                return j;
            },
        },
        layer);
}

std::vector<std::span<double>> parameter_views(Layer &layer) {
    if (auto *d = std::get_if<Dense>(&layer))
        return {std::span<double>(d->weights.data(), static_cast<std::size_t>(d->weights.size())),
                std::span<double>(d->bias.data(), static_cast<std::size_t>(d->bias.size()))};
    if (auto *c = std::get_if<Conv2D>(&layer))
        return {std::span<double>(c->kernels), std::span<double>(c->bias)};
    return {};
}

std::vector<std::span<const double>> parameter_views(const Layer &layer) {
    std::vector<std::span<const double>> out;
    for (auto v : parameter_views(const_cast<Layer &>(layer)))
        out.emplace_back(v.data(), v.size());
    return out;
}

} // namespace jforge::detail
