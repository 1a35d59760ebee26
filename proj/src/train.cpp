/**
 * \file train.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/train.hpp"

#include "jforge/error.hpp"
#include "layer_ops.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <type_traits>
#include <variant>

namespace jforge {

using detail::Batch;

namespace {

std::size_t parse_count(const std::string &tok, const std::string &item) {
    std::size_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v == 0)
        throw InputError("bad size '" + tok + "' in architecture item '" + item + "'");
    return v;
}

Batch stack_inputs(std::span<const Sample> batch, std::size_t features) {
    Batch x(static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(batch.size()));
    for (std::size_t s = 0; s < batch.size(); ++s) {
        if (batch[s].x.size() != features)
            throw DimensionError("sample has " + std::to_string(batch[s].x.size()) + " features, network expects " +
                                 std::to_string(features));
        x.col(static_cast<Eigen::Index>(s)) =
            Eigen::Map<const Eigen::VectorXd>(batch[s].x.data(), static_cast<Eigen::Index>(features));
    }
    return x;
}

std::vector<Batch> trace_batch(const Network &net, const std::vector<Shape> &shapes, Batch x) {
    std::vector<Batch> trace;
    trace.reserve(net.layers.size() + 1);
    trace.push_back(std::move(x));
    for (std::size_t k = 0; k < net.layers.size(); ++k)
        trace.push_back(detail::forward_batch(net.layers[k], shapes[k], trace.back()));
    return trace;
}

void check_labels(std::span<const Sample> batch, std::size_t outputs) {
    const std::size_t classes = outputs == 1 ? 2 : outputs;
    for (const auto &s : batch)
        if (s.label >= classes)
            throw DataError("label " + std::to_string(s.label) + " out of range for " + std::to_string(classes) +
                            " classes");
}

// Loss summed over the batch, plus dL/d(start of backprop) and the layer index backprop starts below.
struct LossGrad {
    double total = 0.0;
    Batch grad;
    std::size_t start_layer = 0;
};

LossGrad loss_and_grad(const Network &net, const std::vector<Batch> &trace, std::span<const Sample> batch, Loss loss) {
    const std::size_t layers = net.layers.size();
    LossGrad out;
    if (loss == Loss::cross_entropy) {
        if (!net.ends_with_softmax())
            throw ConfigError("cross-entropy loss needs a network ending in softmax");
        const Batch &logits = trace[layers - 1];
        const Batch &probs = trace[layers];
        out.grad = probs;
        for (std::size_t s = 0; s < batch.size(); ++s) {
            const auto col = static_cast<Eigen::Index>(s);
            const auto label = static_cast<Eigen::Index>(batch[s].label);
            const double m = logits.col(col).maxCoeff();
            const double lse = m + std::log((logits.col(col).array() - m).exp().sum());
            out.total += lse - logits(label, col);
            out.grad(label, col) -= 1.0;
        }
        out.start_layer = layers - 1; // gradient is taken at the softmax input
    } else {
        const Batch &y = trace[layers];
        out.grad = y;
        for (std::size_t s = 0; s < batch.size(); ++s) {
            const auto col = static_cast<Eigen::Index>(s);
            if (y.rows() == 1)
                out.grad(0, col) -= static_cast<double>(batch[s].label);
            else
                out.grad(static_cast<Eigen::Index>(batch[s].label), col) -= 1.0;
            out.total += 0.5 * out.grad.col(col).squaredNorm();
        }
        out.start_layer = layers;
    }
    return out;
}

ParameterGradients zero_gradients(const Network &net) {
    ParameterGradients g;
    for (const auto &layer : net.layers)
        for (auto view : detail::parameter_views(layer))
            g.emplace_back(view.size(), 0.0);
    return g;
}

std::vector<std::size_t> parameter_offsets(const Network &net) {
    std::vector<std::size_t> offsets;
    std::size_t n = 0;
    for (const auto &layer : net.layers) {
        offsets.push_back(n);
        n += detail::parameter_views(layer).size();
    }
    return offsets;
}

ParameterGradients gradients_impl(const Network &net, const std::vector<Shape> &shapes, std::span<const Sample> batch,
                                  Loss loss, double *loss_out) {
    if (batch.empty())
        throw InputError("gradient batch is empty");
    check_labels(batch, shape_size(shapes.back()));
    const auto trace = trace_batch(net, shapes, stack_inputs(batch, net.input_size()));
    LossGrad lg = loss_and_grad(net, trace, batch, loss);

    ParameterGradients grads = zero_gradients(net);
    const auto offsets = parameter_offsets(net);
    Batch grad = std::move(lg.grad);
    for (std::size_t k = lg.start_layer; k-- > 0;) {
        const auto views = detail::parameter_views(net.layers[k]);
        std::vector<std::vector<double>> local;
        for (auto v : views)
            local.emplace_back(v.size(), 0.0);
        grad = detail::backward_batch(net.layers[k], shapes[k], trace[k], trace[k + 1], grad,
                                      views.empty() ? nullptr : &local);
        for (std::size_t p = 0; p < local.size(); ++p)
            grads[offsets[k] + p] = std::move(local[p]);
    }
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (auto &g : grads)
        for (auto &v : g)
            v *= scale;
    if (loss_out)
        *loss_out = lg.total * scale;
    return grads;
}

std::size_t count_correct(const Network &net, const std::vector<Shape> &shapes, std::span<const Sample> samples) {
    constexpr std::size_t chunk = 1000;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < samples.size(); start += chunk) {
        auto part = samples.subspan(start, std::min(chunk, samples.size() - start));
        const auto trace = trace_batch(net, shapes, stack_inputs(part, net.input_size()));
        const Batch &y = trace.back();
        for (std::size_t s = 0; s < part.size(); ++s) {
            const auto col = static_cast<Eigen::Index>(s);
            std::size_t predicted;
            if (y.rows() == 1)
                predicted = y(0, col) >= 0.5 ? 1 : 0;
            else
                predicted = argmax(std::span<const double>(y.col(col).data(), static_cast<std::size_t>(y.rows())));
            correct += predicted == part[s].label;
        }
    }
    return correct;
}

} // namespace

std::string loss_name(Loss loss) { return loss == Loss::cross_entropy ? "cross_entropy" : "mean_squared_error"; }

Loss parse_loss(const std::string &name) {
    if (name == "cross_entropy" || name == "ce")
        return Loss::cross_entropy;
    if (name == "mean_squared_error" || name == "mse")
        return Loss::mean_squared_error;
    throw InputError("unknown loss '" + name + "'");
}

Architecture parse_architecture(const Shape &input_shape, const std::string &text) {
    Architecture arch{input_shape, {}};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.empty())
            throw InputError("empty item in architecture '" + text + "'");
        arch.layers.push_back(item);
    }
    if (arch.layers.empty())
        throw InputError("architecture has no layers");
    return arch;
}

std::string architecture_string(const Architecture &arch) {
    std::string out;
    for (std::size_t i = 0; i < arch.layers.size(); ++i)
        out += (i ? "," : "") + arch.layers[i];
    return out;
}

Architecture architecture_of(const Network &net) {
    Architecture arch{net.input_shape, {}};
    for (const Layer &layer : net.layers) {
        arch.layers.push_back(std::visit(
            [](const auto &l) -> std::string {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Dense>)
                    return "dense:" + std::to_string(l.weights.rows());
                else if constexpr (std::is_same_v<T, Conv2D>) {
                    if (l.kernel_h != l.kernel_w)
                        throw ConfigError("architecture recipes only describe square kernels");
                    return "conv:" + std::to_string(l.count) + "x" + std::to_string(l.kernel_h) +
                           (l.stride == 1 ? "" : "/" + std::to_string(l.stride));
                } else if constexpr (std::is_same_v<T, MaxPool>)
                    return "maxpool:" + std::to_string(l.window);
                else if constexpr (std::is_same_v<T, AvgPool>)
                    return "avgpool:" + std::to_string(l.window);
                else if constexpr (std::is_same_v<T, Activation>)
                    return activation_name(l.kind);
                else if constexpr (std::is_same_v<T, Flatten>)
                    return "flatten";
                else
                    return "softmax";
            },
            layer));
    }
    return arch;
}

Network init_params(const Architecture &arch, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Network net;
    net.input_shape = arch.input_shape;
    Shape shape = arch.input_shape;
    for (const std::string &item : arch.layers) {
        const auto colon = item.find(':');
        const std::string kind = item.substr(0, colon);
        const std::string arg = colon == std::string::npos ? "" : item.substr(colon + 1);
        Layer layer;
        if (kind == "dense") {
            const std::size_t out = parse_count(arg, item);
            const std::size_t in = shape_size(shape);
            const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
            std::uniform_real_distribution<double> dist(-limit, limit);
            Dense d;
            d.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
            for (Eigen::Index r = 0; r < d.weights.rows(); ++r)
                for (Eigen::Index c = 0; c < d.weights.cols(); ++c)
                    d.weights(r, c) = dist(rng);
            d.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
            layer = std::move(d);
        } else if (kind == "conv") {
            const auto x = arg.find('x');
            if (x == std::string::npos)
                throw InputError("conv layer needs 'conv:<count>x<k>', got '" + item + "'");
            const auto slash = arg.find('/');
            Conv2D c;
            c.count = parse_count(arg.substr(0, x), item);
            c.kernel_h = c.kernel_w = parse_count(arg.substr(x + 1, slash == std::string::npos ? slash : slash - x - 1), item);
            c.stride = slash == std::string::npos ? 1 : parse_count(arg.substr(slash + 1), item);
            if (shape.size() != 3)
                throw DimensionError("conv layer '" + item + "' needs a (channels, height, width) input");
            c.channels = shape[0];
            const double fan_in = static_cast<double>(c.channels * c.kernel_h * c.kernel_w);
            const double fan_out = static_cast<double>(c.count * c.kernel_h * c.kernel_w);
            std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / (fan_in + fan_out)),
                                                        std::sqrt(6.0 / (fan_in + fan_out)));
            c.kernels.resize(c.count * c.channels * c.kernel_h * c.kernel_w);
            for (auto &k : c.kernels)
                k = dist(rng);
            c.bias.assign(c.count, 0.0);
            layer = std::move(c);
        } else if (kind == "maxpool") {
            layer = MaxPool{parse_count(arg, item)};
        } else if (kind == "avgpool") {
            layer = AvgPool{parse_count(arg, item)};
        } else if (kind == "flatten") {
            layer = Flatten{};
        } else if (kind == "softmax") {
            layer = Softmax{};
        } else {
            layer = Activation{parse_activation(kind)};
        }
        try {
            shape = layer_output_shape(layer, shape);
        } catch (const DimensionError &e) {
            throw DimensionError("layer " + std::to_string(net.layers.size()) + " (" + item + "): " + e.what());
        }
        net.layers.push_back(std::move(layer));
    }
    if (auto issues = validate(net); !issues.empty())
        throw DimensionError(issues.front().message);
    return net;
}

std::vector<std::span<double>> parameter_arrays(Network &net) {
    std::vector<std::span<double>> out;
    for (auto &layer : net.layers)
        for (auto v : detail::parameter_views(layer))
            out.push_back(v);
    return out;
}

double batch_loss(const Network &net, std::span<const Sample> batch, Loss loss) {
    if (batch.empty())
        throw InputError("loss batch is empty");
    const auto shapes = layer_shapes(net);
    check_labels(batch, shape_size(shapes.back()));
    const auto trace = trace_batch(net, shapes, stack_inputs(batch, net.input_size()));
    return loss_and_grad(net, trace, batch, loss).total / static_cast<double>(batch.size());
}

ParameterGradients backprop_gradients(const Network &net, std::span<const Sample> batch, Loss loss, double *loss_out) {
    return gradients_impl(net, layer_shapes(net), batch, loss, loss_out);
}

double accuracy(const Network &net, const LabeledDataset &data) {
    if (data.empty())
        return 0.0;
    const auto shapes = layer_shapes(net);
    return static_cast<double>(count_correct(net, shapes, data.samples)) / static_cast<double>(data.size());
}

TrainResult sgd_train(Network net, const LabeledDataset &train, const TrainConfig &config, const LabeledDataset *test) {
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
        throw InputError("learning rate must be positive and finite");
    if (config.batch_size == 0)
        throw InputError("batch size must be positive");
    if (train.empty())
        throw InputError("training set is empty");
    if (config.batch_size > train.size())
        throw InputError("batch size " + std::to_string(config.batch_size) + " exceeds dataset size " +
                         std::to_string(train.size()));
    const auto shapes = layer_shapes(net);
    check_labels(train.samples, shape_size(shapes.back()));

    TrainResult result;
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Sample> batch;
    batch.reserve(config.batch_size);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(rng)]);
        }
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i)
                batch.push_back(train.samples[order[i]]);
            double loss = 0.0;
            const auto grads = gradients_impl(net, shapes, batch, config.loss, &loss);
            if (!std::isfinite(loss))
                throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                      std::to_string(batch_index));
            loss_sum += loss * static_cast<double>(batch.size());
            auto params = parameter_arrays(net);
            for (std::size_t p = 0; p < params.size(); ++p)
                for (std::size_t i = 0; i < params[p].size(); ++i)
                    params[p][i] -= config.learning_rate * grads[p][i];
        }
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.loss = loss_sum / static_cast<double>(train.size());
        rec.train_accuracy =
            static_cast<double>(count_correct(net, shapes, train.samples)) / static_cast<double>(train.size());
        if (test && !test->empty())
            rec.test_accuracy =
                static_cast<double>(count_correct(net, shapes, test->samples)) / static_cast<double>(test->size());
        result.history.push_back(rec);
    }
    result.network = std::move(net);
    return result;
}

TrainResult augment_retrain(const Architecture &arch, const LabeledDataset &data, const LabeledDataset &adversarial,
                            const TrainConfig &config, const LabeledDataset *test) {
    check_dataset(adversarial);
    return sgd_train(init_params(arch, config.seed), concat(data, adversarial), config, test);
}

void write_history_csv(std::ostream &os, const std::vector<EpochRecord> &history) {
    os << "epoch,loss,train_acc,test_acc\n" << std::setprecision(17);
    for (const auto &r : history) {
        os << r.epoch << ',' << r.loss << ',' << r.train_accuracy << ',';
        if (r.test_accuracy)
            os << *r.test_accuracy;
        os << '\n';
    }
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

int and_truth(double x1, double x2) { return (round_half_up(x1) == 1 && round_half_up(x2) == 1) ? 1 : 0; }

LabeledDataset and_dataset(std::size_t count) {
    static constexpr double corners[4][2] = {{1, 1}, {1, 0}, {0, 1}, {0, 0}};
    LabeledDataset data;
    data.class_count = 2;
    for (std::size_t i = 0; i < count; ++i) {
        const auto &c = corners[i % 4];
        data.samples.push_back({Tensor({2}, {c[0], c[1]}), static_cast<std::size_t>(and_truth(c[0], c[1]))});
    }
    return data;
}

} // namespace jforge
