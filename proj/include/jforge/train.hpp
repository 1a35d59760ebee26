/**
 * \file train.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#ifndef JFORGE_TRAIN_HPP
#define JFORGE_TRAIN_HPP

#include "jforge/dataset.hpp"
#include "jforge/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jforge {

enum class Loss {
    cross_entropy,     ///< -log softmax(z)_label; the network must end in Softmax
    mean_squared_error ///< 1/2 sum_j (y_j - target_j)^2, one-hot targets, or the label itself for one output
};

std::string loss_name(Loss loss);
Loss parse_loss(const std::string &name);

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 20;
    std::size_t batch_size = 500;
    std::uint64_t seed = 0;
    Loss loss = Loss::cross_entropy;
};

/**
 * Layer recipe without parameters. Text form, comma separated:
 * `dense:<out>`, `conv:<count>x<k>[/<stride>]`, `maxpool:<w>`, `avgpool:<w>`,
 * `sigmoid`, `relu`, `tanh`, `flatten`, `softmax`.
 */
struct Architecture {
    Shape input_shape;
    std::vector<std::string> layers;
};

Architecture parse_architecture(const Shape &input_shape, const std::string &text);
std::string architecture_string(const Architecture &arch);
/// Recipe that init_params would turn into a network shaped like `net`. Throws ConfigError for non-square kernels.
Architecture architecture_of(const Network &net);

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
Network init_params(const Architecture &arch, std::uint64_t seed);

/// One flat gradient array per parameter array, in network order (dense: weights column-major, bias).
using ParameterGradients = std::vector<std::vector<double>>;

/// Flat views of every parameter array, matching ParameterGradients order.
std::vector<std::span<double>> parameter_arrays(Network &net);

/// Mean loss over `batch`.
double batch_loss(const Network &net, std::span<const Sample> batch, Loss loss);

/// Gradients of the mean batch loss; throws DataError when a label is out of range.
ParameterGradients backprop_gradients(const Network &net, std::span<const Sample> batch, Loss loss,
                                      double *loss_out = nullptr);

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    std::optional<double> test_accuracy;
};

struct TrainResult {
    Network network;
    std::vector<EpochRecord> history;
};

/**
 * Plain minibatch SGD. The sample order is reshuffled every epoch from one
 * generator seeded with config.seed, so a run is reproducible bit for bit.
 */
TrainResult sgd_train(Network net, const LabeledDataset &train, const TrainConfig &config,
                      const LabeledDataset *test = nullptr);

/**
 * Fraction of samples predicted correctly. Single-output networks are read
 * as binary classifiers: class 1 when F(x) >= 0.5.
 */
double accuracy(const Network &net, const LabeledDataset &data);

/// Trains a freshly initialised `arch` on the union of `data` and `adversarial`.
TrainResult augment_retrain(const Architecture &arch, const LabeledDataset &data, const LabeledDataset &adversarial,
                            const TrainConfig &config, const LabeledDataset *test = nullptr);

/// `epoch,loss,train_acc,test_acc` rows.
void write_history_csv(std::ostream &os, const std::vector<EpochRecord> &history);

/// Rounds to the nearest integer with halves going up.
int round_half_up(double v);
/// Boolean AND of the rounded inputs.
int and_truth(double x1, double x2);
/// `count` samples cycling through (1,1), (1,0), (0,1), (0,0) with AND labels.
LabeledDataset and_dataset(std::size_t count = 1000);

} // namespace jforge

#endif // JFORGE_TRAIN_HPP
