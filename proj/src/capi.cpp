/**
 * \file capi.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/jforge.h"

#include "jforge/craft.hpp"
#include "jforge/dataio.hpp"
#include "jforge/error.hpp"
#include "jforge/metrics.hpp"
#include "jforge/model_io.hpp"
#include "jforge/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct jf_network {
    jforge::Network net;
};

struct jf_dataset {
    jforge::LabeledDataset data;
    std::size_t features = 0; ///< fixed feature count for jf_dataset_add, 0 when taken from the first sample
};

struct jf_history {
    std::vector<jforge::EpochRecord> records;
};

struct jf_results {
    std::vector<jforge::CampaignRow> rows;
};

namespace {

thread_local std::string last_error;

constexpr double undefined = std::numeric_limits<double>::quiet_NaN();

jf_status fail(jf_status status, const std::string &message) {
    last_error = message;
    return status;
}

template <typename F>
jf_status guard(F &&body) {
    try {
        last_error.clear();
        body();
        return JF_OK;
    } catch (const jforge::DimensionError &e) {
        return fail(JF_ERR_DIMENSION, e.what());
    } catch (const jforge::ParseError &e) {
        return fail(JF_ERR_PARSE, e.what());
    } catch (const jforge::VersionError &e) {
        return fail(JF_ERR_VERSION, e.what());
    } catch (const jforge::InputError &e) {
        return fail(JF_ERR_INPUT, e.what());
    } catch (const jforge::IndexError &e) {
        return fail(JF_ERR_INDEX, e.what());
    } catch (const jforge::DataError &e) {
        return fail(JF_ERR_DATA, e.what());
    } catch (const jforge::DivergenceError &e) {
        return fail(JF_ERR_DIVERGENCE, e.what());
    } catch (const jforge::ConfigError &e) {
        return fail(JF_ERR_CONFIG, e.what());
    } catch (const jforge::IoError &e) {
        return fail(JF_ERR_IO, e.what());
    } catch (const std::bad_alloc &) {
        return fail(JF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(JF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(JF_ERR_INTERNAL, "unknown error");
    }
}

#define JF_REQUIRE(ptr)                                                                                                \
    do {                                                                                                               \
        if (!(ptr))                                                                                                    \
            return fail(JF_ERR_NULL, "null argument: " #ptr);                                                          \
    } while (0)

jforge::Tensor vector_tensor(const double *x, std::size_t n) { return jforge::Tensor({n}, std::vector<double>(x, x + n)); }

/// Input tensor shaped like the network input.
jforge::Tensor network_input(const jforge::Network &net, const double *x, std::size_t n) {
    if (n != net.input_size())
        throw jforge::DimensionError("input has " + std::to_string(n) + " values, network expects " +
                                     std::to_string(net.input_size()));
    return jforge::Tensor(net.input_shape, std::vector<double>(x, x + n));
}

jforge::CraftParams to_params(const jf_craft_params *p) {
    jforge::CraftParams out;
    if (!p)
        return out;
    out.upsilon = p->upsilon;
    out.theta = p->theta;
    out.variant = p->variant == JF_VARIANT_DECREASE ? jforge::Variant::decrease : jforge::Variant::increase;
    out.tap = p->tap == JF_TAP_PROBABILITIES ? jforge::Tap::probabilities : jforge::Tap::logits;
    out.prefilter = p->prefilter;
    return out;
}

jforge::TrainConfig to_config(const jf_train_config *c) {
    jforge::TrainConfig out;
    if (!c)
        return out;
    out.learning_rate = c->learning_rate;
    out.epochs = c->epochs;
    out.batch_size = c->batch_size;
    out.seed = c->seed;
    out.loss = c->loss == JF_LOSS_MSE ? jforge::Loss::mean_squared_error : jforge::Loss::cross_entropy;
    return out;
}

jf_failure to_failure(jforge::FailureReason r) {
    switch (r) {
    case jforge::FailureReason::budget_exhausted:
        return JF_FAILURE_BUDGET_EXHAUSTED;
    case jforge::FailureReason::domain_exhausted:
        return JF_FAILURE_DOMAIN_EXHAUSTED;
    case jforge::FailureReason::no_valid_pair:
        return JF_FAILURE_NO_VALID_PAIR;
    default:
        return JF_FAILURE_NONE;
    }
}

void fill_info(const jforge::CraftResult &r, jf_craft_info *info) {
    if (!info)
        return;
    info->success = r.success ? 1 : 0;
    info->iterations = r.iterations;
    info->distortion_pct = r.distortion_pct;
    info->failure = to_failure(r.failure);
    info->source = r.source;
    info->target = r.target;
}

void copy_out(const jforge::Tensor &t, double *out, std::size_t n) {
    if (!out)
        return;
    if (n != t.size())
        throw jforge::DimensionError("output buffer holds " + std::to_string(n) + " values, need " +
                                     std::to_string(t.size()));
    std::copy(t.values().begin(), t.values().end(), out);
}

void copy_matrix(const jforge::ClassMatrix &m, double *out) {
    for (std::size_t s = 0; s < m.classes(); ++s)
        for (std::size_t t = 0; t < m.classes(); ++t)
            out[s * m.classes() + t] = m.get(s, t).value_or(undefined);
}

std::vector<jforge::CraftResult> results_of(const jf_results *r) {
    std::vector<jforge::CraftResult> out;
    out.reserve(r->rows.size());
    for (const auto &row : r->rows)
        out.push_back(row.result);
    return out;
}

} // namespace

extern "C" {

const char *jf_version(void) { return "1.0.0"; }

const char *jf_last_error(void) { return last_error.c_str(); }

const char *jf_status_name(jf_status status) {
    switch (status) {
    case JF_OK:
        return "ok";
    case JF_ERR_NULL:
        return "null argument";
    case JF_ERR_DIMENSION:
        return "dimension error";
    case JF_ERR_PARSE:
        return "parse error";
    case JF_ERR_VERSION:
        return "version error";
    case JF_ERR_INPUT:
        return "input error";
    case JF_ERR_INDEX:
        return "index error";
    case JF_ERR_DATA:
        return "data error";
    case JF_ERR_DIVERGENCE:
        return "divergence error";
    case JF_ERR_CONFIG:
        return "configuration error";
    case JF_ERR_IO:
        return "i/o error";
    case JF_ERR_BUFFER:
        return "buffer too small";
    case JF_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char *jf_failure_name(jf_failure failure) {
    switch (failure) {
    case JF_FAILURE_NONE:
        return "none";
    case JF_FAILURE_BUDGET_EXHAUSTED:
        return "budget_exhausted";
    case JF_FAILURE_DOMAIN_EXHAUSTED:
        return "domain_exhausted";
    case JF_FAILURE_NO_VALID_PAIR:
        return "no_valid_pair";
    }
    return "unknown";
}

void jf_craft_params_default(jf_craft_params *params) {
    if (!params)
        return;
    const jforge::CraftParams d;
    params->upsilon = d.upsilon;
    params->theta = d.theta;
    params->variant = JF_VARIANT_INCREASE;
    params->tap = JF_TAP_LOGITS;
    params->prefilter = d.prefilter;
}

void jf_train_config_default(jf_train_config *config) {
    if (!config)
        return;
    const jforge::TrainConfig d;
    config->learning_rate = d.learning_rate;
    config->epochs = d.epochs;
    config->batch_size = d.batch_size;
    config->seed = d.seed;
    config->loss = JF_LOSS_CROSS_ENTROPY;
}

jf_status jf_network_init(const size_t *input_shape, size_t rank, const char *architecture, uint64_t seed,
                          jf_network **out) {
    JF_REQUIRE(input_shape);
    JF_REQUIRE(architecture);
    JF_REQUIRE(out);
    return guard([&] {
        const jforge::Shape shape(input_shape, input_shape + rank);
        auto net = jforge::init_params(jforge::parse_architecture(shape, architecture), seed);
        *out = new jf_network{std::move(net)};
    });
}

jf_status jf_network_load(const char *path, jf_network **out) {
    JF_REQUIRE(path);
    JF_REQUIRE(out);
    return guard([&] { *out = new jf_network{jforge::load_model(path)}; });
}

jf_status jf_network_save(const jf_network *net, const char *path) {
    JF_REQUIRE(net);
    JF_REQUIRE(path);
    return guard([&] { jforge::save_model(net->net, path); });
}

void jf_network_free(jf_network *net) { delete net; }

size_t jf_network_input_size(const jf_network *net) { return net ? net->net.input_size() : 0; }

size_t jf_network_output_dim(const jf_network *net) { return net ? net->net.output_dim() : 0; }

jf_status jf_network_architecture(const jf_network *net, char *buffer, size_t size) {
    JF_REQUIRE(net);
    JF_REQUIRE(buffer);
    std::string text;
    const jf_status status = guard([&] { text = jforge::architecture_string(jforge::architecture_of(net->net)); });
    if (status != JF_OK)
        return status;
    if (text.size() + 1 > size)
        return fail(JF_ERR_BUFFER, "architecture needs " + std::to_string(text.size() + 1) + " bytes");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return JF_OK;
}

jf_status jf_network_evaluate(const jf_network *net, const double *x, size_t n, double *y, size_t ny) {
    JF_REQUIRE(net);
    JF_REQUIRE(x);
    JF_REQUIRE(y);
    return guard([&] { copy_out(jforge::evaluate(net->net, network_input(net->net, x, n)), y, ny); });
}

jf_status jf_network_predict(const jf_network *net, const double *x, size_t n, size_t *label) {
    JF_REQUIRE(net);
    JF_REQUIRE(x);
    JF_REQUIRE(label);
    return guard([&] { *label = jforge::predict_label(net->net, network_input(net->net, x, n)); });
}

jf_status jf_network_jacobian(const jf_network *net, const double *x, size_t n, jf_tap tap, double *out,
                              size_t out_len) {
    JF_REQUIRE(net);
    JF_REQUIRE(x);
    JF_REQUIRE(out);
    return guard([&] {
        const auto jac = jforge::forward_derivative(net->net, network_input(net->net, x, n),
                                                    tap == JF_TAP_LOGITS ? jforge::Tap::logits
                                                                         : jforge::Tap::probabilities);
        const auto total = static_cast<std::size_t>(jac.values.size());
        if (out_len != total)
            throw jforge::DimensionError("jacobian buffer holds " + std::to_string(out_len) + " values, need " +
                                         std::to_string(total));
        std::copy(jac.values.data(), jac.values.data() + total, out);
    });
}

jf_status jf_dataset_load_idx(const char *images, const char *labels, size_t limit, int use_seed, uint64_t seed,
                              jf_dataset **out) {
    JF_REQUIRE(images);
    JF_REQUIRE(labels);
    JF_REQUIRE(out);
    return guard([&] {
        jforge::SubsetOptions subset{limit, {}};
        if (use_seed)
            subset.seed = seed;
        *out = new jf_dataset{jforge::load_mnist(images, labels, subset)};
    });
}

jf_status jf_dataset_create(size_t feature_count, size_t class_count, jf_dataset **out) {
    JF_REQUIRE(out);
    if (feature_count == 0 || class_count == 0)
        return fail(JF_ERR_INPUT, "dataset needs at least one feature and one class");
    return guard([&] { *out = new jf_dataset{jforge::LabeledDataset{{}, class_count}, feature_count}; });
}

jf_status jf_dataset_add(jf_dataset *data, const double *x, size_t n, size_t label) {
    JF_REQUIRE(data);
    JF_REQUIRE(x);
    return guard([&] {
        const std::size_t expected = data->features ? data->features
                                     : data->data.empty() ? n
                                                          : data->data.samples.front().x.size();
        if (n != expected)
            throw jforge::DimensionError("sample has " + std::to_string(n) + " features, dataset has " +
                                         std::to_string(expected));
        if (label >= data->data.class_count)
            throw jforge::DataError("label " + std::to_string(label) + " out of range for " +
                                    std::to_string(data->data.class_count) + " classes");
        for (std::size_t i = 0; i < n; ++i)
            if (!(x[i] >= 0.0 && x[i] <= 1.0))
                throw jforge::DataError("feature " + std::to_string(i) + " outside [0,1]");
        data->data.samples.push_back({vector_tensor(x, n), label});
    });
}

jf_status jf_dataset_and(size_t count, jf_dataset **out) {
    JF_REQUIRE(out);
    return guard([&] { *out = new jf_dataset{jforge::and_dataset(count)}; });
}

jf_status jf_dataset_concat(const jf_dataset *a, const jf_dataset *b, jf_dataset **out) {
    JF_REQUIRE(a);
    JF_REQUIRE(b);
    JF_REQUIRE(out);
    return guard([&] { *out = new jf_dataset{jforge::concat(a->data, b->data)}; });
}

void jf_dataset_free(jf_dataset *data) { delete data; }

size_t jf_dataset_size(const jf_dataset *data) { return data ? data->data.size() : 0; }

size_t jf_dataset_feature_count(const jf_dataset *data) {
    if (!data)
        return 0;
    return data->data.empty() ? data->features : data->data.samples.front().x.size();
}

size_t jf_dataset_class_count(const jf_dataset *data) { return data ? data->data.class_count : 0; }

jf_status jf_dataset_sample(const jf_dataset *data, size_t index, double *x, size_t n, size_t *label) {
    JF_REQUIRE(data);
    return guard([&] {
        if (index >= data->data.size())
            throw jforge::IndexError("sample " + std::to_string(index) + " out of range");
        const auto &s = data->data.samples[index];
        copy_out(s.x, x, n);
        if (label)
            *label = s.label;
    });
}

jf_status jf_train(jf_network *net, const jf_dataset *train, const jf_dataset *test, const jf_train_config *config,
                   jf_history **history) {
    JF_REQUIRE(net);
    JF_REQUIRE(train);
    return guard([&] {
        auto result = jforge::sgd_train(net->net, train->data, to_config(config), test ? &test->data : nullptr);
        net->net = std::move(result.network);
        if (history)
            *history = new jf_history{std::move(result.history)};
    });
}

jf_status jf_retrain(const jf_network *like, const jf_dataset *data, const jf_dataset *adversarial,
                     const jf_dataset *test, const jf_train_config *config, jf_network **out, jf_history **history) {
    JF_REQUIRE(like);
    JF_REQUIRE(data);
    JF_REQUIRE(adversarial);
    JF_REQUIRE(out);
    return guard([&] {
        auto result = jforge::augment_retrain(jforge::architecture_of(like->net), data->data, adversarial->data,
                                              to_config(config), test ? &test->data : nullptr);
        *out = new jf_network{std::move(result.network)};
        if (history)
            *history = new jf_history{std::move(result.history)};
    });
}

jf_status jf_accuracy(const jf_network *net, const jf_dataset *data, double *out) {
    JF_REQUIRE(net);
    JF_REQUIRE(data);
    JF_REQUIRE(out);
    return guard([&] { *out = jforge::accuracy(net->net, data->data); });
}

size_t jf_history_size(const jf_history *history) { return history ? history->records.size() : 0; }

jf_status jf_history_get(const jf_history *history, size_t index, jf_epoch *out) {
    JF_REQUIRE(history);
    JF_REQUIRE(out);
    if (index >= history->records.size())
        return fail(JF_ERR_INDEX, "epoch " + std::to_string(index) + " out of range");
    const auto &r = history->records[index];
    *out = {r.epoch, r.loss, r.train_accuracy, r.test_accuracy.value_or(undefined)};
    return JF_OK;
}

jf_status jf_history_write_csv(const jf_history *history, const char *path) {
    JF_REQUIRE(history);
    JF_REQUIRE(path);
    return guard([&] {
        jforge::write_file_atomic(path, [&](std::ostream &os) { jforge::write_history_csv(os, history->records); });
    });
}

void jf_history_free(jf_history *history) { delete history; }

jf_status jf_craft(const jf_network *net, const double *x, size_t n, size_t target, const jf_craft_params *params,
                   double *x_star, jf_craft_info *info) {
    JF_REQUIRE(net);
    JF_REQUIRE(x);
    return guard([&] {
        const auto r = jforge::craft(net->net, network_input(net->net, x, n), target, to_params(params));
        copy_out(r.x_star, x_star, n);
        fill_info(r, info);
    });
}

jf_status jf_craft_from_empty(const jf_network *net, size_t target, const jf_craft_params *params, double *x_star,
                              size_t n, jf_craft_info *info) {
    JF_REQUIRE(net);
    return guard([&] {
        const auto r = jforge::craft_from_empty(net->net, target, to_params(params));
        copy_out(r.x_star, x_star, n);
        fill_info(r, info);
    });
}

jf_status jf_craft_general(const jf_network *net, const double *x, size_t n, const double *target_output, size_t ny,
                           const jf_craft_params *params, double tolerance, double *x_star, jf_craft_info *info) {
    JF_REQUIRE(net);
    JF_REQUIRE(x);
    JF_REQUIRE(target_output);
    return guard([&] {
        const auto r = jforge::craft_general(net->net, network_input(net->net, x, n),
                                             vector_tensor(target_output, ny), to_params(params), tolerance);
        copy_out(r.x_star, x_star, n);
        fill_info(r, info);
    });
}

jf_status jf_campaign(const jf_network *net, const jf_dataset *samples, const jf_craft_params *params, int64_t target,
                      jf_results **out) {
    JF_REQUIRE(net);
    JF_REQUIRE(samples);
    JF_REQUIRE(out);
    return guard([&] {
        std::optional<std::size_t> only;
        if (target >= 0)
            only = static_cast<std::size_t>(target);
        *out = new jf_results{jforge::run_campaign(net->net, samples->data, to_params(params), only)};
    });
}

size_t jf_results_size(const jf_results *results) { return results ? results->rows.size() : 0; }

jf_status jf_results_get(const jf_results *results, size_t index, size_t *sample_id, size_t *true_label,
                         jf_craft_info *info) {
    JF_REQUIRE(results);
    if (index >= results->rows.size())
        return fail(JF_ERR_INDEX, "result " + std::to_string(index) + " out of range");
    const auto &row = results->rows[index];
    if (sample_id)
        *sample_id = row.sample_id;
    if (true_label)
        *true_label = row.true_label;
    fill_info(row.result, info);
    return JF_OK;
}

jf_status jf_results_x_star(const jf_results *results, size_t index, double *x, size_t n) {
    JF_REQUIRE(results);
    JF_REQUIRE(x);
    return guard([&] {
        if (index >= results->rows.size())
            throw jforge::IndexError("result " + std::to_string(index) + " out of range");
        copy_out(results->rows[index].result.x_star, x, n);
    });
}

jf_status jf_results_write_csv(const jf_results *results, const char *path) {
    JF_REQUIRE(results);
    JF_REQUIRE(path);
    return guard([&] {
        jforge::write_file_atomic(path, [&](std::ostream &os) { jforge::write_campaign_csv(os, results->rows); });
    });
}

jf_status jf_results_summary(const jf_results *results, size_t classes, jf_summary *out) {
    JF_REQUIRE(results);
    JF_REQUIRE(out);
    return guard([&] {
        const auto all = results_of(results);
        const auto s = jforge::campaign_stats(all, classes);
        *out = {s.total, s.successes, s.success_rate, s.mean_distortion_all, s.epsilon.value_or(undefined)};
    });
}

jf_status jf_results_matrix(const jf_results *results, size_t classes, jf_matrix_kind kind, double *out) {
    JF_REQUIRE(results);
    JF_REQUIRE(out);
    return guard([&] {
        const auto all = results_of(results);
        const auto s = jforge::campaign_stats(all, classes);
        switch (kind) {
        case JF_MATRIX_SUCCESS_RATE:
            copy_matrix(s.pairs.success_rate_matrix(), out);
            break;
        case JF_MATRIX_EPSILON:
            copy_matrix(s.pairs.epsilon_matrix(), out);
            break;
        case JF_MATRIX_COUNT:
            copy_matrix(s.pairs.count_matrix(), out);
            break;
        default:
            throw jforge::InputError("unknown matrix kind");
        }
    });
}

jf_status jf_results_to_dataset(const jf_results *results, size_t classes, jf_dataset **out) {
    JF_REQUIRE(results);
    JF_REQUIRE(out);
    return guard([&] { *out = new jf_dataset{jforge::adversarial_dataset(results->rows, classes)}; });
}

void jf_results_free(jf_results *results) { delete results; }

const double *jf_default_grid(size_t *count) {
    static const std::vector<double> grid = jforge::default_hardness_grid();
    if (count)
        *count = grid.size();
    return grid.data();
}

jf_status jf_hardness(const jf_network *net, const jf_dataset *samples, const double *grid, size_t k,
                      const jf_craft_params *params, double *out) {
    JF_REQUIRE(net);
    JF_REQUIRE(samples);
    JF_REQUIRE(grid);
    JF_REQUIRE(out);
    return guard([&] {
        const auto report = jforge::hardness_campaign(net->net, samples->data, std::span<const double>(grid, k),
                                                      to_params(params));
        copy_matrix(report.hardness, out);
    });
}

jf_status jf_distance(const jf_network *net, const jf_dataset *samples, jf_distance_mode mode,
                      const jf_craft_params *params, jf_reduce reduce, double *out, double *robustness) {
    JF_REQUIRE(net);
    JF_REQUIRE(samples);
    return guard([&] {
        const auto report = jforge::distance_campaign(
            net->net, samples->data, mode == JF_DISTANCE_PAIRWISE ? jforge::DistanceMode::pairwise
                                                                  : jforge::DistanceMode::single,
            to_params(params), reduce == JF_REDUCE_MEAN ? jforge::Reduce::mean : jforge::Reduce::min);
        if (out)
            copy_matrix(report.mean_distance, out);
        if (robustness)
            *robustness = report.robustness;
    });
}

jf_status jf_regularity(const double *image, size_t rows, size_t cols, double *out) {
    JF_REQUIRE(image);
    JF_REQUIRE(out);
    return guard([&] {
        *out = jforge::regularity_score(
            jforge::Tensor({rows, cols}, std::vector<double>(image, image + rows * cols)));
    });
}

jf_status jf_spearman(const double *a, const double *b, size_t n, double *out) {
    JF_REQUIRE(a);
    JF_REQUIRE(b);
    JF_REQUIRE(out);
    return guard([&] { *out = jforge::spearman({a, n}, {b, n}); });
}

jf_status jf_write_matrix_csv(const double *m, size_t classes, const char *path) {
    JF_REQUIRE(m);
    JF_REQUIRE(path);
    return guard([&] {
        jforge::ClassMatrix matrix(classes);
        for (std::size_t s = 0; s < classes; ++s)
            for (std::size_t t = 0; t < classes; ++t)
                if (!std::isnan(m[s * classes + t]))
                    matrix.set(s, t, m[s * classes + t]);
        jforge::write_file_atomic(path, [&](std::ostream &os) { jforge::write_matrix_csv(os, matrix); });
    });
}

jf_status jf_write_pgm(const double *image, size_t rows, size_t cols, const char *path) {
    JF_REQUIRE(image);
    JF_REQUIRE(path);
    return guard([&] {
        const jforge::Tensor t({rows, cols}, std::vector<double>(image, image + rows * cols));
        jforge::write_file_atomic(path, [&](std::ostream &os) { jforge::write_pgm(os, t); });
    });
}

jf_status jf_write_text(const char *text, const char *path) {
    JF_REQUIRE(text);
    JF_REQUIRE(path);
    return guard([&] { jforge::write_file_atomic(path, [&](std::ostream &os) { os << text; }); });
}

} // extern "C"
