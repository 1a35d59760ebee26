/**
 * \file jforge_cli.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Command-line front end over the jforge C interface.
 */

#include "jforge/jforge.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Failure {
    jf_status status;
    std::string message;
};

void check(jf_status status) {
    if (status != JF_OK)
        throw Failure{status, jf_last_error()};
}

int exit_code(jf_status status) {
    switch (status) {
    case JF_ERR_DIVERGENCE:
    case JF_ERR_INTERNAL:
    case JF_ERR_NULL:
    case JF_ERR_BUFFER:
        return 1;
    default:
        return 2;
    }
}

struct NetworkDeleter {
    void operator()(jf_network *p) const { jf_network_free(p); }
};
struct DatasetDeleter {
    void operator()(jf_dataset *p) const { jf_dataset_free(p); }
};
struct HistoryDeleter {
    void operator()(jf_history *p) const { jf_history_free(p); }
};
struct ResultsDeleter {
    void operator()(jf_results *p) const { jf_results_free(p); }
};
using NetworkPtr = std::unique_ptr<jf_network, NetworkDeleter>;
using DatasetPtr = std::unique_ptr<jf_dataset, DatasetDeleter>;
using HistoryPtr = std::unique_ptr<jf_history, HistoryDeleter>;
using ResultsPtr = std::unique_ptr<jf_results, ResultsDeleter>;

struct CraftFlags {
    double upsilon = 14.5;
    double theta = 1.0;
    std::string variant = "increase";
    std::string tap = "logits";
    std::size_t prefilter = 0;

    jf_craft_params params() const {
        jf_craft_params p;
        jf_craft_params_default(&p);
        p.upsilon = upsilon;
        p.theta = theta;
        p.variant = variant == "decrease" ? JF_VARIANT_DECREASE : JF_VARIANT_INCREASE;
        p.tap = tap == "probs" ? JF_TAP_PROBABILITIES : JF_TAP_LOGITS;
        p.prefilter = prefilter;
        return p;
    }
};

struct SampleFlags {
    std::string images;
    std::string labels;
    std::size_t samples = 100;
    std::optional<std::uint64_t> seed;
    bool zero_means_all = false; ///< campaigns need at least one sample; training data may take everything
};

struct TrainFlags {
    std::string arch = "dense:200,relu,dense:200,relu,dense:10,softmax";
    std::size_t epochs = 20;
    double lr = 0.1;
    std::size_t batch = 500;
    std::uint64_t seed = 0;
    std::string loss = "ce";

    jf_train_config config() const {
        jf_train_config c;
        jf_train_config_default(&c);
        c.learning_rate = lr;
        c.epochs = epochs;
        c.batch_size = batch;
        c.seed = seed;
        c.loss = loss == "mse" ? JF_LOSS_MSE : JF_LOSS_CROSS_ENTROPY;
        return c;
    }
};

struct Options {
    std::string model;
    std::string out = "jforge-out";
    SampleFlags data;
    SampleFlags train_data{"", "", 0, std::nullopt, true};
    std::string test_images;
    std::string test_labels;
    std::size_t test_samples = 1000;
    TrainFlags train;
    CraftFlags craft;
    TrainFlags demo_train{"dense:2,sigmoid,dense:1,sigmoid", 100, 0.0663, 1, 0, "mse"};
    CraftFlags demo_craft{7.5, 0.05, "increase", "probs", 0};
    std::int64_t target = -1;
    bool pgm = false;
    std::string grid;
    std::string mode = "single";
    std::string reduce = "min";
    std::size_t adv_samples = 200;
};

void add_craft_flags(CLI::App *cmd, CraftFlags &f) {
    cmd->add_option("--upsilon", f.upsilon, "Maximum distortion, percent of features")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--theta", f.theta, "Change applied to each selected feature")->capture_default_str();
    cmd->add_option("--variant", f.variant, "Saliency map variant")
        ->check(CLI::IsMember({"increase", "decrease"}))
        ->capture_default_str();
    cmd->add_option("--tap", f.tap, "Layer the Jacobian is taken at")
        ->check(CLI::IsMember({"logits", "probs"}))
        ->capture_default_str();
    cmd->add_option("--prefilter", f.prefilter, "Pair-search prefilter size, 0 for exhaustive")->capture_default_str();
}

void add_sample_flags(CLI::App *cmd, SampleFlags &f, bool seeded) {
    cmd->add_option("--images", f.images, "IDX image file")->required();
    cmd->add_option("--labels", f.labels, "IDX label file")->required();
    cmd->add_option("--samples", f.samples, f.zero_means_all ? "Number of samples to use, 0 for all" : "Number of samples to use")
        ->capture_default_str();
    if (seeded)
        cmd->add_option("--seed", f.seed, "Draw the samples at random with this seed instead of taking the first ones");
}

void add_train_flags(CLI::App *cmd, TrainFlags &f) {
    cmd->add_option("--arch", f.arch, "Comma-separated layer recipe")->capture_default_str();
    cmd->add_option("--epochs", f.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--lr", f.lr, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--batch", f.batch, "Minibatch size")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", f.seed, "Initialisation and shuffle seed")->capture_default_str();
    cmd->add_option("--loss", f.loss, "Loss function")->check(CLI::IsMember({"ce", "mse"}))->capture_default_str();
}

DatasetPtr load_samples(const SampleFlags &f) {
    if (f.samples == 0 && !f.zero_means_all)
        throw Failure{JF_ERR_INPUT, "--samples must be at least 1"};
    jf_dataset *raw = nullptr;
    check(jf_dataset_load_idx(f.images.c_str(), f.labels.c_str(), f.samples, f.seed.has_value(), f.seed.value_or(0),
                              &raw));
    DatasetPtr data(raw);
    if (jf_dataset_size(data.get()) == 0)
        throw Failure{JF_ERR_INPUT, "no samples selected"};
    return data;
}

NetworkPtr load_network(const std::string &path) {
    jf_network *raw = nullptr;
    check(jf_network_load(path.c_str(), &raw));
    return NetworkPtr(raw);
}

std::string out_path(const Options &o, const std::string &name) { return (std::filesystem::path(o.out) / name).string(); }

void prepare_out(const Options &o) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec)
        throw Failure{JF_ERR_IO, "cannot create output directory '" + o.out + "': " + ec.message()};
}

void write_text(const std::string &text, const std::string &path) { check(jf_write_text(text.c_str(), path.c_str())); }

std::string format(double v) {
    if (std::isnan(v))
        return "";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::vector<double> parse_grid(const std::string &text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw Failure{JF_ERR_INPUT, "bad grid value '" + item + "'"};
        grid.push_back(v);
    }
    return grid;
}

std::string summary_text(const jf_summary &s) {
    std::ostringstream os;
    os << "total=" << s.total << '\n'
       << "successes=" << s.successes << '\n'
       << "success_rate=" << format(s.success_rate) << '\n'
       << "mean_distortion_all=" << format(s.mean_distortion_all) << '\n'
       << "epsilon=" << format(s.epsilon) << '\n';
    return os.str();
}

ResultsPtr campaign(const jf_network *net, const jf_dataset *samples, const jf_craft_params &params,
                    std::int64_t target) {
    jf_results *raw = nullptr;
    check(jf_campaign(net, samples, &params, target, &raw));
    return ResultsPtr(raw);
}

jf_summary summarize(const jf_results *results, std::size_t classes) {
    jf_summary s{};
    check(jf_results_summary(results, classes, &s));
    return s;
}

std::size_t image_side(std::size_t features) {
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(features))));
    return side * side == features ? side : 0;
}

int cmd_train(const Options &o) {
    auto train = load_samples(o.train_data);
    DatasetPtr test;
    if (!o.test_images.empty() || !o.test_labels.empty()) {
        SampleFlags t{o.test_images, o.test_labels, o.test_samples, std::nullopt, true};
        test = load_samples(t);
    }
    const std::size_t shape[] = {jf_dataset_feature_count(train.get())};
    jf_network *raw = nullptr;
    check(jf_network_init(shape, 1, o.train.arch.c_str(), o.train.seed, &raw));
    NetworkPtr net(raw);
    const jf_train_config config = o.train.config();
    jf_history *hist = nullptr;
    check(jf_train(net.get(), train.get(), test.get(), &config, &hist));
    HistoryPtr history(hist);
    check(jf_network_save(net.get(), o.model.c_str()));
    check(jf_history_write_csv(history.get(), out_path(o, "history.csv").c_str()));
    double train_acc = 0.0;
    check(jf_accuracy(net.get(), train.get(), &train_acc));
    std::cout << "train_accuracy=" << format(train_acc) << '\n';
    if (test) {
        double test_acc = 0.0;
        check(jf_accuracy(net.get(), test.get(), &test_acc));
        std::cout << "test_accuracy=" << format(test_acc) << '\n';
    }
    return 0;
}

int cmd_attack(const Options &o) {
    auto net = load_network(o.model);
    auto samples = load_samples(o.data);
    const std::size_t n = jf_dataset_feature_count(samples.get());
    if (o.target >= 0) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < jf_dataset_size(samples.get()); ++i) {
            std::size_t label = 0, source = 0;
            check(jf_dataset_sample(samples.get(), i, x.data(), n, &label));
            check(jf_network_predict(net.get(), x.data(), n, &source));
            if (static_cast<std::int64_t>(source) == o.target)
                std::cerr << "sample " << i << ": skipped, already classified as target " << o.target << '\n';
        }
    }
    auto results = campaign(net.get(), samples.get(), o.craft.params(), o.target);
    check(jf_results_write_csv(results.get(), out_path(o, "campaign.csv").c_str()));
    if (o.pgm) {
        const std::size_t side = image_side(n);
        if (side == 0)
            throw Failure{JF_ERR_INPUT, "samples are not square images, cannot write PGM files"};
        std::vector<double> x(n);
        for (std::size_t i = 0; i < jf_results_size(results.get()); ++i) {
            std::size_t id = 0;
            jf_craft_info info{};
            check(jf_results_get(results.get(), i, &id, nullptr, &info));
            if (!info.success)
                continue;
            check(jf_results_x_star(results.get(), i, x.data(), n));
            const std::string name = "adv_" + std::to_string(id) + "_" + std::to_string(info.source) + "to" +
                                     std::to_string(info.target) + ".pgm";
            check(jf_write_pgm(x.data(), side, side, out_path(o, name).c_str()));
        }
    }
    if (jf_results_size(results.get()) > 0)
        std::cout << summary_text(summarize(results.get(), jf_network_output_dim(net.get())));
    return 0;
}

int cmd_evaluate(const Options &o) {
    auto net = load_network(o.model);
    auto samples = load_samples(o.data);
    auto results = campaign(net.get(), samples.get(), o.craft.params(), -1);
    const std::size_t classes = jf_network_output_dim(net.get());
    check(jf_results_write_csv(results.get(), out_path(o, "campaign.csv").c_str()));
    std::vector<double> m(classes * classes);
    const std::pair<jf_matrix_kind, const char *> kinds[] = {
        {JF_MATRIX_SUCCESS_RATE, "success_rate.csv"}, {JF_MATRIX_EPSILON, "epsilon.csv"}, {JF_MATRIX_COUNT, "count.csv"}};
    for (const auto &[kind, name] : kinds) {
        check(jf_results_matrix(results.get(), classes, kind, m.data()));
        check(jf_write_matrix_csv(m.data(), classes, out_path(o, name).c_str()));
    }
    const std::string summary = summary_text(summarize(results.get(), classes));
    write_text(summary, out_path(o, "summary.txt"));
    std::cout << summary;
    return 0;
}

int cmd_hardness(const Options &o) {
    auto net = load_network(o.model);
    auto samples = load_samples(o.data);
    std::vector<double> grid;
    if (o.grid.empty()) {
        std::size_t k = 0;
        const double *d = jf_default_grid(&k);
        grid.assign(d, d + k);
    } else {
        grid = parse_grid(o.grid);
    }
    const std::size_t classes = jf_network_output_dim(net.get());
    std::vector<double> h(classes * classes);
    const jf_craft_params params = o.craft.params();
    check(jf_hardness(net.get(), samples.get(), grid.data(), grid.size(), &params, h.data()));
    check(jf_write_matrix_csv(h.data(), classes, out_path(o, "hardness.csv").c_str()));
    return 0;
}

int cmd_distance(const Options &o) {
    auto net = load_network(o.model);
    auto samples = load_samples(o.data);
    const std::size_t classes = jf_network_output_dim(net.get());
    std::vector<double> d(classes * classes);
    double robustness = 0.0;
    const jf_craft_params params = o.craft.params();
    check(jf_distance(net.get(), samples.get(), o.mode == "pairwise" ? JF_DISTANCE_PAIRWISE : JF_DISTANCE_SINGLE,
                      &params, o.reduce == "mean" ? JF_REDUCE_MEAN : JF_REDUCE_MIN, d.data(), &robustness));
    check(jf_write_matrix_csv(d.data(), classes, out_path(o, "distance.csv").c_str()));
    const std::string report = "robustness=" + format(robustness) + "\n";
    write_text(report, out_path(o, "robustness.txt"));
    std::cout << report;
    return 0;
}

int cmd_detect(const Options &o) {
    auto net = load_network(o.model);
    auto samples = load_samples(o.data);
    const std::size_t n = jf_dataset_feature_count(samples.get());
    const std::size_t side = image_side(n);
    if (side == 0)
        throw Failure{JF_ERR_INPUT, "samples are not square images"};
    auto results = campaign(net.get(), samples.get(), o.craft.params(), -1);
    std::ostringstream csv;
    csv << "sample_id,s,t,success,source_score,adversarial_score\n";
    std::vector<double> x(n), adv(n);
    double source_sum = 0.0, adv_sum = 0.0;
    std::size_t successes = 0;
    for (std::size_t i = 0; i < jf_results_size(results.get()); ++i) {
        std::size_t id = 0;
        jf_craft_info info{};
        check(jf_results_get(results.get(), i, &id, nullptr, &info));
        check(jf_dataset_sample(samples.get(), id, x.data(), n, nullptr));
        check(jf_results_x_star(results.get(), i, adv.data(), n));
        double rs = 0.0, ra = 0.0;
        check(jf_regularity(x.data(), side, side, &rs));
        check(jf_regularity(adv.data(), side, side, &ra));
        csv << id << ',' << info.source << ',' << info.target << ',' << info.success << ',' << format(rs) << ','
            << format(ra) << '\n';
        if (info.success) {
            source_sum += rs;
            adv_sum += ra;
            ++successes;
        }
    }
    write_text(csv.str(), out_path(o, "regularity.csv"));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double count = static_cast<double>(successes);
    const std::string report = "successes=" + std::to_string(successes) +
                               "\nmean_source_score=" + format(successes ? source_sum / count : nan) +
                               "\nmean_adversarial_score=" + format(successes ? adv_sum / count : nan) + "\n";
    write_text(report, out_path(o, "detect.txt"));
    std::cout << report;
    return 0;
}

int cmd_retrain(const Options &o) {
    auto net = load_network(o.model);
    SampleFlags train_flags = o.train_data;
    auto train = load_samples(train_flags);
    SampleFlags attack_flags{o.test_images, o.test_labels, o.test_samples, std::nullopt};
    auto attack_set = load_samples(attack_flags);
    const std::size_t classes = jf_network_output_dim(net.get());
    const jf_craft_params params = o.craft.params();

    SampleFlags source_flags = train_flags;
    source_flags.samples = o.adv_samples;
    source_flags.zero_means_all = false;
    auto sources = load_samples(source_flags);
    auto crafted = campaign(net.get(), sources.get(), params, -1);
    jf_dataset *adv_raw = nullptr;
    check(jf_results_to_dataset(crafted.get(), classes, &adv_raw));
    DatasetPtr adversarial(adv_raw);

    const jf_train_config config = o.train.config();
    jf_network *hard_raw = nullptr;
    jf_history *hist = nullptr;
    check(jf_retrain(net.get(), train.get(), adversarial.get(), nullptr, &config, &hard_raw, &hist));
    NetworkPtr hardened(hard_raw);
    HistoryPtr history(hist);
    check(jf_network_save(hardened.get(), out_path(o, "hardened.model").c_str()));
    check(jf_history_write_csv(history.get(), out_path(o, "history.csv").c_str()));

    auto before = campaign(net.get(), attack_set.get(), params, -1);
    auto after = campaign(hardened.get(), attack_set.get(), params, -1);
    check(jf_results_write_csv(before.get(), out_path(o, "campaign_before.csv").c_str()));
    check(jf_results_write_csv(after.get(), out_path(o, "campaign_after.csv").c_str()));
    const jf_summary b = summarize(before.get(), classes);
    const jf_summary a = summarize(after.get(), classes);
    double acc_before = 0.0, acc_after = 0.0;
    check(jf_accuracy(net.get(), attack_set.get(), &acc_before));
    check(jf_accuracy(hardened.get(), attack_set.get(), &acc_after));
    std::ostringstream os;
    os << "adversarial_samples=" << jf_dataset_size(adversarial.get()) << '\n'
       << "accuracy_before=" << format(acc_before) << '\n'
       << "accuracy_after=" << format(acc_after) << '\n'
       << "success_rate_before=" << format(b.success_rate) << '\n'
       << "success_rate_after=" << format(a.success_rate) << '\n'
       << "epsilon_before=" << format(b.epsilon) << '\n'
       << "epsilon_after=" << format(a.epsilon) << '\n';
    write_text(os.str(), out_path(o, "comparison.txt"));
    std::cout << os.str();
    return 0;
}

int cmd_demo_and(const Options &o, std::size_t count, double x2) {
    jf_dataset *raw = nullptr;
    check(jf_dataset_and(count, &raw));
    DatasetPtr data(raw);
    const std::size_t shape[] = {2};
    jf_network *net_raw = nullptr;
    check(jf_network_init(shape, 1, o.demo_train.arch.c_str(), o.demo_train.seed, &net_raw));
    NetworkPtr net(net_raw);
    const jf_train_config config = o.demo_train.config();
    jf_history *hist = nullptr;
    check(jf_train(net.get(), data.get(), nullptr, &config, &hist));
    HistoryPtr history(hist);
    if (jf_network_output_dim(net.get()) != 1)
        throw Failure{JF_ERR_INPUT, "the demonstration needs a single-output network"};
    check(jf_network_save(net.get(), out_path(o, "and.model").c_str()));
    check(jf_history_write_csv(history.get(), out_path(o, "history.csv").c_str()));

    std::ostringstream surface, derivative;
    surface << "x1,x2,f\n";
    derivative << "x1,x2,df_dx2\n";
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            const double x[2] = {i / 100.0, j / 100.0};
            double y = 0.0, jac[2] = {0.0, 0.0};
            check(jf_network_evaluate(net.get(), x, 2, &y, 1));
            check(jf_network_jacobian(net.get(), x, 2, JF_TAP_PROBABILITIES, jac, 2));
            surface << format(x[0]) << ',' << format(x[1]) << ',' << format(y) << '\n';
            derivative << format(x[0]) << ',' << format(x[1]) << ',' << format(jac[1]) << '\n';
        }
    write_text(surface.str(), out_path(o, "and_surface.csv"));
    write_text(derivative.str(), out_path(o, "and_derivative.csv"));

    std::ostringstream report;
    const double corners[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (const auto &c : corners) {
        double y = 0.0;
        check(jf_network_evaluate(net.get(), c, 2, &y, 1));
        report << "F(" << c[0] << ',' << c[1] << ")=" << format(y) << '\n';
    }
    const double x[2] = {1.0, x2};
    const double target[1] = {1.0};
    const jf_craft_params params = o.demo_craft.params();
    double x_star[2] = {0.0, 0.0};
    jf_craft_info info{};
    check(jf_craft_general(net.get(), x, 2, target, 1, &params, 0.5, x_star, &info));
    double y = 0.0, y_star = 0.0;
    check(jf_network_evaluate(net.get(), x, 2, &y, 1));
    check(jf_network_evaluate(net.get(), x_star, 2, &y_star, 1));
    report << "x=" << format(x[0]) << ',' << format(x[1]) << "\nF(x)=" << format(y) << "\nx_star=" << format(x_star[0])
           << ',' << format(x_star[1]) << "\nF(x_star)=" << format(y_star) << "\ndelta=" << format(x_star[0] - x[0])
           << ',' << format(x_star[1] - x[1]) << "\nsuccess=" << info.success << "\niterations=" << info.iterations
           << "\nfailure_reason=" << jf_failure_name(info.failure) << '\n';
    write_text(report.str(), out_path(o, "and_adversarial.txt"));
    std::cout << report.str();
    return 0;
}

/// Effective options of `cmd`, readable back with `jforge --config <file> <command>`.
std::string manifest(const CLI::App *cmd) {
    std::istringstream in(cmd->config_to_str(true, false));
    std::ostringstream out;
    out << "# jforge " << jf_version() << '\n';
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out << cmd->get_name() << '.' << line << '\n';
    return out.str();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Jacobian-based adversarial sample crafting for feedforward networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(jf_version()));
    app.set_config("--config", "", "Read options from a manifest written by an earlier run");
    Options o;
    std::size_t and_count = 1000;
    double and_x2 = 0.37;

    auto out_flag = [&](CLI::App *cmd) {
        cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    };
    auto model_flag = [&](CLI::App *cmd, const char *help) {
        cmd->add_option("--model", o.model, help)->required();
    };

    auto *train = app.add_subcommand("train", "Train a network on IDX data");
    model_flag(train, "Model file to write");
    add_sample_flags(train, o.train_data, false);
    train->add_option("--test-images", o.test_images, "IDX test image file");
    train->add_option("--test-labels", o.test_labels, "IDX test label file");
    train->add_option("--test-samples", o.test_samples, "Number of test samples, 0 for all")->capture_default_str();
    add_train_flags(train, o.train);
    out_flag(train);

    auto *attack = app.add_subcommand("attack", "Craft adversarial samples");
    model_flag(attack, "Model file");
    add_sample_flags(attack, o.data, true);
    add_craft_flags(attack, o.craft);
    attack->add_option("--target", o.target, "Single target class instead of all")->check(CLI::NonNegativeNumber);
    attack->add_flag("--pgm", o.pgm, "Write successful samples as PGM images");
    out_flag(attack);

    auto *evaluate = app.add_subcommand("evaluate", "Campaign statistics and class-pair matrices");
    model_flag(evaluate, "Model file");
    add_sample_flags(evaluate, o.data, true);
    add_craft_flags(evaluate, o.craft);
    out_flag(evaluate);

    auto *hardness = app.add_subcommand("hardness", "Hardness matrix over a distortion grid");
    model_flag(hardness, "Model file");
    add_sample_flags(hardness, o.data, true);
    add_craft_flags(hardness, o.craft);
    hardness->add_option("--grid", o.grid, "Comma-separated distortion budgets in percent (default 0.3,...,38.3)");
    out_flag(hardness);

    auto *distance = app.add_subcommand("distance", "Adversarial distance matrix and robustness");
    model_flag(distance, "Model file");
    add_sample_flags(distance, o.data, true);
    add_craft_flags(distance, o.craft);
    distance->add_option("--mode", o.mode, "Count single features or feature pairs")
        ->check(CLI::IsMember({"single", "pairwise"}))
        ->capture_default_str();
    distance->add_option("--reduce", o.reduce, "Robustness reduction")
        ->check(CLI::IsMember({"min", "mean"}))
        ->capture_default_str();
    out_flag(distance);

    auto *detect = app.add_subcommand("detect", "Regularity scores of samples and their adversarial versions");
    model_flag(detect, "Model file");
    add_sample_flags(detect, o.data, true);
    add_craft_flags(detect, o.craft);
    out_flag(detect);

    auto *retrain = app.add_subcommand("retrain", "Retrain with adversarial samples and compare attacks");
    model_flag(retrain, "Baseline model file");
    add_sample_flags(retrain, o.train_data, false);
    retrain->add_option("--test-images", o.test_images, "IDX images of the re-attacked set")->required();
    retrain->add_option("--test-labels", o.test_labels, "IDX labels of the re-attacked set")->required();
    retrain->add_option("--test-samples", o.test_samples, "Size of the re-attacked set")->capture_default_str();
    retrain->add_option("--adv-samples", o.adv_samples, "Training samples to craft adversarial versions of")
        ->capture_default_str();
    add_train_flags(retrain, o.train);
    add_craft_flags(retrain, o.craft);
    out_flag(retrain);

    auto *demo = app.add_subcommand("demo-and", "Toy AND network surfaces and an adversarial input");
    demo->add_option("--count", and_count, "Training samples")->capture_default_str();
    demo->add_option("--x2", and_x2, "Second coordinate of the legitimate input (1, x2)")->capture_default_str();
    add_train_flags(demo, o.demo_train);
    add_craft_flags(demo, o.demo_craft);
    out_flag(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App *cmd = app.get_subcommands().front();
    try {
        if (cmd != train && cmd != demo && !o.model.empty() && !std::filesystem::exists(o.model))
            throw Failure{JF_ERR_IO, "model file '" + o.model + "' not found"};
        prepare_out(o);
        int code = 0;
        if (cmd == train)
            code = cmd_train(o);
        else if (cmd == attack)
            code = cmd_attack(o);
        else if (cmd == evaluate)
            code = cmd_evaluate(o);
        else if (cmd == hardness)
            code = cmd_hardness(o);
        else if (cmd == distance)
            code = cmd_distance(o);
        else if (cmd == detect)
            code = cmd_detect(o);
        else if (cmd == retrain)
            code = cmd_retrain(o);
        else
            code = cmd_demo_and(o, and_count, and_x2);
        write_text(manifest(cmd), out_path(o, "manifest.toml"));
        return code;
    } catch (const Failure &f) {
        std::cerr << "error: " << f.message << '\n';
        return exit_code(f.status);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
