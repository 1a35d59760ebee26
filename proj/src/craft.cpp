/**
 * \file craft.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/craft.hpp"

#include "jforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace jforge {

namespace {

void check_features(const Tensor &x) {
    for (double v : x.values())
        if (!(v >= 0.0 && v <= 1.0))
            throw InputError("crafting input features must lie in [0,1]");
}

void check_target(const Network &net, std::size_t target) {
    const std::size_t n = net.output_dim();
    if (target >= n)
        throw IndexError("target class " + std::to_string(target) + " out of range for " + std::to_string(n) +
                         " classes");
}

// Features that theta can still move; saturated ones never enter the domain.
std::vector<std::size_t> initial_domain(const Tensor &x, double theta) {
    std::vector<std::size_t> domain;
    domain.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (theta > 0.0 ? x[i] < 1.0 : x[i] > 0.0)
            domain.push_back(i);
    return domain;
}

std::size_t count_changed(const Tensor &x, const Tensor &x_star) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        n += x[i] != x_star[i];
    return n;
}

// Adds theta to feature i, clamped to [0,1]; drops it from the domain once it sits on a bound.
double modify_feature(Tensor &x_star, std::vector<std::size_t> &domain, std::size_t i, double theta) {
    const double before = x_star[i];
    x_star[i] = std::clamp(before + theta, 0.0, 1.0);
    if (x_star[i] == 0.0 || x_star[i] == 1.0)
        domain.erase(std::lower_bound(domain.begin(), domain.end(), i));
    return std::abs(x_star[i] - before);
}

CraftResult finish(const Tensor &x, Tensor x_star, std::size_t source, std::size_t target, bool success,
                   std::size_t iterations, FailureReason failure) {
    CraftResult r;
    std::vector<double> delta(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        delta[i] = x_star[i] - x[i];
    r.delta = Tensor(x.shape(), std::move(delta));
    r.distortion_pct = 100.0 * static_cast<double>(count_changed(x, x_star)) / static_cast<double>(x.size());
    r.x_star = std::move(x_star);
    r.success = success;
    r.iterations = iterations;
    r.failure = success ? FailureReason::none : failure;
    r.source = source;
    r.target = target;
    return r;
}

// The pair loop; `after_iteration(iteration, x_star)` runs once per completed iteration.
template <class Observer>
CraftResult pair_loop(const Network &net, const Tensor &x, std::size_t target, const CraftParams &params,
                      std::size_t max_iter, Observer &&after_iteration) {
    check_features(x);
    check_target(net, target);
    const std::size_t source = predict_label(net, x);
    Tensor x_star = x;
    std::vector<std::size_t> domain = initial_domain(x, params.theta);
    std::size_t label = source;
    std::size_t iter = 0;
    FailureReason failure = FailureReason::none;
    const PairSearchOptions options{params.prefilter};

    while (label != target) {
        if (iter >= max_iter) {
            failure = FailureReason::budget_exhausted;
            break;
        }
        if (domain.size() < 2) {
            failure = FailureReason::domain_exhausted;
            break;
        }
        const Jacobian jac = forward_derivative(net, x_star, params.tap);
        const PairSearch search = pairwise_saliency(jac, domain, target, params.variant, options);
        if (search.status != PairStatus::found) {
            failure = search.status == PairStatus::domain_exhausted ? FailureReason::domain_exhausted
                                                                    : FailureReason::no_valid_pair;
            break;
        }
        modify_feature(x_star, domain, search.pair.p1, params.theta);
        modify_feature(x_star, domain, search.pair.p2, params.theta);
        ++iter;
        label = predict_label(net, x_star);
        after_iteration(iter, x_star);
    }
    return finish(x, std::move(x_star), source, target, label == target, iter, failure);
}

} // namespace

std::string failure_name(FailureReason reason) {
    switch (reason) {
    case FailureReason::none:
        return "";
    case FailureReason::budget_exhausted:
        return "budget_exhausted";
    case FailureReason::domain_exhausted:
        return "domain_exhausted";
    case FailureReason::no_valid_pair:
        return "no_valid_pair";
    }
    return "";
}

std::size_t max_iterations(double upsilon, std::size_t feature_count) {
    if (!(upsilon > 0.0 && upsilon <= 100.0))
        throw InputError("maximum distortion must lie in (0, 100]");
    if (feature_count < 2)
        throw InputError("crafting needs at least two features");
    // The guard keeps products such as 784 * 100 / 200 from landing a hair below an integer.
    return static_cast<std::size_t>(std::floor(static_cast<double>(feature_count) * upsilon / 200.0 + 1e-9));
}

void check_params(const CraftParams &params, std::size_t feature_count) {
    if (params.theta == 0.0 || !std::isfinite(params.theta))
        throw InputError("feature variation theta must be finite and non-zero");
    if (max_iterations(params.upsilon, feature_count) < 1)
        throw InputError("maximum distortion " + std::to_string(params.upsilon) +
                         "% allows no iteration on " + std::to_string(feature_count) + " features");
}

CraftResult craft(const Network &net, const Tensor &x, std::size_t target, const CraftParams &params) {
    check_params(params, x.size());
    return pair_loop(net, x, target, params, max_iterations(params.upsilon, x.size()),
                     [](std::size_t, const Tensor &) {});
}

CraftResult craft_from_empty(const Network &net, std::size_t target, const CraftParams &params) {
    return craft(net, Tensor(net.input_shape, 0.0), target, params);
}

CraftResult craft_general(const Network &net, const Tensor &x, const Tensor &target_output, const CraftParams &params,
                          double tolerance) {
    if (params.theta == 0.0 || !std::isfinite(params.theta))
        throw InputError("feature variation theta must be finite and non-zero");
    if (!(params.upsilon > 0.0 && params.upsilon <= 100.0))
        throw InputError("maximum distortion must lie in (0, 100]");
    if (!(tolerance >= 0.0))
        throw InputError("match tolerance must be non-negative");
    check_features(x);
    const std::size_t n = net.output_dim();
    if (target_output.size() != n)
        throw DimensionError("target output has " + std::to_string(target_output.size()) + " entries, network has " +
                             std::to_string(n) + " outputs");
    const std::size_t target = argmax(target_output.values());

    auto matches = [&](const Tensor &y) {
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(y[j] - target_output[j]));
        return worst <= tolerance;
    };

    const std::size_t source = predict_label(net, x);
    const double budget = static_cast<double>(x.size()) * params.upsilon / 100.0;
    Tensor x_star = x;
    std::vector<std::size_t> domain = initial_domain(x, params.theta);
    double l1 = 0.0;
    std::size_t iter = 0;
    FailureReason failure = FailureReason::none;
    bool success = matches(evaluate(net, x_star));

    while (!success) {
        if (l1 >= budget) {
            failure = FailureReason::budget_exhausted;
            break;
        }
        if (domain.empty()) {
            failure = FailureReason::domain_exhausted;
            break;
        }
        const Jacobian jac = forward_derivative(net, x_star, params.tap);
        std::vector<double> scores;
        if (n == 1) {
            scores.resize(jac.cols());
            for (std::size_t i = 0; i < jac.cols(); ++i) {
                const double a = jac(0, i);
                scores[i] = params.variant == Variant::increase ? std::max(a, 0.0) : std::max(-a, 0.0);
            }
        } else {
            scores = saliency_map(jac, target, params.variant).values;
        }
        std::size_t best = domain.front();
        for (std::size_t i : domain)
            if (scores[i] > scores[best])
                best = i;
        if (!(scores[best] > 0.0)) {
            failure = FailureReason::no_valid_pair;
            break;
        }
        l1 += modify_feature(x_star, domain, best, params.theta);
        ++iter;
        success = matches(evaluate(net, x_star));
    }
    CraftResult r = finish(x, std::move(x_star), source, target, success, iter, failure);
    r.target = target;
    return r;
}

std::vector<SweepPoint> craft_sweep(const Network &net, const Tensor &x, std::size_t target,
                                    const CraftParams &params, std::span<const double> grid) {
    if (grid.size() < 2)
        throw InputError("distortion grid needs at least two values");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw InputError("distortion grid must be strictly increasing");
    CraftParams widest = params;
    widest.upsilon = grid.back();
    for (double u : grid) {
        CraftParams p = params;
        p.upsilon = u;
        check_params(p, x.size());
    }

    std::vector<std::size_t> changed{0}; // changed[i] = features differing after iteration i
    const CraftResult full = pair_loop(net, x, target, widest, max_iterations(widest.upsilon, x.size()),
                                       [&](std::size_t, const Tensor &x_star) {
                                           changed.push_back(count_changed(x, x_star));
                                       });
    std::vector<SweepPoint> points;
    for (double u : grid) {
        const std::size_t cap = max_iterations(u, x.size());
        SweepPoint p;
        // At cap == iterations an unsuccessful run would hit the budget check before any other stop.
        if (cap > full.iterations || (cap == full.iterations && full.success)) {
            p = {full.success, full.iterations, full.distortion_pct, full.failure};
        } else {
            p.success = false;
            p.iterations = cap;
            p.distortion_pct = 100.0 * static_cast<double>(changed[cap]) / static_cast<double>(x.size());
            p.failure = FailureReason::budget_exhausted;
        }
        points.push_back(p);
    }
    return points;
}

std::vector<CampaignRow> run_campaign(const Network &net, const LabeledDataset &samples, const CraftParams &params,
                                      std::optional<std::size_t> target) {
    const std::size_t n = net.output_dim();
    if (target && *target >= n)
        throw IndexError("target class " + std::to_string(*target) + " out of range for " + std::to_string(n) +
                         " classes");
    std::vector<CampaignRow> rows;
    for (std::size_t id = 0; id < samples.size(); ++id) {
        const Sample &s = samples.samples[id];
        const std::size_t source = predict_label(net, s.x);
        for (std::size_t t = 0; t < n; ++t) {
            if (t == source || (target && t != *target))
                continue;
            rows.push_back({id, s.label, craft(net, s.x, t, params)});
        }
    }
    return rows;
}

void write_campaign_csv(std::ostream &os, const std::vector<CampaignRow> &rows) {
    os << "sample_id,s,t,success,iterations,distortion_pct,failure_reason\n" << std::setprecision(17);
    for (const auto &row : rows) {
        const CraftResult &r = row.result;
        os << row.sample_id << ',' << r.source << ',' << r.target << ',' << (r.success ? 1 : 0) << ','
           << r.iterations << ',' << r.distortion_pct << ',' << failure_name(r.failure) << '\n';
    }
}

LabeledDataset adversarial_dataset(const std::vector<CampaignRow> &rows, std::size_t class_count) {
    LabeledDataset data;
    data.class_count = class_count;
    for (const auto &row : rows)
        if (row.result.success)
            data.samples.push_back({row.result.x_star, row.true_label});
    return data;
}

} // namespace jforge
