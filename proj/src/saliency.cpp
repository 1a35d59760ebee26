/**
 * \file saliency.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/saliency.hpp"

#include "jforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jforge {

namespace {

void check_target(const Jacobian &jac, std::size_t target) {
    if (target >= jac.rows())
        throw IndexError("target class " + std::to_string(target) + " out of range for " +
                         std::to_string(jac.rows()) + " outputs");
}

// Single-feature preference used by the optional prefilter.
double feature_promise(double a, double b, Variant variant) { return variant == Variant::increase ? a - b : b - a; }

} // namespace

TargetSplit split_target(const Jacobian &jac, std::size_t target) {
    check_target(jac, target);
    const std::size_t m = jac.cols();
    TargetSplit split{std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        split.target[i] = jac.values(static_cast<Eigen::Index>(target), col);
        double others = 0.0;
        for (std::size_t j = 0; j < jac.rows(); ++j)
            if (j != target)
                others += jac.values(static_cast<Eigen::Index>(j), col);
        split.others[i] = others;
    }
    return split;
}

SaliencyMap saliency_increase(const Jacobian &jac, std::size_t target) {
    const TargetSplit s = split_target(jac, target);
    SaliencyMap map{std::vector<double>(jac.cols(), 0.0), target, Variant::increase};
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double a = s.target[i], b = s.others[i];
        if (a < 0.0 || b > 0.0)
            continue;
        map.values[i] = a * std::abs(b);
    }
    return map;
}

SaliencyMap saliency_decrease(const Jacobian &jac, std::size_t target) {
    const TargetSplit s = split_target(jac, target);
    SaliencyMap map{std::vector<double>(jac.cols(), 0.0), target, Variant::decrease};
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double a = s.target[i], b = s.others[i];
        if (a > 0.0 || b < 0.0)
            continue;
        map.values[i] = std::abs(a) * b;
    }
    return map;
}

SaliencyMap saliency_map(const Jacobian &jac, std::size_t target, Variant variant) {
    return variant == Variant::increase ? saliency_increase(jac, target) : saliency_decrease(jac, target);
}

bool pair_qualifies(double alpha, double beta, Variant variant) {
    return variant == Variant::increase ? (alpha > 0.0 && beta < 0.0) : (alpha < 0.0 && beta > 0.0);
}

PairSearch pairwise_saliency(const Jacobian &jac, std::span<const std::size_t> domain, std::size_t target,
                             Variant variant, const PairSearchOptions &options) {
    check_target(jac, target);
    for (auto i : domain)
        if (i >= jac.cols())
            throw IndexError("feature index " + std::to_string(i) + " out of range");
    if (domain.size() < 2)
        return {PairStatus::domain_exhausted, {}};

    const TargetSplit s = split_target(jac, target);
    std::vector<std::size_t> candidates(domain.begin(), domain.end());
    std::sort(candidates.begin(), candidates.end());
    if (options.prefilter > 0 && options.prefilter < candidates.size()) {
        std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t l, std::size_t r) {
            return feature_promise(s.target[l], s.others[l], variant) >
                   feature_promise(s.target[r], s.others[r], variant);
        });
        candidates.resize(std::max<std::size_t>(options.prefilter, 2));
        std::sort(candidates.begin(), candidates.end());
    }

    const std::size_t n = candidates.size();
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = s.target[candidates[k]];
        b[k] = s.others[candidates[k]];
    }

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_p = 0, best_q = 0;
    bool found = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
        const double ap = a[p], bp = b[p];
        for (std::size_t q = p + 1; q < n; ++q) {
            const double alpha = ap + a[q];
            const double beta = bp + b[q];
            if (!pair_qualifies(alpha, beta, variant))
                continue;
            const double score = -alpha * beta;
            if (score > best) {
                best = score;
                best_p = p;
                best_q = q;
                found = true;
            }
        }
    }
    if (!found)
        return {PairStatus::no_valid_pair, {}};
    PairSelection sel;
    sel.p1 = candidates[best_p];
    sel.p2 = candidates[best_q];
    sel.alpha = a[best_p] + a[best_q];
    sel.beta = b[best_p] + b[best_q];
    sel.score = best;
    return {PairStatus::found, sel};
}

std::size_t count_qualifying_pairs(const Jacobian &jac, std::size_t target, Variant variant) {
    const TargetSplit s = split_target(jac, target);
    const std::size_t m = jac.cols();
    std::size_t count = 0;
    for (std::size_t p = 0; p + 1 < m; ++p)
        for (std::size_t q = p + 1; q < m; ++q)
            count += pair_qualifies(s.target[p] + s.target[q], s.others[p] + s.others[q], variant);
    return count;
}

} // namespace jforge
