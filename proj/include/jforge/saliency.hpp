/**
 * \file saliency.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Adversarial saliency maps built from a network Jacobian. For a target
 * class t and input feature i, write a_i = dF_t/dx_i and b_i = sum over
 * j != t of dF_j/dx_i.
 *
 *   increase:  S[i] = 0 if a_i < 0 or b_i > 0, else a_i * |b_i|
 *   decrease:  S[i] = 0 if a_i > 0 or b_i < 0, else |a_i| * b_i
 *
 * The pair search scores two features together with alpha = a_p + a_q and
 * beta = b_p + b_q, keeping pairs with alpha > 0 and beta < 0 (increase) or
 * alpha < 0 and beta > 0 (decrease), and maximises -alpha * beta.
 */

#ifndef JFORGE_SALIENCY_HPP
#define JFORGE_SALIENCY_HPP

#include "jforge/jacobian.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace jforge {

enum class Variant { increase, decrease };

struct SaliencyMap {
    std::vector<double> values;
    std::size_t target = 0;
    Variant variant = Variant::increase;
};

SaliencyMap saliency_increase(const Jacobian &jac, std::size_t target);
SaliencyMap saliency_decrease(const Jacobian &jac, std::size_t target);
SaliencyMap saliency_map(const Jacobian &jac, std::size_t target, Variant variant);

/// Target-row derivatives a_i and summed other-class derivatives b_i for every feature.
struct TargetSplit {
    std::vector<double> target;
    std::vector<double> others;
};

TargetSplit split_target(const Jacobian &jac, std::size_t target);

struct PairSelection {
    std::size_t p1 = 0;
    std::size_t p2 = 0;
    double score = 0.0; ///< -alpha * beta
    double alpha = 0.0;
    double beta = 0.0;
};

enum class PairStatus {
    found,
    no_valid_pair,   ///< no pair satisfies the sign constraints
    domain_exhausted ///< fewer than two features left to choose from
};

struct PairSearch {
    PairStatus status = PairStatus::no_valid_pair;
    PairSelection pair;
};

struct PairSearchOptions {
    /// When non-zero, only the `prefilter` most promising features of the domain are paired.
    std::size_t prefilter = 0;
};

/// Whether (alpha, beta) satisfies the strict sign constraints of `variant`.
bool pair_qualifies(double alpha, double beta, Variant variant);

/**
 * Best pair over `domain` (feature indices, ascending order expected for the
 * tie rule): highest -alpha * beta among qualifying pairs, ties resolved to
 * the lexicographically smallest (p1, p2) with p1 < p2.
 */
PairSearch pairwise_saliency(const Jacobian &jac, std::span<const std::size_t> domain, std::size_t target,
                             Variant variant, const PairSearchOptions &options = {});

/// Number of qualifying pairs among all features.
std::size_t count_qualifying_pairs(const Jacobian &jac, std::size_t target, Variant variant);

} // namespace jforge

#endif // JFORGE_SALIENCY_HPP
