/**
 * \file craft.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Greedy saliency-guided crafting of targeted adversarial samples.
 */

#ifndef JFORGE_CRAFT_HPP
#define JFORGE_CRAFT_HPP

#include "jforge/dataset.hpp"
#include "jforge/jacobian.hpp"
#include "jforge/network.hpp"
#include "jforge/saliency.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jforge {

struct CraftParams {
    double upsilon = 14.5; ///< maximum distortion, percent of features, in (0, 100]
    double theta = 1.0;    ///< change applied to each selected feature, non-zero
    Variant variant = Variant::increase;
    Tap tap = Tap::logits;
    std::size_t prefilter = 0; ///< pair-search prefilter size, 0 for exhaustive
};

enum class FailureReason { none, budget_exhausted, domain_exhausted, no_valid_pair };

std::string failure_name(FailureReason reason);

struct CraftResult {
    Tensor x_star;
    Tensor delta; ///< x_star - x
    bool success = false;
    std::size_t iterations = 0;
    double distortion_pct = 0.0; ///< 100 * |{i : x*_i != x_i}| / M
    FailureReason failure = FailureReason::none;
    std::size_t source = 0;
    std::size_t target = 0;
};

/// floor(M * upsilon / 200): two features change per iteration.
std::size_t max_iterations(double upsilon, std::size_t feature_count);

/// Throws InputError when upsilon, theta or the derived iteration budget are out of range.
void check_params(const CraftParams &params, std::size_t feature_count);

/**
 * Pixel-pair crafting. Each iteration recomputes the Jacobian at the current
 * sample, picks the best pair from the search domain, adds theta to both
 * features (clamped to [0,1]) and drops features that reach 0 or 1 from the
 * domain. Features that theta cannot move are never in the domain. Stops on
 * reaching the target label, exhausting the iteration budget, running out of
 * features, or finding no admissible pair.
 */
CraftResult craft(const Network &net, const Tensor &x, std::size_t target, const CraftParams &params);

/// craft() starting from the all-zero input.
CraftResult craft_from_empty(const Network &net, std::size_t target, const CraftParams &params);

/**
 * Single-feature crafting toward an arbitrary output vector. Succeeds when
 * max_j |F_j(x*) - target_output_j| <= tolerance. The budget bounds the L1
 * norm of the perturbation by M * upsilon / 100. For single-output networks
 * the saliency of a feature is its derivative in the chosen direction.
 */
CraftResult craft_general(const Network &net, const Tensor &x, const Tensor &target_output, const CraftParams &params,
                          double tolerance);

/// Result of one crafting run re-read at a smaller budget.
struct SweepPoint {
    bool success = false;
    std::size_t iterations = 0;
    double distortion_pct = 0.0;
    FailureReason failure = FailureReason::none;
};

/**
 * Outcomes of craft() for each upsilon in `grid` (strictly increasing), from a
 * single run at the largest budget. The loop does not depend on the budget
 * except for when it stops, so each entry equals an independent run.
 */
std::vector<SweepPoint> craft_sweep(const Network &net, const Tensor &x, std::size_t target,
                                    const CraftParams &params, std::span<const double> grid);

struct CampaignRow {
    std::size_t sample_id = 0;
    std::size_t true_label = 0;
    CraftResult result;
};

/**
 * Crafts every sample toward every class other than its predicted source
 * class, or only toward `target` when given (samples already predicted as
 * `target` are skipped). Rows come out sorted by sample id, then target.
 */
std::vector<CampaignRow> run_campaign(const Network &net, const LabeledDataset &samples, const CraftParams &params,
                                      std::optional<std::size_t> target = std::nullopt);

/// `sample_id,s,t,success,iterations,distortion_pct,failure_reason` rows.
void write_campaign_csv(std::ostream &os, const std::vector<CampaignRow> &rows);

/// Successful adversarial samples labelled with the true class of the sample they came from.
LabeledDataset adversarial_dataset(const std::vector<CampaignRow> &rows, std::size_t class_count);

} // namespace jforge

#endif // JFORGE_CRAFT_HPP
