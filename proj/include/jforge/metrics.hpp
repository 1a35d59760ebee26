/**
 * \file metrics.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Campaign statistics and attack-hardness measures.
 */

#ifndef JFORGE_METRICS_HPP
#define JFORGE_METRICS_HPP

#include "jforge/craft.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jforge {

/// Square class x class matrix whose cells may be undefined (the diagonal, or pairs without data).
class ClassMatrix {
public:
    ClassMatrix() = default;
    explicit ClassMatrix(std::size_t classes) : n_(classes), values_(classes * classes, 0.0), defined_(classes * classes, false) {}

    std::size_t classes() const { return n_; }
    std::optional<double> get(std::size_t s, std::size_t t) const {
        return defined_[s * n_ + t] ? std::optional<double>(values_[s * n_ + t]) : std::nullopt;
    }
    /// Stored value, 0 for undefined cells.
    double value(std::size_t s, std::size_t t) const { return values_[s * n_ + t]; }
    bool defined(std::size_t s, std::size_t t) const { return defined_[s * n_ + t]; }
    void set(std::size_t s, std::size_t t, double v) {
        values_[s * n_ + t] = v;
        defined_[s * n_ + t] = true;
    }

    /// Values of cells defined in both matrices, off the diagonal, in row-major order.
    static std::pair<std::vector<double>, std::vector<double>> paired_off_diagonal(const ClassMatrix &a,
                                                                                 const ClassMatrix &b);

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
    std::vector<bool> defined_;
};

struct PairCell {
    std::size_t count = 0;
    std::size_t successes = 0;
    double distortion_sum = 0.0;         ///< over all attempts
    double success_distortion_sum = 0.0; ///< over successful attempts

    double success_rate() const { return count ? static_cast<double>(successes) / static_cast<double>(count) : 0.0; }
    /// Mean distortion of successful attempts; absent when none succeeded.
    std::optional<double> epsilon() const {
        return successes ? std::optional<double>(success_distortion_sum / static_cast<double>(successes)) : std::nullopt;
    }
};

struct ClassPairStats {
    std::size_t classes = 0;
    std::vector<PairCell> cells; ///< classes x classes, row = source

    const PairCell &cell(std::size_t s, std::size_t t) const { return cells[s * classes + t]; }
    PairCell &cell(std::size_t s, std::size_t t) { return cells[s * classes + t]; }
    ClassMatrix success_rate_matrix() const;
    ClassMatrix epsilon_matrix() const;
    ClassMatrix count_matrix() const;
};

struct CampaignSummary {
    std::size_t total = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double mean_distortion_all = 0.0;
    std::optional<double> epsilon; ///< mean distortion over successful samples
    ClassPairStats pairs;
};

/// Throws InputError on an empty result set.
CampaignSummary campaign_stats(std::span<const CraftResult> results, std::size_t classes);
CampaignSummary campaign_stats(const std::vector<CampaignRow> &rows, std::size_t classes);

/// (success rate, mean distortion of successes) at one budget of a sweep.
struct SweepSample {
    double tau = 0.0;
    std::optional<double> epsilon;
};

/**
 * Trapezoid-rule area under epsilon as a function of tau:
 * sum_k (tau_{k+1} - tau_k) (eps_{k+1} + eps_k) / 2. Taus must be
 * non-decreasing and there must be at least two points. An absent epsilon
 * takes the value of the other end of its segment; a segment with both ends
 * absent contributes nothing.
 */
double hardness(std::span<const SweepSample> sweep);

struct HardnessReport {
    std::vector<double> grid;
    std::vector<ClassPairStats> per_budget; ///< one per grid value
    ClassMatrix hardness;
};

/// Hardness of every class pair from crafting runs over a strictly increasing upsilon grid.
HardnessReport hardness_campaign(const Network &net, const LabeledDataset &samples, std::span<const double> grid,
                                 const CraftParams &params);

/// The default nine-value grid, in percent.
std::vector<double> default_hardness_grid();

enum class DistanceMode {
    single,  ///< fraction of features with a strictly positive saliency value
    pairwise ///< fraction of feature pairs satisfying the pair sign constraints
};

enum class Reduce { min, mean };

/// 1 minus the normalised count of admissible features (or pairs) for `target`, from a precomputed Jacobian.
double distance_from_jacobian(const Jacobian &jac, std::size_t target, DistanceMode mode, Variant variant);

/// Adversarial distance A(x, t) at the first crafting iteration, in [0,1].
double adversarial_distance(const Network &net, const Tensor &x, std::size_t target, DistanceMode mode,
                            const CraftParams &params);

struct DistanceReport {
    ClassMatrix mean_distance; ///< mean A(x,t) over samples of predicted source s
    double robustness = 1.0;   ///< reduction of A over every (x, t != label(x))
};

DistanceReport distance_campaign(const Network &net, const LabeledDataset &samples, DistanceMode mode,
                                 const CraftParams &params, Reduce reduce = Reduce::min);

/// Minimum (or mean) adversarial distance over all samples and all targets other than their label.
double robustness(const Network &net, const LabeledDataset &samples, DistanceMode mode, const CraftParams &params,
                  Reduce reduce = Reduce::min);

/// Sum of squared differences over horizontally and vertically adjacent pixels of a 2-D image.
double regularity_score(const Tensor &image);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

/// Class-indexed CSV with a header row and column; undefined cells are empty.
void write_matrix_csv(std::ostream &os, const ClassMatrix &m);

/// `key=value` lines.
void write_summary(std::ostream &os, const CampaignSummary &summary);

} // namespace jforge

#endif // JFORGE_METRICS_HPP
