/**
 * \file metrics.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/metrics.hpp"

#include "jforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace jforge {

std::pair<std::vector<double>, std::vector<double>> ClassMatrix::paired_off_diagonal(const ClassMatrix &a,
                                                                                     const ClassMatrix &b) {
    if (a.classes() != b.classes())
        throw DimensionError("class matrices differ in size");
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t s = 0; s < a.classes(); ++s)
        for (std::size_t t = 0; t < a.classes(); ++t)
            if (s != t && a.defined(s, t) && b.defined(s, t)) {
                out.first.push_back(a.value(s, t));
                out.second.push_back(b.value(s, t));
            }
    return out;
}

ClassMatrix ClassPairStats::success_rate_matrix() const {
    ClassMatrix m(classes);
    for (std::size_t s = 0; s < classes; ++s)
        for (std::size_t t = 0; t < classes; ++t)
            if (s != t && cell(s, t).count)
                m.set(s, t, cell(s, t).success_rate());
    return m;
}

ClassMatrix ClassPairStats::epsilon_matrix() const {
    ClassMatrix m(classes);
    for (std::size_t s = 0; s < classes; ++s)
        for (std::size_t t = 0; t < classes; ++t)
            if (auto eps = cell(s, t).epsilon(); s != t && eps)
                m.set(s, t, *eps);
    return m;
}

ClassMatrix ClassPairStats::count_matrix() const {
    ClassMatrix m(classes);
    for (std::size_t s = 0; s < classes; ++s)
        for (std::size_t t = 0; t < classes; ++t)
            if (s != t)
                m.set(s, t, static_cast<double>(cell(s, t).count));
    return m;
}

CampaignSummary campaign_stats(std::span<const CraftResult> results, std::size_t classes) {
    if (results.empty())
        throw InputError("campaign statistics need at least one result");
    CampaignSummary sum;
    sum.pairs.classes = classes;
    sum.pairs.cells.assign(classes * classes, {});
    double all = 0.0, succ = 0.0;
    for (const auto &r : results) {
        if (r.source >= classes || r.target >= classes)
            throw IndexError("result class index out of range");
        PairCell &c = sum.pairs.cell(r.source, r.target);
        ++c.count;
        c.distortion_sum += r.distortion_pct;
        all += r.distortion_pct;
        if (r.success) {
            ++c.successes;
            c.success_distortion_sum += r.distortion_pct;
            succ += r.distortion_pct;
            ++sum.successes;
        }
    }
    sum.total = results.size();
    sum.success_rate = static_cast<double>(sum.successes) / static_cast<double>(sum.total);
    sum.mean_distortion_all = all / static_cast<double>(sum.total);
    if (sum.successes)
        sum.epsilon = succ / static_cast<double>(sum.successes);
    return sum;
}

CampaignSummary campaign_stats(const std::vector<CampaignRow> &rows, std::size_t classes) {
    std::vector<CraftResult> results;
    results.reserve(rows.size());
    for (const auto &row : rows)
        results.push_back(row.result);
    return campaign_stats(results, classes);
}

double hardness(std::span<const SweepSample> sweep) {
    if (sweep.size() < 2)
        throw InputError("hardness needs at least two sweep points");
    for (std::size_t k = 1; k < sweep.size(); ++k)
        if (sweep[k].tau < sweep[k - 1].tau)
            throw InputError("sweep success rates must be sorted ascending");
    double h = 0.0;
    for (std::size_t k = 0; k + 1 < sweep.size(); ++k) {
        const auto &lo = sweep[k];
        const auto &hi = sweep[k + 1];
        if (!lo.epsilon && !hi.epsilon)
            continue;
        const double e0 = lo.epsilon.value_or(*hi.epsilon);
        const double e1 = hi.epsilon.value_or(*lo.epsilon);
        h += (hi.tau - lo.tau) * (e1 + e0) / 2.0;
    }
    return h;
}

std::vector<double> default_hardness_grid() { return {0.3, 1.3, 2.6, 5.1, 7.7, 10.2, 12.8, 25.5, 38.3}; }

HardnessReport hardness_campaign(const Network &net, const LabeledDataset &samples, std::span<const double> grid,
                                 const CraftParams &params) {
    if (grid.size() < 2)
        throw InputError("distortion grid needs at least two values");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw InputError("distortion grid must be strictly increasing");
    if (samples.empty())
        throw InputError("hardness campaign needs at least one sample");
    const std::size_t n = net.output_dim();

    HardnessReport report;
    report.grid.assign(grid.begin(), grid.end());
    report.per_budget.assign(grid.size(), ClassPairStats{n, std::vector<PairCell>(n * n)});
    for (const auto &sample : samples.samples) {
        const std::size_t source = predict_label(net, sample.x);
        for (std::size_t t = 0; t < n; ++t) {
            if (t == source)
                continue;
            const auto points = craft_sweep(net, sample.x, t, params, grid);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                PairCell &c = report.per_budget[k].cell(source, t);
                ++c.count;
                c.distortion_sum += points[k].distortion_pct;
                if (points[k].success) {
                    ++c.successes;
                    c.success_distortion_sum += points[k].distortion_pct;
                }
            }
        }
    }
    report.hardness = ClassMatrix(n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t || report.per_budget.front().cell(s, t).count == 0)
                continue;
            std::vector<SweepSample> sweep;
            for (const auto &stats : report.per_budget)
                sweep.push_back({stats.cell(s, t).success_rate(), stats.cell(s, t).epsilon()});
            report.hardness.set(s, t, hardness(sweep));
        }
    return report;
}

double distance_from_jacobian(const Jacobian &jac, std::size_t target, DistanceMode mode, Variant variant) {
    const std::size_t m = jac.cols();
    if (mode == DistanceMode::single) {
        const SaliencyMap map = saliency_map(jac, target, variant);
        const auto positive =
            static_cast<double>(std::count_if(map.values.begin(), map.values.end(), [](double v) { return v > 0.0; }));
        return 1.0 - positive / static_cast<double>(m);
    }
    if (m < 2)
        throw InputError("pairwise distance needs at least two features");
    const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
    return 1.0 - static_cast<double>(count_qualifying_pairs(jac, target, variant)) / pairs;
}

double adversarial_distance(const Network &net, const Tensor &x, std::size_t target, DistanceMode mode,
                            const CraftParams &params) {
    return distance_from_jacobian(forward_derivative(net, x, params.tap), target, mode, params.variant);
}

DistanceReport distance_campaign(const Network &net, const LabeledDataset &samples, DistanceMode mode,
                                 const CraftParams &params, Reduce reduce) {
    if (samples.empty())
        throw InputError("distance campaign needs at least one sample");
    const std::size_t n = net.output_dim();
    std::vector<double> sums(n * n, 0.0);
    std::vector<std::size_t> counts(n * n, 0);
    double lowest = 1.0, total = 0.0;
    std::size_t pairs = 0;
    for (const auto &sample : samples.samples) {
        const std::size_t source = predict_label(net, sample.x);
        const Jacobian jac = forward_derivative(net, sample.x, params.tap);
        for (std::size_t t = 0; t < n; ++t) {
            if (t == source)
                continue;
            const double a = distance_from_jacobian(jac, t, mode, params.variant);
            sums[source * n + t] += a;
            ++counts[source * n + t];
            lowest = std::min(lowest, a);
            total += a;
            ++pairs;
        }
    }
    DistanceReport report;
    report.mean_distance = ClassMatrix(n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            if (counts[s * n + t])
                report.mean_distance.set(s, t, sums[s * n + t] / static_cast<double>(counts[s * n + t]));
    report.robustness = reduce == Reduce::min ? lowest : (pairs ? total / static_cast<double>(pairs) : 1.0);
    return report;
}

double robustness(const Network &net, const LabeledDataset &samples, DistanceMode mode, const CraftParams &params,
                  Reduce reduce) {
    return distance_campaign(net, samples, mode, params, reduce).robustness;
}

double regularity_score(const Tensor &image) {
    if (image.rank() != 2)
        throw InputError("regularity score needs a 2-D image, got " + shape_string(image.shape()));
    const std::size_t rows = image.shape()[0], cols = image.shape()[1];
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = image[r * cols + c];
            if (c + 1 < cols) {
                const double d = v - image[r * cols + c + 1];
                sum += d * d;
            }
            if (r + 1 < rows) {
                const double d = v - image[(r + 1) * cols + c];
                sum += d * d;
            }
        }
    return sum;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
            ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw InputError("rank correlation needs two equally long series of at least two values");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0)
        return 0.0;
    return cov / std::sqrt(va * vb);
}

void write_matrix_csv(std::ostream &os, const ClassMatrix &m) {
    os << std::setprecision(17) << "s\\t";
    for (std::size_t t = 0; t < m.classes(); ++t)
        os << ',' << t;
    os << '\n';
    for (std::size_t s = 0; s < m.classes(); ++s) {
        os << s;
        for (std::size_t t = 0; t < m.classes(); ++t) {
            os << ',';
            if (auto v = m.get(s, t))
                os << *v;
        }
        os << '\n';
    }
}

void write_summary(std::ostream &os, const CampaignSummary &summary) {
    os << std::setprecision(17);
    os << "total=" << summary.total << '\n';
    os << "successes=" << summary.successes << '\n';
    os << "success_rate=" << summary.success_rate << '\n';
    os << "mean_distortion_all=" << summary.mean_distortion_all << '\n';
    os << "epsilon=";
    if (summary.epsilon)
        os << *summary.epsilon;
    os << '\n';
}

} // namespace jforge
