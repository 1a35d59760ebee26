/**
 * \file dataset.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#ifndef JFORGE_DATASET_HPP
#define JFORGE_DATASET_HPP

#include "jforge/tensor.hpp"

#include <cstddef>
#include <vector>

namespace jforge {

struct Sample {
    Tensor x;
    std::size_t label = 0;
};

/// Labelled samples with features in [0,1] and labels below class_count.
struct LabeledDataset {
    std::vector<Sample> samples;
    std::size_t class_count = 0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

/// Throws DataError on a label >= class_count or a feature outside [0,1].
void check_dataset(const LabeledDataset &data);

/// Samples of `a` followed by samples of `b`; class counts must agree.
LabeledDataset concat(const LabeledDataset &a, const LabeledDataset &b);

} // namespace jforge

#endif // JFORGE_DATASET_HPP
