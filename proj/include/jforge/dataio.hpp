/**
 * \file dataio.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * MNIST-style IDX ingestion plus the small writers used for reports: binary
 * PGM images, CSV rows and atomic file replacement.
 */

#ifndef JFORGE_DATAIO_HPP
#define JFORGE_DATAIO_HPP

#include "jforge/dataset.hpp"
#include "jforge/tensor.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jforge {

inline constexpr std::uint32_t idx_image_magic = 0x00000803;
inline constexpr std::uint32_t idx_label_magic = 0x00000801;

struct RawImageSet {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels; ///< count x rows x cols, row-major

    std::size_t image_size() const { return rows * cols; }
};

RawImageSet load_idx_images(const std::string &path);
/// Labels must be below `class_count`.
std::vector<std::uint8_t> load_idx_labels(const std::string &path, std::size_t class_count = 10);

RawImageSet parse_idx_images(const std::vector<std::uint8_t> &bytes);
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t> &bytes, std::size_t class_count = 10);

/// pixel / 255 for every pixel of image `index`, flattened row-major.
Tensor normalize_image(const RawImageSet &raw, std::size_t index);
std::vector<Tensor> normalize(const RawImageSet &raw);
/// Nearest byte to 255 * v.
std::uint8_t denormalize(double v);

/**
 * Which records to keep from a loaded set: the first `limit` (0 keeps all),
 * or, when `seed` is set, `limit` indices drawn without replacement and
 * returned in ascending order.
 */
struct SubsetOptions {
    std::size_t limit = 0;
    std::optional<std::uint64_t> seed;
};

std::vector<std::size_t> select_subset(std::size_t total, const SubsetOptions &options);

/// Pairs images with labels into a dataset of flat feature vectors.
LabeledDataset make_dataset(const RawImageSet &raw, const std::vector<std::uint8_t> &labels,
                            const SubsetOptions &subset = {}, std::size_t class_count = 10);

LabeledDataset load_mnist(const std::string &images_path, const std::string &labels_path,
                          const SubsetOptions &subset = {});

/// Binary P5 greyscale, maxval 255, pixel = round(255 v); values must lie in [0,1].
void write_pgm(const Tensor &image, const std::string &path);
void write_pgm(std::ostream &os, const Tensor &image);
/// Reads a P5 file back to a (rows, cols) tensor of values byte / 255.
Tensor read_pgm(const std::string &path);

/// Rescales arbitrary non-negative values to [0,1] by their maximum (for saliency heatmaps).
Tensor heatmap(const Tensor &values, std::size_t rows, std::size_t cols);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string &value);

/// Writes through `<path>.tmp` and renames into place; no partial file survives a failure.
void write_file_atomic(const std::string &path, const std::function<void(std::ostream &)> &writer);

std::vector<std::uint8_t> read_file_bytes(const std::string &path);

} // namespace jforge

#endif // JFORGE_DATAIO_HPP
