/**
 * \file dataio.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/dataio.hpp"

#include "jforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace jforge {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t> &bytes, std::size_t offset) {
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", v);
    return buf;
}

} // namespace

void check_dataset(const LabeledDataset &data) {
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const Sample &s = data.samples[i];
        if (s.label >= data.class_count)
            throw DataError("sample " + std::to_string(i) + ": label " + std::to_string(s.label) +
                            " out of range for " + std::to_string(data.class_count) + " classes");
        for (double v : s.x.values())
            if (!(v >= 0.0 && v <= 1.0))
                throw DataError("sample " + std::to_string(i) + ": feature outside [0,1]");
    }
}

LabeledDataset concat(const LabeledDataset &a, const LabeledDataset &b) {
    if (!a.empty() && !b.empty() && a.class_count != b.class_count)
        throw DataError("cannot concatenate datasets with different class counts");
    LabeledDataset out;
    out.class_count = a.empty() ? b.class_count : a.class_count;
    out.samples.reserve(a.size() + b.size());
    out.samples.insert(out.samples.end(), a.samples.begin(), a.samples.end());
    out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RawImageSet parse_idx_images(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() < 16)
        throw DataError("IDX image header truncated: " + std::to_string(bytes.size()) + " bytes");
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != idx_image_magic)
        throw DataError("not an IDX image file: magic " + hex32(magic) + ", expected " + hex32(idx_image_magic));
    RawImageSet raw;
    raw.count = read_be32(bytes, 4);
    raw.rows = read_be32(bytes, 8);
    raw.cols = read_be32(bytes, 12);
    const std::size_t payload = raw.count * raw.rows * raw.cols;
    if (bytes.size() < 16 + payload)
        throw DataError("IDX image payload truncated: expected " + std::to_string(payload) + " bytes, found " +
                        std::to_string(bytes.size() - 16));
    if (bytes.size() > 16 + payload)
        throw DataError("IDX image file has " + std::to_string(bytes.size() - 16 - payload) + " trailing bytes");
    raw.pixels.assign(bytes.begin() + 16, bytes.end());
    return raw;
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t> &bytes, std::size_t class_count) {
    if (bytes.size() < 8)
        throw DataError("IDX label header truncated: " + std::to_string(bytes.size()) + " bytes");
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != idx_label_magic)
        throw DataError("not an IDX label file: magic " + hex32(magic) + ", expected " + hex32(idx_label_magic));
    const std::size_t count = read_be32(bytes, 4);
    if (bytes.size() < 8 + count)
        throw DataError("IDX label payload truncated: expected " + std::to_string(count) + " bytes, found " +
                        std::to_string(bytes.size() - 8));
    if (bytes.size() > 8 + count)
        throw DataError("IDX label file has " + std::to_string(bytes.size() - 8 - count) + " trailing bytes");
    std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.end());
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= class_count)
            throw DataError("label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                            " out of range");
    return labels;
}

RawImageSet load_idx_images(const std::string &path) { return parse_idx_images(read_file_bytes(path)); }

std::vector<std::uint8_t> load_idx_labels(const std::string &path, std::size_t class_count) {
    return parse_idx_labels(read_file_bytes(path), class_count);
}

Tensor normalize_image(const RawImageSet &raw, std::size_t index) {
    if (index >= raw.count)
        throw IndexError("image index " + std::to_string(index) + " out of range");
    const std::size_t n = raw.image_size();
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = raw.pixels[index * n + i] / 255.0;
    return Tensor({n}, std::move(values));
}

std::vector<Tensor> normalize(const RawImageSet &raw) {
    std::vector<Tensor> out;
    out.reserve(raw.count);
    for (std::size_t i = 0; i < raw.count; ++i)
        out.push_back(normalize_image(raw, i));
    return out;
}

std::uint8_t denormalize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::vector<std::size_t> select_subset(std::size_t total, const SubsetOptions &options) {
    const std::size_t k = options.limit == 0 ? total : std::min(options.limit, total);
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (!options.seed) {
        idx.resize(k);
        return idx;
    }
    std::mt19937_64 rng(*options.seed);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, total - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

LabeledDataset make_dataset(const RawImageSet &raw, const std::vector<std::uint8_t> &labels,
                            const SubsetOptions &subset, std::size_t class_count) {
    if (labels.size() != raw.count)
        throw DataError("image count " + std::to_string(raw.count) + " != label count " +
                        std::to_string(labels.size()));
    LabeledDataset data;
    data.class_count = class_count;
    for (std::size_t i : select_subset(raw.count, subset)) {
        if (labels[i] >= class_count)
            throw DataError("label " + std::to_string(labels[i]) + " out of range");
        data.samples.push_back({normalize_image(raw, i), labels[i]});
    }
    return data;
}

LabeledDataset load_mnist(const std::string &images_path, const std::string &labels_path,
                          const SubsetOptions &subset) {
    return make_dataset(load_idx_images(images_path), load_idx_labels(labels_path), subset);
}

void write_pgm(std::ostream &os, const Tensor &image) {
    if (image.rank() != 2)
        throw InputError("PGM output needs a 2-D image, got " + shape_string(image.shape()));
    for (double v : image.values())
        if (!(v >= 0.0 && v <= 1.0))
            throw InputError("PGM pixel value outside [0,1]");
    os << "P5\n" << image.shape()[1] << ' ' << image.shape()[0] << "\n255\n";
    for (double v : image.values())
        os.put(static_cast<char>(denormalize(v)));
}

void write_pgm(const Tensor &image, const std::string &path) {
    if (image.rank() != 2)
        throw InputError("PGM output needs a 2-D image, got " + shape_string(image.shape()));
    write_file_atomic(path, [&](std::ostream &os) { write_pgm(os, image); });
}

Tensor read_pgm(const std::string &path) {
    const auto bytes = read_file_bytes(path);
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos]))
            ++pos;
        std::string tok;
        while (pos < bytes.size() && !std::isspace(bytes[pos]))
            tok.push_back(static_cast<char>(bytes[pos++]));
        return tok;
    };
    if (token() != "P5")
        throw DataError("'" + path + "' is not a binary PGM file");
    const std::size_t width = std::stoul(token());
    const std::size_t height = std::stoul(token());
    if (token() != "255")
        throw DataError("only maxval 255 PGM files are supported");
    ++pos; // single whitespace after maxval
    if (bytes.size() < pos + width * height)
        throw DataError("PGM pixel data truncated");
    std::vector<double> values(width * height);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = bytes[pos + i] / 255.0;
    return Tensor({height, width}, std::move(values));
}

Tensor heatmap(const Tensor &values, std::size_t rows, std::size_t cols) {
    if (rows * cols != values.size())
        throw DimensionError("heatmap of " + std::to_string(values.size()) + " values cannot be shaped " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    double peak = 0.0;
    for (double v : values.values())
        peak = std::max(peak, std::abs(v));
    std::vector<double> out(values.size(), 0.0);
    if (peak > 0.0)
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::abs(values[i]) / peak;
    return Tensor({rows, cols}, std::move(out));
}

std::string csv_field(const std::string &value) {
    if (value.find_first_of(",\"\n") == std::string::npos)
        return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file_atomic(const std::string &path, const std::function<void(std::ostream &)> &writer) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + tmp + "' for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::filesystem::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw IoError("write to '" + tmp + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

} // namespace jforge
