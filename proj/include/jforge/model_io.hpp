/**
 * \file model_io.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * Plain-text model files:
 *
 *     JFORGE-MODEL v1
 *     <input shape, space separated>
 *     LAYER <index> <variant> <params...>
 *     <one parameter array per line>
 *
 * Variants and their header parameters:
 *     dense <out> <in>                       weights (row-major), bias
 *     conv2d <count> <channels> <kh> <kw> <stride>   kernels, bias
 *     maxpool <window> | avgpool <window>
 *     activation <sigmoid|relu|tanh> | flatten | softmax
 *
 * Values are written with 17 significant digits so that loading reproduces
 * every parameter bit for bit.
 */

#ifndef JFORGE_MODEL_IO_HPP
#define JFORGE_MODEL_IO_HPP

#include "jforge/network.hpp"

#include <iosfwd>
#include <string>

namespace jforge {

inline constexpr const char *model_magic = "JFORGE-MODEL v1";

void write_model(std::ostream &os, const Network &net);
Network read_model(std::istream &is);

/// Validates, then writes through a temporary file renamed into place.
void save_model(const Network &net, const std::string &path);
Network load_model(const std::string &path);

} // namespace jforge

#endif // JFORGE_MODEL_IO_HPP
