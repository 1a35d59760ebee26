/**
 * \file error.hpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#ifndef JFORGE_ERROR_HPP
#define JFORGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace jforge {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch between a tensor and the layer that consumes it.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed model file; the message carries the line number.
class ParseError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied values outside the documented domain.
class InputError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Dataset content that violates its invariants (labels, pixel range, IDX layout).
class DataError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Inconsistent combination of options, e.g. logits tap without a softmax layer.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace jforge

#endif // JFORGE_ERROR_HPP
