#pragma once

#include <stdexcept>
#include <string>

namespace pdenet {

/// Shape or channel mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid configuration (bad flag combination, malformed model file, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: NaN/Inf in a result, non-convergent iteration,
/// violated contraction assumption.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File system / format failure with path context.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pdenet
