#pragma once

#include <stdexcept>
#include <string>

namespace kgfw {

/// Raised when a numerical stage (eigensolver, pairing, refinement) cannot
/// produce a result that meets its contract. Precondition violations use
/// std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scenario configuration that cannot be run.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace kgfw
