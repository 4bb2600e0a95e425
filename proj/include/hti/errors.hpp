#pragma once

#include <stdexcept>
#include <string>

namespace hti {

/// Invalid argument or infeasible parameter combination.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation not available for the given model (e.g. pdf of a sampling-only law).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Randomized construction did not succeed within its retry budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A linear system that must be stable (all eigenvalues negative) is not.
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file failed validation. `pointer()` is the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : std::runtime_error(pointer.empty() ? message : pointer + ": " + message), pointer_(std::move(pointer)) {}

    [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace hti
