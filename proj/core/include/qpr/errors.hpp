#pragma once

#include <stdexcept>
#include <string>

namespace qpr {

/// Raised when a config file fails to parse or validate. `field()` names the
/// offending key with its section path, e.g. "profile.segments[1].delta".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when an iterative computation exceeds its hard cap. The message
/// carries the diagnostics (what was being computed, where it stalled).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qpr
