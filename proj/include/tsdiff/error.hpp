#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace tsdiff {

enum class ErrorKind {
    invalid_input,
    range,
    divergence,
    stability,
    pole_proximity,
    underflow,
    config,
    analysis,
    io,
};

/// Stable machine-readable name, e.g. "invalid-input".
std::string_view kind_name(ErrorKind kind) noexcept;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// A gain term overflowed; `index` is the 1-based gain position.
class RangeError : public Error {
public:
    RangeError(std::size_t index, const std::string& message)
        : Error(ErrorKind::range, message), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// The observer state became non-finite at `time`.
class DivergenceError : public Error {
public:
    DivergenceError(double time, const std::string& message)
        : Error(ErrorKind::divergence, message), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A scenario field failed validation; `field` is its dotted path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(ErrorKind::config, field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace tsdiff
