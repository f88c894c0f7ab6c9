#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace sinet {

// Dimension mismatch between a net and its input, or between chained nets.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed wire data. layer() is set when the fault is inside a layer record.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg, std::optional<std::size_t> layer = std::nullopt)
        : std::runtime_error(layer ? msg + " (layer " + std::to_string(*layer) + ")" : msg),
          layer_(layer) {}
    std::optional<std::size_t> layer() const noexcept { return layer_; }

private:
    std::optional<std::size_t> layer_;
};

// Argument outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Bad construction parameters (duplicate samples, invalid ApproxParams, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// More samples than an interpolation net of the requested size can fit.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A data-type invariant does not hold (e.g. |c_n| >= M).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sinet
