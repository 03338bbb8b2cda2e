#pragma once

#include <stdexcept>
#include <string>

namespace vine {

/// Sizes of two sequences that must agree do not.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Zero-length segment or similar degenerate input.
struct GeometryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// A value violates a domain invariant. `field()` names the offending field
/// (dotted path, e.g. "targets[2].x") when known.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& message, std::string field = {})
        : std::invalid_argument(field.empty() ? message : field + ": " + message),
          message_(message),
          field_(std::move(field)) {}

    const std::string& message() const noexcept { return message_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string message_;
    std::string field_;
};

/// Every sample in an iteration produced a non-finite objective value.
struct OptimizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vine
