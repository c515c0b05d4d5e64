#pragma once

#include <stdexcept>
#include <string>

namespace klab {

/// Base class for all library errors. `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct InvalidMatrixError : Error {
    explicit InvalidMatrixError(const std::string& what) : Error("invalid-matrix", what) {}
};

struct NotRegularError : Error {
    explicit NotRegularError(const std::string& what) : Error("not-regular", what) {}
};

struct InsufficientGradesError : Error {
    explicit InsufficientGradesError(const std::string& what)
        : Error("insufficient-grades", what) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error("dimension-mismatch", what) {}
};

struct IndexError : Error {
    explicit IndexError(const std::string& what) : Error("index-out-of-range", what) {}
};

struct DegenerateOperatorError : Error {
    explicit DegenerateOperatorError(const std::string& what)
        : Error("degenerate-operator", what) {}
};

struct EmptyRangeError : Error {
    explicit EmptyRangeError(const std::string& what) : Error("empty-range", what) {}
};

struct IllConditionedError : Error {
    explicit IllConditionedError(const std::string& what)
        : Error("ill-conditioned-span", what) {}
};

struct ConditionViolationError : Error {
    explicit ConditionViolationError(const std::string& what)
        : Error("condition-5-violation", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

} // namespace klab
