#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ergo {

/// Base of every error the library throws on bad input or exhausted budgets.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    enum class Kind { Malformed, NonProbabilityWeights, MeasureNotPreserved, NonCommuting };

    ValidationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

    // Filled for MeasureNotPreserved (first only) and NonCommuting (both).
    std::size_t generator_a = 0;
    std::size_t generator_b = 0;
    std::uint32_t witness_state = 0;

private:
    Kind kind_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A conditioning cell carries zero mass; the caller forgot normalize_support.
class ZeroWeightCell : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : Error(what), required(required), budget(budget)
    {
    }
    std::uint64_t required;
    std::uint64_t budget;
};

class NotMeasurable : public Error {
public:
    using Error::Error;
};

class InvarianceViolated : public Error {
public:
    using Error::Error;
};

class UndecidableResonance : public Error {
public:
    using Error::Error;
};

/// An internal consistency assertion failed. Always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ergo
