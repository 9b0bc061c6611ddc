#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace epdyn {

enum class ErrorCode {
    Validation,
    MissingCustomMatrix,
    DegenerateAtEP,
    OutOfRange,
    StepSizeUnderflow,
    DecayUnderflow,
    IllConditionedBasis,
    EPSingularity,
    BlowUp,
    LoopThroughEP,
    GapCollapse,
    EffectiveGapCollapse,
    RefinementLimit,
    EPOnPath,
    AmbiguousEndpoint,
    UnsupportedFamily,
};

const char* to_string(ErrorCode code);

/// Library error. `field()` names the offending input for validation errors;
/// `value()` carries a numeric detail (condition number, pole time, ...) when
/// one is meaningful, NaN otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string field = {},
          double value = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(message), code_(code), field_(std::move(field)), value_(value) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }
    double value() const noexcept { return value_; }

private:
    ErrorCode code_;
    std::string field_;
    double value_;
};

}  // namespace epdyn
