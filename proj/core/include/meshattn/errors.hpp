#pragma once

#include <stdexcept>
#include <string>

namespace meshattn {

enum class ErrorCode {
    IndexOutOfRange,
    RaggedCoords,
    EmptyGraph,
    NonSquare,
    TooManyRequested,
    PlanRequiresMoreLayers,
    EigenFailure,
    ShapeMismatch,
    NonSquareMask,
    StepOutOfRange,
    NonFiniteValue,
    NonFiniteLoss,
    NoMaskedNodes,
    HorizonExceeded,
    TooShort,
    TooFewRuns,
    NonPositiveInput,
    BudgetTooSmall,
    CorruptMeta,
    LengthMismatch,
    UnsupportedVersion,
    DegenerateGeometry,
    InvalidConfig,
    IoFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace meshattn
