#include "meshattn/errors.hpp"

namespace meshattn {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::RaggedCoords: return "RaggedCoords";
        case ErrorCode::EmptyGraph: return "EmptyGraph";
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::TooManyRequested: return "TooManyRequested";
        case ErrorCode::PlanRequiresMoreLayers: return "PlanRequiresMoreLayers";
        case ErrorCode::EigenFailure: return "EigenFailure";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonSquareMask: return "NonSquareMask";
        case ErrorCode::StepOutOfRange: return "StepOutOfRange";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::NoMaskedNodes: return "NoMaskedNodes";
        case ErrorCode::HorizonExceeded: return "HorizonExceeded";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::TooFewRuns: return "TooFewRuns";
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
        case ErrorCode::CorruptMeta: return "CorruptMeta";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "UnknownError";
}

}  // namespace meshattn
