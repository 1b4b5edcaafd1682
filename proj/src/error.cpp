#include "epicast/error.hpp"

namespace epicast {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateColumn: return "DuplicateColumn";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::DeathsExceedConfirmed: return "DeathsExceedConfirmed";
    case ErrorCode::InvalidDate: return "InvalidDate";
    case ErrorCode::NonContiguousDays: return "NonContiguousDays";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::RangeOverlap: return "RangeOverlap";
    case ErrorCode::RangeOrder: return "RangeOrder";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::EmptyTrain: return "EmptyTrain";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::TargetInFeatures: return "TargetInFeatures";
    case ErrorCode::ConstantFeature: return "ConstantFeature";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegreeZero: return "DegreeZero";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnnormalizedInput: return "UnnormalizedInput";
    case ErrorCode::InconsistentFactors: return "InconsistentFactors";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::AllActualsZero: return "AllActualsZero";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace epicast
