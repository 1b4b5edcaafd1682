#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epicast {

enum class ErrorCode {
    // ingestion
    MissingColumn,
    DuplicateColumn,
    MalformedRow,
    NonNumericCell,
    NegativeCount,
    DeathsExceedConfirmed,
    InvalidDate,
    NonContiguousDays,
    EmptyDataset,
    // splitting
    InvalidRange,
    RangeOverlap,
    RangeOrder,
    RangeOutOfBounds,
    EmptyTrain,
    // features / normalization
    UnknownColumn,
    TargetInFeatures,
    ConstantFeature,
    InvalidBounds,
    TooFewRows,
    // models
    RankDeficient,
    DegreeZero,
    ShapeMismatch,
    InvalidConfig,
    UnnormalizedInput,
    InconsistentFactors,
    // metrics
    LengthMismatch,
    EmptyInput,
    AllActualsZero,
    // I/O
    IoError,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carrying a stable code. The CLI prints it as `error[Code]: message`.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace epicast
