#ifndef IMIMIC_ERRORS_HPP
#define IMIMIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace imimic {

// Failure classes surfaced by the library. Grouped by the exit code the CLI
// maps them to: Io -> 2, Config -> 3, Pipeline -> 4.
enum class ErrorCode {
    // io
    DecodeFailure,
    MixedDimensions,
    TooFewFrames,
    // config
    ConfigParse,
    JointLimitConfig,
    NonPositiveInertia,
    NonPositiveInput,
    UncalibratedQuantity,
    LinkOutOfFrame,
    // pipeline / data
    DimensionMismatch,
    NonConsecutiveIndex,
    EmptyObject,
    DegenerateBlob,
    AllFramesEmpty,
    InsufficientObservations,
    ZeroRadius,
    NotInitialized,
    NoMotion,
};

enum class ErrorClass { Io, Config, Pipeline };

constexpr ErrorClass error_class(ErrorCode c) {
    switch (c) {
        case ErrorCode::DecodeFailure:
        case ErrorCode::MixedDimensions:
        case ErrorCode::TooFewFrames:
            return ErrorClass::Io;
        case ErrorCode::ConfigParse:
        case ErrorCode::JointLimitConfig:
        case ErrorCode::NonPositiveInertia:
        case ErrorCode::NonPositiveInput:
        case ErrorCode::UncalibratedQuantity:
        case ErrorCode::LinkOutOfFrame:
            return ErrorClass::Config;
        default:
            return ErrorClass::Pipeline;
    }
}

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace imimic

#endif
