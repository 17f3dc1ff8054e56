#include "imimic/errors.hpp"

namespace imimic {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DecodeFailure: return "DecodeFailure";
        case ErrorCode::MixedDimensions: return "MixedDimensions";
        case ErrorCode::TooFewFrames: return "TooFewFrames";
        case ErrorCode::ConfigParse: return "ConfigParse";
        case ErrorCode::JointLimitConfig: return "JointLimitConfig";
        case ErrorCode::NonPositiveInertia: return "NonPositiveInertia";
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::UncalibratedQuantity: return "UncalibratedQuantity";
        case ErrorCode::LinkOutOfFrame: return "LinkOutOfFrame";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonConsecutiveIndex: return "NonConsecutiveIndex";
        case ErrorCode::EmptyObject: return "EmptyObject";
        case ErrorCode::DegenerateBlob: return "DegenerateBlob";
        case ErrorCode::AllFramesEmpty: return "AllFramesEmpty";
        case ErrorCode::InsufficientObservations: return "InsufficientObservations";
        case ErrorCode::ZeroRadius: return "ZeroRadius";
        case ErrorCode::NotInitialized: return "NotInitialized";
        case ErrorCode::NoMotion: return "NoMotion";
    }
    return "Unknown";
}

}  // namespace imimic
