#include "lambda_soliton/error.hpp"

namespace lambda_soliton {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotAProjector: return "NotAProjector";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DegenerateSpectralParams: return "DegenerateSpectralParams";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::NoImprintFound: return "NoImprintFound";
    case ErrorCode::OverlappingImprints: return "OverlappingImprints";
    case ErrorCode::UnsupportedSequence: return "UnsupportedSequence";
    case ErrorCode::NonPhysicalState: return "NonPhysicalState";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownPreset:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidGrid:
    case ErrorCode::RegimeMismatch:
        return false;
    default:
        return true;
    }
}

} // namespace lambda_soliton
