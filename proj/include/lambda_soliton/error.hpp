#ifndef LAMBDA_SOLITON_ERROR_HPP
#define LAMBDA_SOLITON_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lambda_soliton {

enum class ErrorCode {
    ZeroVector,
    NotAProjector,
    SingularMatrix,
    DegenerateSpectralParams,
    RegimeMismatch,
    InvalidSpec,
    GridTooNarrow,
    NoImprintFound,
    OverlappingImprints,
    UnsupportedSequence,
    NonPhysicalState,
    InvalidGrid,
    ConfigError,
    UnknownPreset,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// True for errors raised by the numerics (as opposed to bad input/config).
bool is_numerical(ErrorCode code);

} // namespace lambda_soliton

#endif
