#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memvol {

enum class ErrorCode {
    InvalidArgument,
    OutOfDomain,
    ParseError,
    NonMonotoneTime,
    NonPositiveVolatility,
    NegativeLag,
    ReversedInterval,
    DegenerateWindow,
    WrongKernelFamily,
    GridMismatch,
    NoConvergence,
    TooFewSamples,
    TooFewPaths,
    GridTooCoarse,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace memvol
