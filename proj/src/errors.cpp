#include "memvol/errors.hpp"

namespace memvol {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::NonPositiveVolatility: return "NonPositiveVolatility";
    case ErrorCode::NegativeLag: return "NegativeLag";
    case ErrorCode::ReversedInterval: return "ReversedInterval";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::WrongKernelFamily: return "WrongKernelFamily";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooFewPaths: return "TooFewPaths";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace memvol
