#include "glrr/error.hpp"

namespace glrr
{

const char* to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::window_out_of_range: return "window-out-of-range";
    case ErrorCode::zero_series: return "zero-series";
    case ErrorCode::length_too_short: return "length-too-short";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::tau_out_of_range: return "tau-out-of-range";
    case ErrorCode::nonstationary: return "nonstationary-parameter";
    case ErrorCode::incompatible_dimension: return "incompatible-dimension";
    case ErrorCode::io_format: return "format";
    case ErrorCode::degenerate_polynomial: return "degenerate-polynomial";
    case ErrorCode::rank_deficient: return "rank-deficient";
    case ErrorCode::cholesky_breakdown: return "cholesky-breakdown";
    case ErrorCode::singular_boundary_minor: return "singular-boundary-minor";
    case ErrorCode::normalization_breakdown: return "normalization-breakdown";
    case ErrorCode::size_limit: return "size-limit";
    }
    return "unknown";
}

int exit_status(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::degenerate_polynomial:
    case ErrorCode::rank_deficient:
    case ErrorCode::cholesky_breakdown:
    case ErrorCode::singular_boundary_minor:
    case ErrorCode::normalization_breakdown:
        return 3;
    case ErrorCode::size_limit:
        return 4;
    default:
        return 2;
    }
}

} // namespace glrr
