#ifndef GLRR_ERROR_HPP
#define GLRR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace glrr
{

enum class ErrorCode
{
    // input and format problems
    invalid_argument,
    window_out_of_range,
    zero_series,
    length_too_short,
    normalization,
    tau_out_of_range,
    nonstationary,
    incompatible_dimension,
    io_format,
    // numerical failures
    degenerate_polynomial,
    rank_deficient,
    cholesky_breakdown,
    singular_boundary_minor,
    normalization_breakdown,
    // refusals
    size_limit,
};

const char* to_string(ErrorCode code) noexcept;

/// Process exit status associated with an error category:
/// 2 for input/format errors, 3 for numerical failures, 4 for size refusals.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          m_code(code)
    {
    }

    ErrorCode code() const noexcept
    {
        return m_code;
    }

private:
    ErrorCode m_code;
};

} // namespace glrr

#endif
