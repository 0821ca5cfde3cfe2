#ifndef GLRR_FFT_HPP
#define GLRR_FFT_HPP

#include "glrr/core.hpp"

namespace glrr::fft
{

/// Unitary DFT of every column: y_k = N^{-1/2} sum_j x_j exp(-2 pi i k j / N).
ComplexMatrix forward(const ComplexMatrix& x);

/// Inverse of `forward`: x_j = N^{-1/2} sum_k y_k exp(2 pi i k j / N).
ComplexMatrix inverse(const ComplexMatrix& y);

} // namespace glrr::fft

#endif
