#ifndef GLRR_SUBSPACE_HPP
#define GLRR_SUBSPACE_HPP

#include <vector>

#include "glrr/core.hpp"
#include "glrr/horner.hpp"

namespace glrr
{

/// How values of the characteristic polynomial are computed.
enum class HornerMethod
{
    plain,
    compensated,
};

const char* to_string(HornerMethod method) noexcept;

///
/// Orthonormal complex basis of Z(a) together with the grid rotation and
/// the circulant eigenvalues g_a(exp(i(2 pi j/N - alpha0))) used to build it.
///
struct SubspaceBasis
{
    ComplexMatrix z;
    double alpha0 = 0.0;
    ComplexVector eigvals;
    HornerMethod method = HornerMethod::plain;

    double min_abs_eig() const { return eigvals.cwiseAbs().minCoeff(); }
    double max_abs_eig() const { return eigvals.cwiseAbs().maxCoeff(); }
    double condition() const { return max_abs_eig() / min_abs_eig(); }
};

struct RotationDiagnostics
{
    double alpha0      = 0.0;
    double min_abs_eig = 0.0;
    double max_abs_eig = 0.0;
    double condition   = 1.0;
};

struct ConditionSample
{
    Index n = 0;
    RotationDiagnostics diagnostics;
};

/// g_a(z) = sum_k a_k z^k.
Complex eval_poly(const GlrrVector& a, Complex z);
Complex eval_poly_compensated(const GlrrVector& a, Complex z);

/// Eigenvalues of the circulant extension of Q^T(a) on the grid rotated
/// by `alpha`: entry j is g_a(exp(i(2 pi j/N - alpha))).
ComplexVector circulant_eigenvalues(const GlrrVector& a, Index n, double alpha,
                                    HornerMethod method = HornerMethod::plain);

/// Rotation in (-pi/N, pi/N] maximizing the smallest |eigenvalue|.
/// A uniform scan of 512 candidates is refined by golden-section search
/// inside the best cell.
RotationDiagnostics find_alpha0(const GlrrVector& a, Index n,
                                HornerMethod method = HornerMethod::plain);

/// Orthonormal basis of Z(a) built from the diagonalized circulant.
/// With HornerMethod::compensated the right-hand sides are recomputed by
/// compensated polynomial evaluation after orthonormalization.
SubspaceBasis basis_stable(const GlrrVector& a, Index n,
                           HornerMethod method = HornerMethod::plain);

/// Circulant condition numbers at the optimal rotation for each length.
std::vector<ConditionSample> condition_scaling_probe(const GlrrVector& a,
                                                     const std::vector<Index>& n_list);

namespace detail
{

/// Orthonormal basis Q of colspace(m) and the r x r matrix O with m O = Q.
/// Householder QR, switching to the SVD when the triangular factor's
/// diagonal spread exceeds 1e12.
struct Orthonormalized
{
    ComplexMatrix q;
    ComplexMatrix o;
};

Orthonormalized orthonormalize(const ComplexMatrix& m);

/// F_N applied to the last r unit vectors; entry (k, c) is
/// exp(2 pi i k (r-c)/N) / sqrt(N).
ComplexMatrix fourier_unit_columns(Index n, Index r);

} // namespace detail

} // namespace glrr

#endif
