#ifndef GLRR_CORE_HPP
#define GLRR_CORE_HPP

#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "glrr/banded.hpp"
#include "glrr/error.hpp"

///
/// Domain types and exact algebra of generalized linear recurrence
/// relations (GLRRs) on real time series.
///
/// Index convention: all indices in this library are 0-based. A GLRR
/// coefficient vector a = (a_0, ..., a_r) annihilates a series s when
/// sum_k a_k s_{i+k} = 0 for every i = 0, ..., N-r-1.
///
namespace glrr
{

using Vector        = Eigen::VectorXd;
using Matrix        = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Real-valued series of length N >= 3 with finite entries.
class Signal
{
public:
    Signal() = default;
    explicit Signal(Vector values);
    Signal(std::initializer_list<double> values);

    const Vector& values() const noexcept { return m_values; }
    Index size() const noexcept { return m_values.size(); }
    double operator[](Index i) const { return m_values[i]; }

private:
    Vector m_values;
};

/// L x (N-L+1) Hankel matrix of lagged windows.
struct TrajectoryMatrix
{
    Matrix entries;
    Index window = 0;
};

/// Nonzero coefficient vector a in R^{r+1}, r >= 1.
class GlrrVector
{
public:
    GlrrVector() = default;
    explicit GlrrVector(Vector coeffs);
    GlrrVector(std::initializer_list<double> coeffs);

    const Vector& coeffs() const noexcept { return m_coeffs; }
    Index order() const noexcept { return m_coeffs.size() - 1; }
    Index size() const noexcept { return m_coeffs.size(); }
    double operator[](Index i) const { return m_coeffs[i]; }

private:
    Vector m_coeffs;
};

/// GLRR with coefficient `tau` removed; the full vector has -1 there.
struct ReducedGlrr
{
    Vector dot_a;
    Index tau = 0;

    Index order() const noexcept { return dot_a.size(); }
};

struct NormalizedGlrr
{
    GlrrVector a;
    Index tau = 0;
};

/// Boundary indices I(tau) of the series and retained coefficient
/// indices K(tau), both sorted and of size r.
struct IndexSets
{
    std::vector<Index> boundary;
    std::vector<Index> mask;
};

TrajectoryMatrix embed(const Signal& series, Index window);

/// Numerical rank of the trajectory matrix with the most balanced window,
/// counting singular values above `tol` times the largest one. The result
/// is capped by min(L, N-L+1).
Index series_rank(const Signal& series, double tol = 1e-9);

/// The (N-r) x N band matrix Q^T(a) whose row i holds a at columns i..i+r.
BandedMatrix q_transpose_matrix(const GlrrVector& a, Index n);

/// Q^T(b) x for an arbitrary stencil b (which may be a unit vector).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
apply_q_transpose(const Vector& stencil, const Eigen::MatrixBase<Derived>& x)
{
    using Scalar   = typename Derived::Scalar;
    const Index n  = x.size();
    const Index r  = stencil.size() - 1;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n - r);
    for (Index i = 0; i < n - r; ++i)
    {
        Scalar acc(0);
        for (Index k = 0; k <= r; ++k)
        {
            acc += stencil[k] * x[i + k];
        }
        y[i] = acc;
    }
    return y;
}

/// Q(b) y, the adjoint stencil application producing a length-N vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
apply_q(const Vector& stencil, const Eigen::MatrixBase<Derived>& y)
{
    using Scalar  = typename Derived::Scalar;
    const Index r = stencil.size() - 1;
    const Index n = y.size() + r;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
    for (Index i = 0; i < y.size(); ++i)
    {
        for (Index k = 0; k <= r; ++k)
        {
            x[i + k] += stencil[k] * y[i];
        }
    }
    return x;
}

/// ||Q^T(a) s||_2; zero exactly when s satisfies GLRR(a).
double glrr_residual(const Signal& series, const GlrrVector& a);

/// Self-convolution a^2 of length 2r+1; coefficients of g_a(z)^2.
GlrrVector acyclic_square(const GlrrVector& a);

/// Inserts -1 at position tau.
GlrrVector h_tau(const ReducedGlrr& reduced);

/// Removes position tau; requires a_tau == -1.
ReducedGlrr h_tau_inverse(const GlrrVector& a, Index tau);

/// tau = first index of max |b_i|; a = -b / b_tau so that a_tau = -1 and
/// |a_i| <= 1.
NormalizedGlrr choose_tau_and_normalize(const GlrrVector& b);

IndexSets index_sets(Index tau, Index n, Index r);

} // namespace glrr

#endif
