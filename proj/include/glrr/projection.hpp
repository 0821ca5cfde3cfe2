#ifndef GLRR_PROJECTION_HPP
#define GLRR_PROJECTION_HPP

#include <optional>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "glrr/core.hpp"
#include "glrr/subspace.hpp"
#include "glrr/weight.hpp"

namespace glrr
{

/// Projector used for Z(a): "vp" is the Gram-matrix route through Gamma(a),
/// "svp" and "svph" go through the stable basis with plain or compensated
/// polynomial evaluation.
enum class ProjectionMethod
{
    vp,
    svp,
    svph,
};

const char* to_string(ProjectionMethod method) noexcept;
ProjectionMethod parse_projection_method(std::string_view name);

struct ProjectionResult
{
    Signal projected;
    /// Coordinates q of the projection in the basis columns; empty for the
    /// Gamma route, which never forms a basis.
    ComplexVector coords;
    /// Norm of the imaginary part dropped when taking Re(Z q).
    double imag_leak = 0.0;
};

///
/// Least squares min ||A q - b|| for an already whitened A, factored once
/// and reusable for many right-hand sides. Throws rank_deficient when A
/// does not have full column rank.
///
template <typename Scalar>
class WhitenedLeastSquares
{
public:
    using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    WhitenedLeastSquares() = default;

    explicit WhitenedLeastSquares(const MatrixType& a)
    {
        if (a.rows() < a.cols())
        {
            throw Error(ErrorCode::rank_deficient, "more columns than rows");
        }
        m_qr.setThreshold(1e-13);
        m_qr.compute(a);
        if (m_qr.rank() < a.cols())
        {
            throw Error(ErrorCode::rank_deficient, "matrix is numerically rank deficient");
        }
    }

    template <typename Derived>
    VectorType solve(const Eigen::MatrixBase<Derived>& b) const
    {
        return m_qr.solve(b.template cast<Scalar>());
    }

private:
    Eigen::ColPivHouseholderQR<MatrixType> m_qr;
};

/// q = Z^+_W x and Re(Z q): the W-orthogonal projection of x onto colspace(Z).
ProjectionResult weighted_pinv_apply(const ComplexMatrix& z, const WeightOperator& w,
                                     const Vector& x);

/// Weighted least squares coefficients J^+_W r for a real matrix J.
Vector weighted_lstsq(const Matrix& j, const WeightOperator& w, const Vector& r);

ProjectionResult project_stable(const GlrrVector& a, const WeightOperator& w, const Vector& x,
                                HornerMethod method = HornerMethod::plain);

///
/// Cholesky factor of Gamma(a) = Q^T(a) W^{-1} Q(a) with Gamma = U^T U.
/// When W^{-1} = Ch^T Ch is banded, Gamma = (Ch Q)^T (Ch Q) has half
/// bandwidth m = min(p + r, N - r - 1) and is factored in band storage.
/// Otherwise Gamma is formed densely, an O(N^3) fallback.
///
class GammaFactor
{
public:
    static GammaFactor build(const GlrrVector& a, const WeightOperator& w);

    bool banded() const noexcept { return m_banded.has_value(); }
    Index size() const noexcept { return m_size; }
    Index bandwidth() const noexcept { return m_bandwidth; }
    const BandedMatrix& banded_factor() const { return *m_banded; }

    /// Gamma^{-1} V column by column.
    Matrix solve(const Matrix& v) const;
    Vector solve(const Vector& v) const;

private:
    Index m_size      = 0;
    Index m_bandwidth = 0;
    std::optional<BandedMatrix> m_banded;
    Eigen::LLT<Matrix> m_dense;
};

/// Gamma(a)^{-1} v through the band Cholesky factor.
Vector gamma_apply_inverse(const GlrrVector& a, const WeightOperator& w, const Vector& v);

/// x - W^{-1} Q(a) Gamma(a)^{-1} Q^T(a) x.
ProjectionResult project_vp(const GlrrVector& a, const WeightOperator& w, const Vector& x);

/// Dispatch on the method name.
ProjectionResult project(const GlrrVector& a, const WeightOperator& w, const Vector& x,
                         ProjectionMethod method);

///
/// Projector onto Z(a) prepared once and applied to many vectors: the
/// stable variants keep the whitened, factored basis; the Gamma route keeps
/// the Cholesky factor of Gamma(a).
///
class Projector
{
public:
    Projector(const GlrrVector& a, const WeightOperator& w, ProjectionMethod method);

    ProjectionMethod method() const noexcept { return m_method; }
    const GammaFactor& gamma() const;
    ProjectionResult apply(const Vector& x) const;

private:
    GlrrVector m_a;
    WeightOperator m_w;
    ProjectionMethod m_method;
    ComplexMatrix m_z;
    WhitenedLeastSquares<Complex> m_lsq;
    std::optional<GammaFactor> m_gamma;
};

/// Dense Gamma(a) and its 2-norm condition number (N <= 2000).
Matrix gamma_dense(const GlrrVector& a, const WeightOperator& w, Index n);
double gamma_condition(const GlrrVector& a, const WeightOperator& w, Index n);

namespace detail
{

Matrix gamma_dense_unchecked(const GlrrVector& a, const WeightOperator& w, Index n);

} // namespace detail

namespace oracle
{

/// Brute-force reference: null space of the dense Q^T(a) by full SVD, then
/// the dense weighted normal equations. Refuses N > 2000.
Vector project_dense(const GlrrVector& a, const WeightOperator& w, const Vector& x);

} // namespace oracle

} // namespace glrr

#endif
