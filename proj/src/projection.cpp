#include "glrr/projection.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace glrr
{

namespace
{

constexpr Index kDenseOracleLimit = 2000;

void check_lengths(const GlrrVector& a, const WeightOperator& w, Index n)
{
    if (n <= a.order())
    {
        throw Error(ErrorCode::length_too_short,
                    "N = " + std::to_string(n) + " must exceed r = " +
                        std::to_string(a.order()));
    }
    if (w.size() != n)
    {
        throw Error(ErrorCode::incompatible_dimension,
                    "weight of size " + std::to_string(w.size()) + " for a series of length " +
                        std::to_string(n));
    }
}

ProjectionResult finish(const ComplexMatrix& z, ComplexVector q)
{
    const ComplexVector zq = z * q;
    ProjectionResult out;
    out.projected = Signal(zq.real());
    out.imag_leak = zq.imag().norm();
    out.coords    = std::move(q);
    return out;
}

/// Ch Q(a) as an N x (N-r) band matrix with r sub- and p superdiagonals.
BandedMatrix factor_times_q(const BandedMatrix& ch, const Vector& a)
{
    const Index n = ch.rows();
    const Index r = a.size() - 1;
    const Index p = ch.upper();
    BandedMatrix out(n, n - r, r, p);
    for (Index row = 0; row < n; ++row)
    {
        for (Index col = out.row_begin(row); col < out.row_end(row); ++col)
        {
            double acc      = 0.0;
            const Index kend = std::min(row + p, col + r);
            for (Index k = std::max(row, col); k <= kend; ++k)
            {
                acc += ch(row, k) * a[k - col];
            }
            out.ref(row, col) = acc;
        }
    }
    return out;
}

} // namespace

const char* to_string(ProjectionMethod method) noexcept
{
    switch (method)
    {
    case ProjectionMethod::vp: return "vp";
    case ProjectionMethod::svp: return "svp";
    case ProjectionMethod::svph: return "svph";
    }
    return "unknown";
}

ProjectionMethod parse_projection_method(std::string_view name)
{
    if (name == "vp")
    {
        return ProjectionMethod::vp;
    }
    if (name == "svp")
    {
        return ProjectionMethod::svp;
    }
    if (name == "svph")
    {
        return ProjectionMethod::svph;
    }
    throw Error(ErrorCode::invalid_argument, "unknown projection method '" + std::string(name) + "'");
}

ProjectionResult weighted_pinv_apply(const ComplexMatrix& z, const WeightOperator& w,
                                     const Vector& x)
{
    if (z.rows() != x.size() || w.size() != x.size())
    {
        throw Error(ErrorCode::incompatible_dimension, "basis, weight and series sizes differ");
    }
    const WhitenedLeastSquares<Complex> lsq(w.whiten(z));
    return finish(z, lsq.solve(w.whiten(x)));
}

Vector weighted_lstsq(const Matrix& j, const WeightOperator& w, const Vector& r)
{
    if (j.rows() != r.size() || w.size() != r.size())
    {
        throw Error(ErrorCode::incompatible_dimension, "Jacobian, weight and residual sizes differ");
    }
    const WhitenedLeastSquares<double> lsq(w.whiten(j));
    return lsq.solve(w.whiten(r));
}

ProjectionResult project_stable(const GlrrVector& a, const WeightOperator& w, const Vector& x,
                                HornerMethod method)
{
    check_lengths(a, w, x.size());
    const SubspaceBasis basis = basis_stable(a, x.size(), method);
    return weighted_pinv_apply(basis.z, w, x);
}

GammaFactor GammaFactor::build(const GlrrVector& a, const WeightOperator& w)
{
    const Index n = w.size();
    const Index r = a.order();
    check_lengths(a, w, n);

    GammaFactor g;
    g.m_size = n - r;
    if (const std::optional<BandedMatrix> ch = w.inverse_factor())
    {
        const BandedMatrix cq = factor_times_q(*ch, a.coeffs());
        const Index m         = std::min(ch->upper() + r, n - r - 1);
        BandedMatrix gamma(n - r, n - r, 0, m);
        for (Index row = 0; row < n; ++row)
        {
            const Index lo = cq.row_begin(row);
            const Index hi = cq.row_end(row);
            for (Index i = lo; i < hi; ++i)
            {
                const double ci = cq(row, i);
                for (Index j = i; j < hi; ++j)
                {
                    gamma.ref(i, j) += ci * cq(row, j);
                }
            }
        }
        g.m_bandwidth = m;
        g.m_banded    = banded_cholesky(gamma);
        return g;
    }

    g.m_bandwidth = n - r - 1;
    g.m_dense.compute(detail::gamma_dense_unchecked(a, w, n));
    if (g.m_dense.info() != Eigen::Success)
    {
        throw Error(ErrorCode::cholesky_breakdown, "Gamma(a) is not numerically positive definite");
    }
    return g;
}

Matrix GammaFactor::solve(const Matrix& v) const
{
    if (v.rows() != m_size)
    {
        throw Error(ErrorCode::incompatible_dimension, "Gamma solve with a mismatched vector");
    }
    if (m_banded)
    {
        return solve_upper(*m_banded, solve_upper_transpose(*m_banded, v));
    }
    return m_dense.solve(v);
}

Vector GammaFactor::solve(const Vector& v) const
{
    return solve(Matrix(v)).col(0);
}

Vector gamma_apply_inverse(const GlrrVector& a, const WeightOperator& w, const Vector& v)
{
    return GammaFactor::build(a, w).solve(v);
}

ProjectionResult project_vp(const GlrrVector& a, const WeightOperator& w, const Vector& x)
{
    return Projector(a, w, ProjectionMethod::vp).apply(x);
}

ProjectionResult project(const GlrrVector& a, const WeightOperator& w, const Vector& x,
                         ProjectionMethod method)
{
    return Projector(a, w, method).apply(x);
}

Projector::Projector(const GlrrVector& a, const WeightOperator& w, ProjectionMethod method)
    : m_a(a), m_w(w), m_method(method)
{
    check_lengths(a, w, w.size());
    if (method == ProjectionMethod::vp)
    {
        m_gamma = GammaFactor::build(a, w);
        return;
    }
    const HornerMethod horner =
        method == ProjectionMethod::svph ? HornerMethod::compensated : HornerMethod::plain;
    m_z   = basis_stable(a, w.size(), horner).z;
    m_lsq = WhitenedLeastSquares<Complex>(w.whiten(m_z));
}

const GammaFactor& Projector::gamma() const
{
    if (!m_gamma)
    {
        throw Error(ErrorCode::invalid_argument, "projector does not hold a Gamma factor");
    }
    return *m_gamma;
}

ProjectionResult Projector::apply(const Vector& x) const
{
    if (x.size() != m_w.size())
    {
        throw Error(ErrorCode::incompatible_dimension, "series length differs from the weight size");
    }
    if (m_gamma)
    {
        const Vector& a = m_a.coeffs();
        const Vector y  = m_gamma->solve(Vector(apply_q_transpose(a, x)));
        ProjectionResult out;
        out.projected = Signal(Vector(x - m_w.apply_inverse(apply_q(a, y))));
        return out;
    }
    return finish(m_z, m_lsq.solve(m_w.whiten(x)));
}

Matrix gamma_dense(const GlrrVector& a, const WeightOperator& w, Index n)
{
    if (n > kDenseOracleLimit)
    {
        throw Error(ErrorCode::size_limit, "dense Gamma limited to N <= 2000");
    }
    return detail::gamma_dense_unchecked(a, w, n);
}

namespace detail
{

Matrix gamma_dense_unchecked(const GlrrVector& a, const WeightOperator& w, Index n)
{
    check_lengths(a, w, n);
    const Matrix q = q_transpose_matrix(a, n).to_dense().transpose();
    if (w.kind() == WeightKind::banded)
    {
        // W^{-1} = C^{-1} C^{-T}
        const Matrix b = solve_upper_transpose(w.factor(), q);
        Matrix g       = Matrix::Zero(b.cols(), b.cols());
        g.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
        return g.selfadjointView<Eigen::Lower>();
    }
    const Matrix b = w.factor().multiply(q);
    return b.transpose() * b;
}

} // namespace detail

double gamma_condition(const GlrrVector& a, const WeightOperator& w, Index n)
{
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gamma_dense(a, w, n), Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    return ev[ev.size() - 1] / ev[0];
}

namespace oracle
{

Vector project_dense(const GlrrVector& a, const WeightOperator& w, const Vector& x)
{
    const Index n = x.size();
    check_lengths(a, w, n);
    if (n > kDenseOracleLimit)
    {
        throw Error(ErrorCode::size_limit, "dense oracle limited to N <= 2000");
    }
    const Index r  = a.order();
    const Matrix q = q_transpose_matrix(a, n).to_dense();
    Eigen::BDCSVD<Matrix> svd(q, Eigen::ComputeFullV);
    const Matrix z    = svd.matrixV().rightCols(r);
    const Matrix wd   = w.dense();
    const Matrix gram = z.transpose() * wd * z;
    const Vector rhs  = z.transpose() * (wd * x);
    return z * gram.ldlt().solve(rhs);
}

} // namespace oracle

} // namespace glrr
