#include "glrr/weight.hpp"

#include <cmath>

namespace glrr
{

const char* to_string(WeightKind kind) noexcept
{
    switch (kind)
    {
    case WeightKind::identity: return "identity";
    case WeightKind::banded: return "banded";
    case WeightKind::banded_inverse: return "banded-inverse";
    }
    return "unknown";
}

WeightOperator WeightOperator::identity(Index n)
{
    WeightOperator w;
    w.m_kind   = WeightKind::identity;
    w.m_factor = BandedMatrix::identity(n);
    return w;
}

WeightOperator WeightOperator::from_banded(const BandedMatrix& w_upper)
{
    return from_factor(WeightKind::banded, banded_cholesky(w_upper));
}

WeightOperator WeightOperator::from_banded_inverse(const BandedMatrix& w_inv_upper)
{
    return from_factor(WeightKind::banded_inverse, banded_cholesky(w_inv_upper));
}

WeightOperator WeightOperator::from_factor(WeightKind kind, BandedMatrix factor)
{
    if (factor.rows() != factor.cols() || factor.lower() != 0)
    {
        throw Error(ErrorCode::invalid_argument, "weight factor must be square upper triangular");
    }
    for (Index i = 0; i < factor.rows(); ++i)
    {
        if (!(factor(i, i) > 0.0))
        {
            throw Error(ErrorCode::invalid_argument, "weight factor must have a positive diagonal");
        }
    }
    WeightOperator w;
    w.m_kind   = kind;
    w.m_factor = std::move(factor);
    if (kind == WeightKind::identity)
    {
        w.m_factor = BandedMatrix::identity(w.m_factor.rows());
    }
    return w;
}

void WeightOperator::check_size(Index n) const
{
    if (n != size())
    {
        throw Error(ErrorCode::incompatible_dimension,
                    "weight of size " + std::to_string(size()) + " applied to length " +
                        std::to_string(n));
    }
}

Vector WeightOperator::apply(const Vector& x) const
{
    check_size(x.size());
    switch (m_kind)
    {
    case WeightKind::identity:
        return x;
    case WeightKind::banded:
        return m_factor.multiply_transpose(m_factor.multiply(x));
    case WeightKind::banded_inverse:
        break;
    }
    return solve_upper(m_factor, solve_upper_transpose(m_factor, x));
}

Vector WeightOperator::apply_inverse(const Vector& x) const
{
    check_size(x.size());
    switch (m_kind)
    {
    case WeightKind::identity:
        return x;
    case WeightKind::banded:
        return solve_upper(m_factor, solve_upper_transpose(m_factor, x));
    case WeightKind::banded_inverse:
        break;
    }
    return m_factor.multiply_transpose(m_factor.multiply(x));
}

double WeightOperator::norm(const Vector& x) const
{
    return whiten(x).norm();
}

std::optional<BandedMatrix> WeightOperator::inverse_factor() const
{
    switch (m_kind)
    {
    case WeightKind::identity:
    case WeightKind::banded_inverse:
        return m_factor;
    case WeightKind::banded:
        break;
    }
    if (m_factor.effective_upper() != 0)
    {
        return std::nullopt;
    }
    const Index n = size();
    BandedMatrix inv(n, n, 0, 0);
    for (Index i = 0; i < n; ++i)
    {
        inv.ref(i, i) = 1.0 / m_factor(i, i);
    }
    return inv;
}

WeightOperator WeightOperator::scaled(double c) const
{
    if (!(c > 0.0) || !std::isfinite(c))
    {
        throw Error(ErrorCode::invalid_argument, "weight scale must be positive");
    }
    WeightOperator w = *this;
    // W = C^T C scales its factor by sqrt(c); W^{-1} = Ch^T Ch by 1/sqrt(c).
    const double s = (m_kind == WeightKind::banded_inverse) ? 1.0 / std::sqrt(c) : std::sqrt(c);
    if (m_kind == WeightKind::identity)
    {
        w.m_kind = WeightKind::banded;
    }
    for (Index i = 0; i < w.m_factor.rows(); ++i)
    {
        for (Index j = w.m_factor.row_begin(i); j < w.m_factor.row_end(i); ++j)
        {
            w.m_factor.ref(i, j) *= s;
        }
    }
    return w;
}

Matrix WeightOperator::dense() const
{
    const Matrix f = m_factor.to_dense();
    switch (m_kind)
    {
    case WeightKind::identity:
        return Matrix::Identity(size(), size());
    case WeightKind::banded:
        return f.transpose() * f;
    case WeightKind::banded_inverse:
        break;
    }
    const Matrix inv = solve_upper(m_factor, Matrix(Matrix::Identity(size(), size())));
    return inv * inv.transpose();
}

Matrix WeightOperator::dense_inverse() const
{
    const Matrix f = m_factor.to_dense();
    switch (m_kind)
    {
    case WeightKind::identity:
        return Matrix::Identity(size(), size());
    case WeightKind::banded:
    {
        const Matrix inv = solve_upper(m_factor, Matrix(Matrix::Identity(size(), size())));
        return inv * inv.transpose();
    }
    case WeightKind::banded_inverse:
        break;
    }
    return f.transpose() * f;
}

WeightOperator ar1_weight(Index n, double phi, double sigma2)
{
    if (!(std::abs(phi) < 1.0) || !(sigma2 > 0.0) || !std::isfinite(sigma2))
    {
        throw Error(ErrorCode::nonstationary, "AR(1) needs |phi| < 1 and sigma2 > 0");
    }
    if (n < 1)
    {
        throw Error(ErrorCode::invalid_argument, "weight size must be positive");
    }
    if (phi == 0.0 && sigma2 == 1.0)
    {
        return WeightOperator::identity(n);
    }
    const Index p = (phi == 0.0 || n == 1) ? 0 : 1;
    BandedMatrix w(n, n, 0, p);
    for (Index i = 0; i < n; ++i)
    {
        const bool edge = (i == 0 || i == n - 1);
        w.ref(i, i)     = (edge ? 1.0 : 1.0 + phi * phi) / sigma2;
        if (p == 1 && i + 1 < n)
        {
            w.ref(i, i + 1) = -phi / sigma2;
        }
    }
    return WeightOperator::from_banded(w);
}

WeightOperator ma1_weight(Index n, double theta, double sigma2)
{
    if (!(std::abs(theta) < 1.0) || !(sigma2 > 0.0) || !std::isfinite(sigma2))
    {
        throw Error(ErrorCode::nonstationary, "MA(1) needs |theta| < 1 and sigma2 > 0");
    }
    if (n < 1)
    {
        throw Error(ErrorCode::invalid_argument, "weight size must be positive");
    }
    if (theta == 0.0 && sigma2 == 1.0)
    {
        return WeightOperator::identity(n);
    }
    const Index p = (theta == 0.0 || n == 1) ? 0 : 1;
    BandedMatrix cov(n, n, 0, p);
    for (Index i = 0; i < n; ++i)
    {
        cov.ref(i, i) = sigma2 * (1.0 + theta * theta);
        if (p == 1 && i + 1 < n)
        {
            cov.ref(i, i + 1) = sigma2 * theta;
        }
    }
    return WeightOperator::from_banded_inverse(cov);
}

} // namespace glrr
