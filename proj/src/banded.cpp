#include "glrr/banded.hpp"

#include <cmath>
#include <string>

namespace glrr
{

BandedMatrix::BandedMatrix(Index rows, Index cols, Index lower, Index upper)
    : m_rows(rows), m_cols(cols), m_lower(lower), m_upper(upper)
{
    if (rows < 0 || cols < 0 || lower < 0 || upper < 0)
    {
        throw Error(ErrorCode::invalid_argument, "negative band matrix dimension");
    }
    m_data.assign(static_cast<std::size_t>(rows * (lower + upper + 1)), 0.0);
}

BandedMatrix BandedMatrix::identity(Index n)
{
    BandedMatrix m(n, n, 0, 0);
    for (Index i = 0; i < n; ++i)
    {
        m.ref(i, i) = 1.0;
    }
    return m;
}

double& BandedMatrix::ref(Index i, Index j)
{
    if (!in_band(i, j))
    {
        throw Error(ErrorCode::invalid_argument,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") outside the band");
    }
    return m_data[offset(i, j)];
}

Eigen::MatrixXd BandedMatrix::to_dense() const
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m_rows, m_cols);
    for (Index i = 0; i < m_rows; ++i)
    {
        for (Index j = row_begin(i); j < row_end(i); ++j)
        {
            d(i, j) = m_data[offset(i, j)];
        }
    }
    return d;
}

BandedMatrix BandedMatrix::transpose() const
{
    BandedMatrix t(m_cols, m_rows, m_upper, m_lower);
    for (Index i = 0; i < m_rows; ++i)
    {
        for (Index j = row_begin(i); j < row_end(i); ++j)
        {
            t.ref(j, i) = m_data[offset(i, j)];
        }
    }
    return t;
}

Index BandedMatrix::effective_upper() const
{
    Index p = 0;
    for (Index i = 0; i < m_rows; ++i)
    {
        for (Index j = std::max(i + 1, row_begin(i)); j < row_end(i); ++j)
        {
            if (m_data[offset(i, j)] != 0.0)
            {
                p = std::max(p, j - i);
            }
        }
    }
    return p;
}

BandedMatrix banded_cholesky(const BandedMatrix& a)
{
    const Index n = a.rows();
    if (a.cols() != n)
    {
        throw Error(ErrorCode::incompatible_dimension, "Cholesky of a non-square matrix");
    }
    const Index m = std::min<Index>(a.upper(), n > 0 ? n - 1 : 0);
    BandedMatrix u(n, n, 0, m);
    for (Index i = 0; i < n; ++i)
    {
        double d = a(i, i);
        for (Index k = std::max<Index>(0, i - m); k < i; ++k)
        {
            const double uki = u(k, i);
            d -= uki * uki;
        }
        if (!(d > 0.0) || !std::isfinite(d))
        {
            throw Error(ErrorCode::cholesky_breakdown,
                        "non-positive pivot at row " + std::to_string(i));
        }
        const double uii = std::sqrt(d);
        u.ref(i, i)      = uii;
        for (Index j = i + 1; j < std::min(n, i + m + 1); ++j)
        {
            double s = a(i, j);
            for (Index k = std::max<Index>(0, j - m); k < i; ++k)
            {
                s -= u(k, i) * u(k, j);
            }
            u.ref(i, j) = s / uii;
        }
    }
    return u;
}

} // namespace glrr
