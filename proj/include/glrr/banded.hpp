#ifndef GLRR_BANDED_HPP
#define GLRR_BANDED_HPP

#include <algorithm>
#include <vector>

#include <Eigen/Core>

#include "glrr/error.hpp"

namespace glrr
{

using Index = Eigen::Index;

///
/// Rectangular band matrix with `lower` subdiagonals and `upper`
/// superdiagonals. Only the band is stored, row by row.
///
class BandedMatrix
{
public:
    BandedMatrix() = default;
    BandedMatrix(Index rows, Index cols, Index lower, Index upper);

    static BandedMatrix identity(Index n);

    Index rows() const noexcept { return m_rows; }
    Index cols() const noexcept { return m_cols; }
    Index lower() const noexcept { return m_lower; }
    Index upper() const noexcept { return m_upper; }

    bool in_band(Index i, Index j) const noexcept
    {
        return i >= 0 && j >= 0 && i < m_rows && j < m_cols &&
               j - i <= m_upper && i - j <= m_lower;
    }

    /// First and one-past-last column of the band in row `i`.
    Index row_begin(Index i) const noexcept { return std::max<Index>(0, i - m_lower); }
    Index row_end(Index i) const noexcept { return std::min<Index>(m_cols, i + m_upper + 1); }

    double operator()(Index i, Index j) const noexcept
    {
        return in_band(i, j) ? m_data[offset(i, j)] : 0.0;
    }

    double& ref(Index i, Index j);

    Eigen::MatrixXd to_dense() const;
    BandedMatrix transpose() const;

    /// Number of stored diagonals that contain a nonzero entry above the
    /// main diagonal.
    Index effective_upper() const;

    /// y = A x for dense x with any number of columns.
    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
    multiply(const Eigen::MatrixBase<Derived>& x) const;

    /// y = A^T x.
    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
    multiply_transpose(const Eigen::MatrixBase<Derived>& x) const;

private:
    Index offset(Index i, Index j) const noexcept
    {
        return i * (m_lower + m_upper + 1) + (j - i + m_lower);
    }

    Index m_rows  = 0;
    Index m_cols  = 0;
    Index m_lower = 0;
    Index m_upper = 0;
    std::vector<double> m_data;
};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
BandedMatrix::multiply(const Eigen::MatrixBase<Derived>& x) const
{
    using Scalar = typename Derived::Scalar;
    if (x.rows() != m_cols)
    {
        throw Error(ErrorCode::incompatible_dimension,
                    "band matrix product with mismatched operand");
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> y =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(m_rows, x.cols());
    for (Index i = 0; i < m_rows; ++i)
    {
        for (Index j = row_begin(i); j < row_end(i); ++j)
        {
            const double v = m_data[offset(i, j)];
            if (v != 0.0)
            {
                y.row(i) += v * x.row(j);
            }
        }
    }
    return y;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
BandedMatrix::multiply_transpose(const Eigen::MatrixBase<Derived>& x) const
{
    using Scalar = typename Derived::Scalar;
    if (x.rows() != m_rows)
    {
        throw Error(ErrorCode::incompatible_dimension,
                    "band matrix transpose product with mismatched operand");
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> y =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(m_cols, x.cols());
    for (Index i = 0; i < m_rows; ++i)
    {
        for (Index j = row_begin(i); j < row_end(i); ++j)
        {
            const double v = m_data[offset(i, j)];
            if (v != 0.0)
            {
                y.row(j) += v * x.row(i);
            }
        }
    }
    return y;
}

///
/// Cholesky factorization A = U^T U of a symmetric positive definite band
/// matrix. Only the upper band of `a` (diagonal and superdiagonals) is read.
/// The factor has the same upper bandwidth. Throws
/// ErrorCode::cholesky_breakdown when a pivot is not positive.
///
BandedMatrix banded_cholesky(const BandedMatrix& a);

/// Solves U x = b for an upper triangular band matrix U.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
solve_upper(const BandedMatrix& u, const Eigen::MatrixBase<Derived>& b)
{
    using Scalar = typename Derived::Scalar;
    const Index n = u.rows();
    if (u.cols() != n || b.rows() != n)
    {
        throw Error(ErrorCode::incompatible_dimension, "triangular solve size mismatch");
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x = b;
    for (Index i = n - 1; i >= 0; --i)
    {
        for (Index j = i + 1; j < u.row_end(i); ++j)
        {
            x.row(i) -= u(i, j) * x.row(j);
        }
        x.row(i) /= u(i, i);
    }
    return x;
}

/// Solves U^T x = b for an upper triangular band matrix U.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
solve_upper_transpose(const BandedMatrix& u, const Eigen::MatrixBase<Derived>& b)
{
    using Scalar = typename Derived::Scalar;
    const Index n = u.rows();
    if (u.cols() != n || b.rows() != n)
    {
        throw Error(ErrorCode::incompatible_dimension, "triangular solve size mismatch");
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x = b;
    for (Index i = 0; i < n; ++i)
    {
        x.row(i) /= u(i, i);
        for (Index j = i + 1; j < u.row_end(i); ++j)
        {
            x.row(j) -= u(i, j) * x.row(i);
        }
    }
    return x;
}

} // namespace glrr

#endif
