#ifndef GLRR_WEIGHT_HPP
#define GLRR_WEIGHT_HPP

#include <optional>

#include "glrr/banded.hpp"
#include "glrr/core.hpp"

namespace glrr
{

enum class WeightKind
{
    identity,
    banded,          // W is (2p+1)-diagonal, stored as W = C^T C
    banded_inverse,  // W^{-1} is (2p+1)-diagonal, stored as W^{-1} = Ch^T Ch
};

const char* to_string(WeightKind kind) noexcept;

///
/// Symmetric positive definite weight matrix W held through an upper
/// triangular band Cholesky factor of either W or W^{-1}.
///
class WeightOperator
{
public:
    WeightOperator() = default;

    static WeightOperator identity(Index n);

    /// W given by its upper band (diagonal + p superdiagonals).
    static WeightOperator from_banded(const BandedMatrix& w_upper);

    /// W^{-1} given by its upper band.
    static WeightOperator from_banded_inverse(const BandedMatrix& w_inv_upper);

    /// Direct construction from an existing upper triangular factor.
    static WeightOperator from_factor(WeightKind kind, BandedMatrix factor);

    WeightKind kind() const noexcept { return m_kind; }
    Index size() const noexcept { return m_factor.rows(); }
    Index bandwidth() const noexcept { return m_factor.upper(); }
    const BandedMatrix& factor() const noexcept { return m_factor; }

    /// Maps x to a vector whose squared Euclidean norm is x^T W x:
    /// C x for banded W, Ch^{-T} x for banded W^{-1}.
    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
    whiten(const Eigen::MatrixBase<Derived>& x) const
    {
        check_size(x.rows());
        switch (m_kind)
        {
        case WeightKind::identity:
            return x;
        case WeightKind::banded:
            return m_factor.multiply(x);
        case WeightKind::banded_inverse:
            break;
        }
        return solve_upper_transpose(m_factor, x);
    }

    Vector apply(const Vector& x) const;
    Vector apply_inverse(const Vector& x) const;
    double norm(const Vector& x) const;

    /// Ch with W^{-1} = Ch^T Ch when W^{-1} is banded (this includes the
    /// identity and every diagonal W).
    std::optional<BandedMatrix> inverse_factor() const;

    /// The operator for c W, c > 0.
    WeightOperator scaled(double c) const;

    Matrix dense() const;
    Matrix dense_inverse() const;

private:
    void check_size(Index n) const;

    WeightKind m_kind = WeightKind::identity;
    BandedMatrix m_factor;
};

/// Inverse covariance of a stationary AR(1) process
/// x_t = phi x_{t-1} + e_t, Var e_t = sigma2. Tridiagonal.
WeightOperator ar1_weight(Index n, double phi, double sigma2);

/// Inverse covariance of an MA(1) process x_t = e_t + theta e_{t-1};
/// the covariance itself is tridiagonal, so W^{-1} is banded.
WeightOperator ma1_weight(Index n, double theta, double sigma2);

} // namespace glrr

#endif
