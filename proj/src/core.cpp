#include "glrr/core.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace glrr
{

namespace
{

bool all_finite(const Vector& v)
{
    return v.allFinite();
}

} // namespace

Signal::Signal(Vector values) : m_values(std::move(values))
{
    if (m_values.size() < 3)
    {
        throw Error(ErrorCode::invalid_argument, "a signal needs at least 3 values");
    }
    if (!all_finite(m_values))
    {
        throw Error(ErrorCode::invalid_argument, "signal contains non-finite values");
    }
}

Signal::Signal(std::initializer_list<double> values)
    : Signal(Vector(Eigen::Map<const Vector>(values.begin(), Index(values.size()))))
{
}

GlrrVector::GlrrVector(Vector coeffs) : m_coeffs(std::move(coeffs))
{
    if (m_coeffs.size() < 2)
    {
        throw Error(ErrorCode::invalid_argument, "a GLRR needs order r >= 1");
    }
    if (!all_finite(m_coeffs))
    {
        throw Error(ErrorCode::invalid_argument, "GLRR coefficients must be finite");
    }
    if ((m_coeffs.array() == 0.0).all())
    {
        throw Error(ErrorCode::invalid_argument, "GLRR coefficients are all zero");
    }
}

GlrrVector::GlrrVector(std::initializer_list<double> coeffs)
    : GlrrVector(Vector(Eigen::Map<const Vector>(coeffs.begin(), Index(coeffs.size()))))
{
}

TrajectoryMatrix embed(const Signal& series, Index window)
{
    const Index n = series.size();
    if (window <= 1 || window >= n)
    {
        throw Error(ErrorCode::window_out_of_range,
                    "window length " + std::to_string(window) + " for N = " +
                        std::to_string(n));
    }
    const Index k = n - window + 1;
    TrajectoryMatrix t;
    t.window  = window;
    t.entries.resize(window, k);
    for (Index j = 0; j < k; ++j)
    {
        t.entries.col(j) = series.values().segment(j, window);
    }
    return t;
}

Index series_rank(const Signal& series, double tol)
{
    if ((series.values().array() == 0.0).all())
    {
        throw Error(ErrorCode::zero_series, "rank of the zero series is undefined");
    }
    const Index n      = series.size();
    const Index window = (n + 1) / 2;
    const Matrix t     = embed(series, window).entries;
    Eigen::BDCSVD<Matrix> svd(t);
    const auto& sv = svd.singularValues();
    Index rank     = 0;
    for (Index i = 0; i < sv.size(); ++i)
    {
        if (sv[i] > tol * sv[0])
        {
            ++rank;
        }
    }
    return rank;
}

BandedMatrix q_transpose_matrix(const GlrrVector& a, Index n)
{
    const Index r = a.order();
    if (n <= r)
    {
        throw Error(ErrorCode::length_too_short,
                    "N = " + std::to_string(n) + " must exceed r = " + std::to_string(r));
    }
    BandedMatrix q(n - r, n, 0, r);
    for (Index i = 0; i < n - r; ++i)
    {
        for (Index k = 0; k <= r; ++k)
        {
            q.ref(i, i + k) = a[k];
        }
    }
    return q;
}

double glrr_residual(const Signal& series, const GlrrVector& a)
{
    if (series.size() <= a.order())
    {
        throw Error(ErrorCode::length_too_short, "series too short for the GLRR order");
    }
    return apply_q_transpose(a.coeffs(), series.values()).norm();
}

GlrrVector acyclic_square(const GlrrVector& a)
{
    const Index m = a.size();
    Vector sq     = Vector::Zero(2 * m - 1);
    for (Index i = 0; i < m; ++i)
    {
        for (Index j = 0; j < m; ++j)
        {
            sq[i + j] += a[i] * a[j];
        }
    }
    return GlrrVector(std::move(sq));
}

GlrrVector h_tau(const ReducedGlrr& reduced)
{
    const Index r = reduced.order();
    if (reduced.tau < 0 || reduced.tau > r)
    {
        throw Error(ErrorCode::tau_out_of_range, "tau outside 0..r");
    }
    Vector a(r + 1);
    a.head(reduced.tau)          = reduced.dot_a.head(reduced.tau);
    a[reduced.tau]               = -1.0;
    a.tail(r - reduced.tau)      = reduced.dot_a.tail(r - reduced.tau);
    return GlrrVector(std::move(a));
}

ReducedGlrr h_tau_inverse(const GlrrVector& a, Index tau)
{
    const Index r = a.order();
    if (tau < 0 || tau > r)
    {
        throw Error(ErrorCode::tau_out_of_range, "tau outside 0..r");
    }
    if (a[tau] != -1.0)
    {
        throw Error(ErrorCode::normalization, "coefficient at tau is not -1");
    }
    ReducedGlrr reduced;
    reduced.tau = tau;
    reduced.dot_a.resize(r);
    reduced.dot_a.head(tau)     = a.coeffs().head(tau);
    reduced.dot_a.tail(r - tau) = a.coeffs().tail(r - tau);
    return reduced;
}

NormalizedGlrr choose_tau_and_normalize(const GlrrVector& b)
{
    Index tau   = 0;
    double best = 0.0;
    for (Index i = 0; i < b.size(); ++i)
    {
        if (std::abs(b[i]) > best)
        {
            best = std::abs(b[i]);
            tau  = i;
        }
    }
    if (best == 0.0)
    {
        throw Error(ErrorCode::zero_series, "cannot normalize a zero GLRR vector");
    }
    Vector a = b.coeffs() * (-1.0 / b[tau]);
    a[tau]   = -1.0;
    return {GlrrVector(std::move(a)), tau};
}

IndexSets index_sets(Index tau, Index n, Index r)
{
    if (tau < 0 || tau > r)
    {
        throw Error(ErrorCode::tau_out_of_range, "tau outside 0..r");
    }
    if (n <= r)
    {
        throw Error(ErrorCode::length_too_short, "N must exceed r");
    }
    IndexSets sets;
    sets.boundary.reserve(static_cast<std::size_t>(r));
    for (Index i = 0; i < tau; ++i)
    {
        sets.boundary.push_back(i);
    }
    for (Index i = n - r + tau; i < n; ++i)
    {
        sets.boundary.push_back(i);
    }
    for (Index k = 0; k <= r; ++k)
    {
        if (k != tau)
        {
            sets.mask.push_back(k);
        }
    }
    return sets;
}

} // namespace glrr
