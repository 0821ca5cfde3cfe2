#include "glrr/subspace.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "glrr/fft.hpp"

namespace glrr
{

namespace
{

constexpr double kTwoPi           = 2.0 * std::numbers::pi;
constexpr Index kAlphaCandidates  = 512;
constexpr double kRefineWidth     = 1e-4;
constexpr double kDegenerateRatio = 1e3 * std::numeric_limits<double>::epsilon();
constexpr double kQrSpreadLimit   = 1e12;

Complex unit_root(Index k, Index n)
{
    // exp(2 pi i k / n) with the argument reduced exactly in integers
    const Index m = ((k % n) + n) % n;
    return std::polar(1.0, kTwoPi * static_cast<double>(m) / static_cast<double>(n));
}

Complex eval(const Vector& coeffs, Complex z, HornerMethod method)
{
    return method == HornerMethod::compensated ? horner_compensated(coeffs, z)
                                               : horner(coeffs, z);
}

double min_abs_on_nodes(const Vector& coeffs, Index n, const std::vector<Index>& nodes,
                        double alpha, HornerMethod method)
{
    double best = std::numeric_limits<double>::infinity();
    for (Index j : nodes)
    {
        const double angle = kTwoPi * static_cast<double>(j) / static_cast<double>(n) - alpha;
        best               = std::min(best, std::abs(eval(coeffs, std::polar(1.0, angle), method)));
    }
    return best;
}

/// Grid nodes that can attain min_j |g| for some rotation |alpha| <= max_shift.
/// A rotation moves each node by at most max_shift along the unit circle and
/// |g'| <= sum_k k |a_k| there, so a node whose unrotated value exceeds the
/// smallest one by more than twice that bound is never the minimizer.
std::vector<Index> candidate_nodes(const Vector& coeffs, Index n, double max_shift,
                                   HornerMethod method)
{
    std::vector<double> values(static_cast<std::size_t>(n));
    double lowest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j)
    {
        const double v = std::abs(eval(coeffs, unit_root(j, n), method));
        values[static_cast<std::size_t>(j)] = v;
        lowest = std::min(lowest, v);
    }
    double lipschitz = 0.0;
    for (Index k = 1; k < coeffs.size(); ++k)
    {
        lipschitz += static_cast<double>(k) * std::abs(coeffs[k]);
    }
    const double slack = 1e-12 * coeffs.cwiseAbs().sum();
    const double bound = lowest + 2.0 * lipschitz * max_shift + slack;
    std::vector<Index> nodes;
    for (Index j = 0; j < n; ++j)
    {
        if (values[static_cast<std::size_t>(j)] <= bound)
        {
            nodes.push_back(j);
        }
    }
    return nodes;
}

double wrap_rotation(double alpha, Index n)
{
    const double period = kTwoPi / static_cast<double>(n);
    const double half   = period / 2.0;
    while (alpha <= -half)
    {
        alpha += period;
    }
    while (alpha > half)
    {
        alpha -= period;
    }
    return alpha;
}

} // namespace

const char* to_string(HornerMethod method) noexcept
{
    return method == HornerMethod::compensated ? "compensated-horner" : "plain";
}

Complex eval_poly(const GlrrVector& a, Complex z)
{
    return horner(a.coeffs(), z);
}

Complex eval_poly_compensated(const GlrrVector& a, Complex z)
{
    return horner_compensated(a.coeffs(), z);
}

ComplexVector circulant_eigenvalues(const GlrrVector& a, Index n, double alpha,
                                    HornerMethod method)
{
    if (n <= a.order())
    {
        throw Error(ErrorCode::length_too_short, "N must exceed r");
    }
    ComplexVector eig(n);
    for (Index j = 0; j < n; ++j)
    {
        const double angle = kTwoPi * static_cast<double>(j) / static_cast<double>(n) - alpha;
        eig[j]             = eval(a.coeffs(), std::polar(1.0, angle), method);
    }
    return eig;
}

RotationDiagnostics find_alpha0(const GlrrVector& a, Index n, HornerMethod method)
{
    if (n < 1)
    {
        throw Error(ErrorCode::invalid_argument, "grid length must be positive");
    }
    const Vector& c     = a.coeffs();
    const double period = kTwoPi / static_cast<double>(n);
    const double step   = period / static_cast<double>(kAlphaCandidates);
    const double lo     = -period / 2.0;

    // the refinement below may reach one scan step past either end
    const std::vector<Index> nodes = candidate_nodes(c, n, period / 2.0 + 2.0 * step, method);
    auto objective = [&](double alpha) { return min_abs_on_nodes(c, n, nodes, alpha, method); };

    double best_alpha = lo + step;
    double best_value = -1.0;
    for (Index k = 0; k < kAlphaCandidates; ++k)
    {
        const double alpha = (k + 1 == kAlphaCandidates) ? period / 2.0 : lo + step * (k + 1);
        const double value = objective(alpha);
        if (value > best_value)
        {
            best_value = value;
            best_alpha = alpha;
        }
    }

    // golden-section refinement of the piecewise smooth objective
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double left          = best_alpha - step;
    double right         = best_alpha + step;
    double x1            = right - inv_phi * (right - left);
    double x2            = left + inv_phi * (right - left);
    double f1            = objective(x1);
    double f2            = objective(x2);
    while (right - left > kRefineWidth * period / 2.0)
    {
        if (f1 < f2)
        {
            left = x1;
            x1   = x2;
            f1   = f2;
            x2   = left + inv_phi * (right - left);
            f2   = objective(x2);
        }
        else
        {
            right = x2;
            x2    = x1;
            f2    = f1;
            x1    = right - inv_phi * (right - left);
            f1    = objective(x1);
        }
    }
    const double refined = (f1 > f2) ? x1 : x2;
    const double f_ref   = std::max(f1, f2);
    if (f_ref > best_value)
    {
        best_alpha = wrap_rotation(refined, n);
    }

    const ComplexVector eig = circulant_eigenvalues(a, n, best_alpha, method);
    RotationDiagnostics diag;
    diag.alpha0      = best_alpha;
    diag.min_abs_eig = eig.cwiseAbs().minCoeff();
    diag.max_abs_eig = eig.cwiseAbs().maxCoeff();
    diag.condition   = diag.max_abs_eig / diag.min_abs_eig;
    if (!(diag.min_abs_eig >= kDegenerateRatio * diag.max_abs_eig))
    {
        throw Error(ErrorCode::degenerate_polynomial,
                    "smallest circulant eigenvalue is below the degeneracy threshold");
    }
    return diag;
}

namespace detail
{

Orthonormalized orthonormalize(const ComplexMatrix& m)
{
    const Index n = m.rows();
    const Index r = m.cols();
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    const ComplexMatrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const Eigen::VectorXd diag = rr.diagonal().cwiseAbs();

    Orthonormalized out;
    if (diag.minCoeff() > 0.0 && diag.maxCoeff() / diag.minCoeff() <= kQrSpreadLimit)
    {
        out.q = qr.householderQ() * ComplexMatrix::Identity(n, r);
        out.o = rr.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(r, r));
        return out;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (!(s[r - 1] > 0.0))
    {
        throw Error(ErrorCode::rank_deficient, "basis candidate has dependent columns");
    }
    out.q = svd.matrixU();
    out.o = svd.matrixV() * s.cwiseInverse().asDiagonal();
    return out;
}

ComplexMatrix fourier_unit_columns(Index n, Index r)
{
    ComplexMatrix rr(n, r);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index k = 0; k < n; ++k)
    {
        for (Index c = 0; c < r; ++c)
        {
            rr(k, c) = scale * unit_root(k * (r - c), n);
        }
    }
    return rr;
}

} // namespace detail

SubspaceBasis basis_stable(const GlrrVector& a, Index n, HornerMethod method)
{
    const Index r = a.order();
    if (n <= r)
    {
        throw Error(ErrorCode::length_too_short, "N must exceed r");
    }
    const RotationDiagnostics diag = find_alpha0(a, n, method);

    SubspaceBasis basis;
    basis.alpha0  = diag.alpha0;
    basis.method  = method;
    basis.eigvals = circulant_eigenvalues(a, n, diag.alpha0, method);

    const ComplexMatrix rhs = detail::fourier_unit_columns(n, r);
    const ComplexVector inv_eig = basis.eigvals.cwiseInverse();
    const ComplexMatrix lr      = inv_eig.asDiagonal() * rhs;
    detail::Orthonormalized on  = detail::orthonormalize(lr);

    ComplexMatrix ur;
    if (method == HornerMethod::plain)
    {
        ur = std::move(on.q);
    }
    else
    {
        // B = R_r O_r row by row: row k is a polynomial in exp(2 pi i k/N)
        // whose coefficient of degree r-c is O_r(c, :).
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        ComplexMatrix b(n, r);
        Eigen::VectorXcd poly = Eigen::VectorXcd::Zero(r + 1);
        for (Index col = 0; col < r; ++col)
        {
            for (Index c = 0; c < r; ++c)
            {
                poly[r - c] = on.o(c, col);
            }
            for (Index k = 0; k < n; ++k)
            {
                b(k, col) = scale * horner_compensated(poly, unit_root(k, n));
            }
        }
        ur = detail::orthonormalize(inv_eig.asDiagonal() * b).q;
    }

    ComplexMatrix z = fft::inverse(ur);
    for (Index j = 0; j < n; ++j)
    {
        z.row(j) *= std::polar(1.0, -static_cast<double>(j) * diag.alpha0);
    }
    basis.z = std::move(z);
    return basis;
}

std::vector<ConditionSample> condition_scaling_probe(const GlrrVector& a,
                                                     const std::vector<Index>& n_list)
{
    std::vector<ConditionSample> out;
    out.reserve(n_list.size());
    for (Index n : n_list)
    {
        out.push_back({n, find_alpha0(a, n)});
    }
    return out;
}

} // namespace glrr
