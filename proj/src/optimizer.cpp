#include "glrr/optimizer.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "glrr/fft.hpp"

namespace glrr
{

namespace
{

constexpr double kBoundaryMinorLimit  = 1e12;
constexpr double kNormalizationFloor  = 1e-12;
constexpr double kTangentRankTolerance = 1e-7;

double fd_step(double value)
{
    return 1e-6 * std::max(1.0, std::abs(value));
}

Vector gather(const Vector& v, const std::vector<Index>& idx)
{
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
        out[static_cast<Index>(i)] = v[idx[i]];
    }
    return out;
}

WeightOperator resolve_weight(const WeightOperator& w, Index n)
{
    if (w.size() == 0)
    {
        return WeightOperator::identity(n);
    }
    if (w.size() != n)
    {
        throw Error(ErrorCode::incompatible_dimension, "weight size differs from the series length");
    }
    return w;
}

} // namespace

const char* to_string(Variant variant) noexcept
{
    switch (variant)
    {
    case Variant::vpgn: return "vpgn";
    case Variant::svpgn: return "svpgn";
    case Variant::svpgn_h: return "svpgn-h";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name)
{
    if (name == "vpgn")
    {
        return Variant::vpgn;
    }
    if (name == "svpgn")
    {
        return Variant::svpgn;
    }
    if (name == "svpgn-h")
    {
        return Variant::svpgn_h;
    }
    throw Error(ErrorCode::invalid_argument, "unknown solver variant '" + std::string(name) + "'");
}

ProjectionMethod projection_method(Variant variant) noexcept
{
    switch (variant)
    {
    case Variant::vpgn: return ProjectionMethod::vp;
    case Variant::svpgn: return ProjectionMethod::svp;
    case Variant::svpgn_h: break;
    }
    return ProjectionMethod::svph;
}

const char* to_string(StopReason reason) noexcept
{
    return reason == StopReason::step_exhausted ? "step-exhausted" : "max-iters";
}

Signal s_tau(const ParamPoint& point, Index n, HornerMethod method)
{
    const GlrrVector a = h_tau(point.reduced);
    const Index r      = a.order();
    if (point.dot_s.size() != r)
    {
        throw Error(ErrorCode::incompatible_dimension, "boundary data must have r values");
    }
    const IndexSets sets    = index_sets(point.reduced.tau, n, r);
    const SubspaceBasis b   = basis_stable(a, n, method);
    ComplexMatrix minor(r, r);
    for (Index i = 0; i < r; ++i)
    {
        minor.row(i) = b.z.row(sets.boundary[static_cast<std::size_t>(i)]);
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(minor, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (!(sv[r - 1] > 0.0) || sv[0] / sv[r - 1] > kBoundaryMinorLimit)
    {
        throw Error(ErrorCode::singular_boundary_minor,
                    "basis rows at the boundary indices are numerically singular");
    }
    const ComplexVector c = svd.solve(point.dot_s.cast<Complex>());
    return Signal(Vector((b.z * c).real()));
}

ParamPoint s_tau_inverse(const Signal& series, const GlrrVector& a0, Index tau)
{
    const Index r = a0.order();
    const Index n = series.size();
    if (tau < 0 || tau > r)
    {
        throw Error(ErrorCode::tau_out_of_range, "tau outside 0..r");
    }
    if (a0[tau] != -1.0)
    {
        throw Error(ErrorCode::normalization, "coefficient at tau is not -1");
    }
    const IndexSets sets = index_sets(tau, n, r);

    const Matrix t = embed(series, r + 1).entries;
    Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU);
    const Matrix u    = svd.matrixU().leftCols(r);
    const Vector ahat = a0.coeffs() - u * (u.transpose() * a0.coeffs());
    if (std::abs(ahat[tau]) < kNormalizationFloor)
    {
        throw Error(ErrorCode::normalization_breakdown,
                    "projected GLRR vector vanishes at the tau position");
    }
    const Vector scaled = -ahat / ahat[tau];

    ParamPoint p;
    p.dot_s       = gather(series.values(), sets.boundary);
    p.reduced.tau = tau;
    p.reduced.dot_a = gather(scaled, sets.mask);
    return p;
}

Signal s_star(const ReducedGlrr& reduced, const Signal& x, const WeightOperator& w,
              Variant variant)
{
    const WeightOperator wr = resolve_weight(w, x.size());
    return project(h_tau(reduced), wr, x.values(), projection_method(variant)).projected;
}

const char* to_string(JacobianRoute route) noexcept
{
    return route == JacobianRoute::circulant ? "circulant" : "gamma";
}

JacobianRoute parse_jacobian_route(std::string_view name)
{
    if (name == "gamma")
    {
        return JacobianRoute::gamma;
    }
    if (name == "circulant")
    {
        return JacobianRoute::circulant;
    }
    throw Error(ErrorCode::invalid_argument, "unknown Jacobian route '" + std::string(name) + "'");
}

namespace
{

// Rows 0..N-r-1 of C = T(-alpha) F^{-1} L F T(alpha) are Q^T(a), where L holds
// the circulant eigenvalues and T(alpha) = diag(exp(i j alpha)). Solves with
// C and C^T then cost two FFTs and have condition cond(L) instead of cond(Gamma).
class RotatedCirculant
{
public:
    RotatedCirculant(const GlrrVector& a, Index n, HornerMethod method)
    {
        const RotationDiagnostics diag = find_alpha0(a, n, method);
        m_inv_eig = circulant_eigenvalues(a, n, diag.alpha0, method).cwiseInverse();
        m_phase.resize(n);
        for (Index j = 0; j < n; ++j)
        {
            m_phase[j] = std::polar(1.0, static_cast<double>(j) * diag.alpha0);
        }
    }

    // Re C^{-1} b for each column.
    Matrix solve(const Matrix& b) const
    {
        const ComplexMatrix f = fft::forward(m_phase.asDiagonal() * b.cast<Complex>());
        return (m_phase.conjugate().asDiagonal() * fft::inverse(m_inv_eig.asDiagonal() * f)).real();
    }

    // Re C^{-T} b.
    Vector solve_transpose(const Vector& b) const
    {
        const ComplexMatrix f = fft::inverse(ComplexVector(m_phase.conjugate().asDiagonal() * b.cast<Complex>()));
        return (m_phase.asDiagonal() * fft::forward(m_inv_eig.asDiagonal() * f)).real();
    }

private:
    ComplexVector m_inv_eig;
    ComplexVector m_phase;
};

} // namespace

Matrix jacobian_s_star(const ReducedGlrr& reduced, const Signal& x, const WeightOperator& w,
                       Variant variant, JacobianRoute route)
{
    const Index n           = x.size();
    const WeightOperator wr = resolve_weight(w, n);
    const GlrrVector a      = h_tau(reduced);
    const Index r           = a.order();
    const IndexSets sets    = index_sets(reduced.tau, n, r);

    const Projector proj(a, wr, projection_method(variant));
    const Vector px = proj.apply(x.values()).projected.values();

    Matrix shifted(n - r, r);
    for (Index i = 0; i < r; ++i)
    {
        shifted.col(i) = px.segment(sets.mask[static_cast<std::size_t>(i)], n - r);
    }

    // first term -W^{-1} Q(a) Gamma^{-1} Q^T(e_j) Pi X in `first`, multiplier
    // y = Gamma^{-1} Q^T(a) X for the second
    Matrix first(n, r);
    Vector y;
    if (route == JacobianRoute::gamma)
    {
        const GammaFactor gamma =
            variant == Variant::vpgn ? proj.gamma() : GammaFactor::build(a, wr);
        y                   = gamma.solve(Vector(apply_q_transpose(a.coeffs(), x.values())));
        const Matrix solved = gamma.solve(shifted);
        for (Index i = 0; i < r; ++i)
        {
            first.col(i) = -wr.apply_inverse(apply_q(a.coeffs(), Vector(solved.col(i))));
        }
    }
    else
    {
        // W^{-1} Q Gamma^{-1} Q^T u = (I - Pi) u for any u, and Q(a) y = W (X - Pi X)
        const RotatedCirculant c(a, n, variant == Variant::svpgn_h ? HornerMethod::compensated
                                                                   : HornerMethod::plain);
        Matrix padded = Matrix::Zero(n, r);
        padded.topRows(n - r) = shifted;
        const Matrix u = c.solve(padded);
        for (Index i = 0; i < r; ++i)
        {
            const Vector ui = u.col(i);
            first.col(i)    = proj.apply(ui).projected.values() - ui;
        }
        y = c.solve_transpose(wr.apply(Vector(x.values() - px))).head(n - r);
    }

    Matrix jac(n, r);
    for (Index i = 0; i < r; ++i)
    {
        const Index j = sets.mask[static_cast<std::size_t>(i)];
        Vector qy     = Vector::Zero(n);
        qy.segment(j, n - r) = y;
        jac.col(i) = first.col(i) - proj.apply(wr.apply_inverse(qy)).projected.values();
    }
    return jac;
}

Vector gn_step(const Matrix& j, const Signal& x, const Signal& s_k, const WeightOperator& w)
{
    const WeightOperator wr = resolve_weight(w, x.size());
    return weighted_lstsq(j, wr, x.values() - s_k.values());
}

LineSearchResult line_search(const ReducedGlrr& reduced, const Vector& delta, const Signal& x,
                             const WeightOperator& w, Variant variant, int floor_exp)
{
    const WeightOperator wr = resolve_weight(w, x.size());
    const Signal current    = s_star(reduced, x, wr, variant);
    return line_search(reduced, delta, x, wr, variant, floor_exp,
                       wr.norm(x.values() - current.values()));
}

LineSearchResult line_search(const ReducedGlrr& reduced, const Vector& delta, const Signal& x,
                             const WeightOperator& w, Variant variant, int floor_exp,
                             double current_objective)
{
    if (delta.size() != reduced.order() || !delta.allFinite())
    {
        throw Error(ErrorCode::invalid_argument, "search direction must be finite with r entries");
    }
    const WeightOperator wr = resolve_weight(w, x.size());
    LineSearchResult out;
    out.objective = current_objective;
    out.dot_a     = reduced.dot_a;

    double gamma = 1.0;
    for (int e = 0; e <= floor_exp; ++e, gamma *= 0.5)
    {
        ReducedGlrr trial{reduced.dot_a + gamma * delta, reduced.tau};
        Signal estimate;
        try
        {
            estimate = s_star(trial, x, wr, variant);
        }
        catch (const Error&)
        {
            continue;
        }
        const double objective = wr.norm(x.values() - estimate.values());
        if (objective <= current_objective)
        {
            out.gamma     = gamma;
            out.objective = objective;
            out.estimate  = std::move(estimate);
            out.dot_a     = std::move(trial.dot_a);
            return out;
        }
    }
    return out;
}

VpgnReport vpgn_solve(const Signal& x, const GlrrVector& a0, const VpgnOptions& options)
{
    const Index n = x.size();
    if (options.max_iters < 1)
    {
        throw Error(ErrorCode::invalid_argument, "max_iters must be at least 1");
    }
    if (n <= 2 * a0.order())
    {
        throw Error(ErrorCode::length_too_short, "series too short for the GLRR order");
    }
    const WeightOperator w = resolve_weight(options.weight, n);

    NormalizedGlrr current = choose_tau_and_normalize(a0);
    ReducedGlrr reduced    = h_tau_inverse(current.a, current.tau);
    Signal estimate        = s_star(reduced, x, w, options.variant);
    double objective       = w.norm(x.values() - estimate.values());

    VpgnReport report;
    report.stop_reason = StopReason::max_iters;
    for (int k = 0; k < options.max_iters; ++k)
    {
        VpgnIteration it;
        it.k            = k;
        it.tau          = current.tau;
        it.objective    = objective;
        it.normalized_a = current.a.coeffs();

        LineSearchResult ls;
        try
        {
            const Matrix jac   = jacobian_s_star(reduced, x, w, options.variant, options.jacobian);
            const Vector delta = gn_step(jac, x, estimate, w);
            it.step_norm       = delta.norm();
            ls = line_search(reduced, delta, x, w, options.variant, options.floor_exp, objective);
        }
        catch (const Error& e)
        {
            report.failure = e.what();
            report.iterations.push_back(std::move(it));
            report.stop_reason = StopReason::step_exhausted;
            break;
        }
        it.gamma = ls.gamma;
        report.iterations.push_back(std::move(it));

        if (ls.gamma == 0.0 || ls.dot_a == reduced.dot_a)
        {
            report.stop_reason = StopReason::step_exhausted;
            break;
        }
        estimate  = std::move(ls.estimate);
        objective = ls.objective;
        current   = choose_tau_and_normalize(h_tau(ReducedGlrr{ls.dot_a, reduced.tau}));
        reduced   = h_tau_inverse(current.a, current.tau);
    }

    report.estimate   = estimate;
    report.final_glrr = current.a;
    report.necessary_condition_residual = std::numeric_limits<double>::quiet_NaN();
    const GlrrVector sq = acyclic_square(current.a);
    if (n > 2 * sq.order())
    {
        try
        {
            report.necessary_condition_residual =
                project_stable(sq, w, x.values() - estimate.values(), HornerMethod::compensated)
                    .projected.values()
                    .norm();
        }
        catch (const Error&)
        {
        }
    }
    return report;
}

TangentSpaceCheck tangent_space_check(const Signal& series, const GlrrVector& a, Index tau)
{
    const Index n  = series.size();
    const Index r  = a.order();
    const GlrrVector sq = acyclic_square(a);
    if (n <= 2 * sq.order())
    {
        throw Error(ErrorCode::length_too_short, "tangent check needs N > 4r");
    }
    const IndexSets sets = index_sets(tau, n, r);
    ParamPoint base;
    base.dot_s   = gather(series.values(), sets.boundary);
    base.reduced = h_tau_inverse(a, tau);

    Matrix jac(n, 2 * r);
    for (Index k = 0; k < 2 * r; ++k)
    {
        ParamPoint plus  = base;
        ParamPoint minus = base;
        double& vp       = k < r ? plus.dot_s[k] : plus.reduced.dot_a[k - r];
        double& vm       = k < r ? minus.dot_s[k] : minus.reduced.dot_a[k - r];
        const double h   = fd_step(vp);
        vp += h;
        vm -= h;
        jac.col(k) = (s_tau(plus, n).values() - s_tau(minus, n).values()) / (2.0 * h);
    }

    TangentSpaceCheck out;
    Matrix qj(n - sq.order(), 2 * r);
    for (Index k = 0; k < 2 * r; ++k)
    {
        qj.col(k) = apply_q_transpose(sq.coeffs(), jac.col(k));
    }
    out.residual = qj.norm() / jac.norm();

    Eigen::JacobiSVD<Matrix> svd(jac);
    const Eigen::VectorXd& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i)
    {
        if (sv[i] > kTangentRankTolerance * sv[0])
        {
            ++out.rank;
        }
    }

    Matrix qf(n - r, r);
    for (Index k = 0; k < r; ++k)
    {
        qf.col(k) = apply_q_transpose(a.coeffs(), jac.col(k));
    }
    out.fs_residual = qf.norm();
    return out;
}

} // namespace glrr
