#ifndef GLRR_OPTIMIZER_HPP
#define GLRR_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glrr/core.hpp"
#include "glrr/projection.hpp"
#include "glrr/subspace.hpp"
#include "glrr/weight.hpp"

namespace glrr
{

/// Boundary values dot_s (the series at I(tau)) and reduced coefficients.
struct ParamPoint
{
    Vector dot_s;
    ReducedGlrr reduced;
};

enum class Variant
{
    vpgn,     // Gamma-route projector
    svpgn,    // stable basis, plain Horner
    svpgn_h,  // stable basis, compensated Horner
};

const char* to_string(Variant variant) noexcept;
Variant parse_variant(std::string_view name);
ProjectionMethod projection_method(Variant variant) noexcept;

/// S_tau(dot_s, dot_a): the unique series in Z(H_tau(dot_a)) taking the
/// values dot_s at I(tau). Throws singular_boundary_minor when the rows I(tau)
/// of the basis are numerically singular (condition above 1e12).
Signal s_tau(const ParamPoint& point, Index n, HornerMethod method = HornerMethod::plain);

/// Inverse of s_tau near a series governed by GLRR(a0), a0[tau] == -1.
ParamPoint s_tau_inverse(const Signal& series, const GlrrVector& a0, Index tau);

/// Projection of X onto Z(H_tau(dot_a)) with the variant's projector.
Signal s_star(const ReducedGlrr& reduced, const Signal& x, const WeightOperator& w,
              Variant variant);

/// How the Jacobian applies Gamma(a)^{-1}. The default goes through the band
/// Cholesky factor in every variant. `circulant` replaces both Gamma solves
/// by solves with the rotated circulant of the stable basis (experimental).
enum class JacobianRoute
{
    gamma,
    circulant,
};

const char* to_string(JacobianRoute route) noexcept;
JacobianRoute parse_jacobian_route(std::string_view name);

/// d S*_tau / d dot_a, an N x r matrix; the projection uses the variant's
/// projector.
Matrix jacobian_s_star(const ReducedGlrr& reduced, const Signal& x, const WeightOperator& w,
                       Variant variant, JacobianRoute route = JacobianRoute::gamma);

/// Weighted Gauss-Newton direction J^+_W (X - S_k).
Vector gn_step(const Matrix& j, const Signal& x, const Signal& s_k, const WeightOperator& w);

struct LineSearchResult
{
    double gamma     = 0.0;  // 0 when no step size was accepted
    double objective = 0.0;  // ||X - S*||_W at the accepted point, or the current one
    Signal estimate;         // S* at the accepted point
    Vector dot_a;            // accepted reduced coefficients
};

/// Backtracking over gamma = 1, 1/2, ..., 2^-floor_exp, accepting the first
/// step with ||X - S*(dot_a + gamma delta)||_W <= ||X - S*(dot_a)||_W.
/// A numerical failure at a trial point rejects that trial.
LineSearchResult line_search(const ReducedGlrr& reduced, const Vector& delta, const Signal& x,
                             const WeightOperator& w, Variant variant, int floor_exp = 50);

/// Same, with the objective at the current point already known.
LineSearchResult line_search(const ReducedGlrr& reduced, const Vector& delta, const Signal& x,
                             const WeightOperator& w, Variant variant, int floor_exp,
                             double current_objective);

enum class StopReason
{
    step_exhausted,
    max_iters,
};

const char* to_string(StopReason reason) noexcept;

struct VpgnOptions
{
    Variant variant  = Variant::svpgn;
    int max_iters    = 200;
    int floor_exp    = 50;
    WeightOperator weight;  // identity of matching size when left empty
    std::uint64_t seed = 0;
    JacobianRoute jacobian = JacobianRoute::gamma;
};

struct VpgnIteration
{
    int k            = 0;
    Index tau        = 0;
    double objective = 0.0;  // ||X - S_k||_W before the step
    double gamma     = 0.0;
    double step_norm = 0.0;  // ||Delta_k||
    Vector normalized_a;     // H_tau(dot_a) at iteration k
};

struct VpgnReport
{
    Signal estimate;
    GlrrVector final_glrr;
    std::vector<VpgnIteration> iterations;
    StopReason stop_reason = StopReason::max_iters;
    double necessary_condition_residual = 0.0;
    /// Message of the numerical error that ended the run early, if any.
    std::string failure;
};

/// Gauss-Newton iterations with variable projection. Each iteration re-picks
/// tau and normalizes a[tau] = -1, projects, linearizes, and backtracks.
/// Stops when no step size is accepted, when the step leaves dot_a
/// unchanged, or after max_iters.
VpgnReport vpgn_solve(const Signal& x, const GlrrVector& a0, const VpgnOptions& options);

struct TangentSpaceCheck
{
    double residual    = 0.0;  // ||Q^T(a^2) J||_F / ||J||_F
    Index rank         = 0;    // numerical rank of the 2r-column Jacobian
    double fs_residual = 0.0;  // ||Q^T(a) F_s||_F for the dot_s block
};

/// Finite-difference Jacobian of S_tau at the parameters of `series`.
TangentSpaceCheck tangent_space_check(const Signal& series, const GlrrVector& a, Index tau);

} // namespace glrr

#endif
