#ifndef GLRR_HARNESS_HPP
#define GLRR_HARNESS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "glrr/core.hpp"
#include "glrr/optimizer.hpp"
#include "glrr/projection.hpp"
#include "glrr/weight.hpp"

namespace glrr
{

/// Weight family selected by name so that experiments can build W per N.
/// Text form: "identity", "ar1:phi=<f>,sigma2=<f>" or "ma1:theta=<f>,sigma2=<f>".
struct WeightSpec
{
    enum class Kind
    {
        identity,
        ar1,
        ma1,
    };

    Kind kind     = Kind::identity;
    double coef   = 0.0;  // phi or theta
    double sigma2 = 1.0;

    WeightOperator make(Index n) const;
    std::string str() const;
    static WeightSpec parse(std::string_view text);
};

/// Equidistant grid on [-1, 1] including both endpoints.
Vector uniform_grid(Index n);

/// Legendre polynomials P_0..P_d at the points, orthonormalized over the
/// points (QR with a positive diagonal).
Matrix legendre_basis(const Vector& points, Index max_degree);

/// b t^2 on the uniform grid with unit Euclidean norm. Defined for N >= 3.
Vector example_solution(Index n);

/// The GLRR (1, -3, 3, -1) of quadratic series.
GlrrVector example_glrr();

struct ExampleProblem
{
    Signal x;
    Signal y_star;
    GlrrVector a_star;
    Vector grid;
    WeightOperator weight;
};

/// X = Y* + R where R = R^ - Pi R^ removes the W-projection of R^ = c|t| onto
/// polynomials of degree <= 5, which makes Y* a stationary point. N >= 8.
ExampleProblem make_example(Index n, const WeightOperator& w);

/// P = Y* + (R^ - Pi R^) with the projection onto polynomials of degree <= 2,
/// so that the W-projection of P onto Z(a*) is exactly Y*. N >= 8.
ExampleProblem make_projection_example(Index n, const WeightOperator& w);

/// One measurement in long format.
struct ExperimentRow
{
    Index n = 0;
    std::string method;
    int replication = 0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
    std::string status = "ok";  // "ok" or "diverged"

    bool operator==(const ExperimentRow&) const = default;
};

struct ProjectionAccuracyOptions
{
    std::vector<Index> n_list;
    std::vector<ProjectionMethod> methods{ProjectionMethod::vp, ProjectionMethod::svp,
                                          ProjectionMethod::svph};
    WeightSpec weight;
    int threads = 1;
};

/// accuracy(method, N) = ||Pi^method P - Y*||_2 on make_projection_example.
/// One row per (N, method); failures are recorded as diverged.
std::vector<ExperimentRow> experiment_projection_accuracy(const ProjectionAccuracyOptions& options);

struct StabilityOptions
{
    std::vector<Index> n_list;
    int reps           = 1;
    std::uint64_t seed = 0;
    std::vector<Variant> variants{Variant::vpgn, Variant::svpgn, Variant::svpgn_h};
    WeightSpec weight;
    int max_iters = 200;
    int threads   = 1;
    JacobianRoute jacobian = JacobianRoute::gamma;
};

/// Per (N, replication): a0 = a* + 1e-6 d with d uniform on [-1, 1]^4, each
/// variant solved from a0. Rows carry "distance" = ||Y~ - Y*|| and
/// "objective_gap" = ||X - Y~||_W - ||X - Y*||_W.
std::vector<ExperimentRow> experiment_solution_stability(const StabilityOptions& options);

/// The perturbation direction d for one replication.
Vector stability_direction(std::uint64_t seed, int replication);

/// Means over replications per (N, method, metric), replication = -1.
/// A mean containing a diverged row is flagged diverged.
std::vector<ExperimentRow> summarize(const std::vector<ExperimentRow>& rows);

void write_rows_csv(const std::string& path, const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> read_rows_csv(const std::string& path);
std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> rows_from_csv(std::string_view text);

/// Log-log line chart of `metric` against N, one line per method. Rows
/// with non-positive or non-finite values are left out.
std::string loglog_svg(const std::vector<ExperimentRow>& rows, std::string_view metric,
                       std::string_view title);

} // namespace glrr

#endif
