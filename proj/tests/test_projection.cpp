#include <doctest.h>

#include <cmath>

#include "glrr/harness.hpp"
#include "glrr/projection.hpp"
#include "support/check.hpp"
#include "support/oracles.hpp"

using namespace glrr;

namespace
{

Vector vec(std::initializer_list<double> v)
{
    return Vector(Eigen::Map<const Vector>(v.begin(), Index(v.size())));
}

WeightOperator diagonal_weight(const Vector& d)
{
    BandedMatrix w(d.size(), d.size(), 0, 0);
    for (Index i = 0; i < d.size(); ++i)
    {
        w.ref(i, i) = d[i];
    }
    return WeightOperator::from_banded(w);
}

struct Instance
{
    GlrrVector a;
    WeightOperator w;
    Vector x;
};

// r <= 3, mixed root locations, N <= 200, identity / AR(1) / MA(1) weights
Instance random_instance(SplitMix64& rng, int trial)
{
    const Index r = 1 + Index(trial % 3);
    const Index n = 2 * r + 2 + Index(rng.next() % 190);
    Instance in;
    in.a = ref::random_glrr(rng, r);
    switch (trial % 3)
    {
    case 0:
        in.w = WeightOperator::identity(n);
        break;
    case 1:
        in.w = ar1_weight(n, 0.5, 1.0);
        break;
    default:
        in.w = ma1_weight(n, -0.4, 2.0);
        break;
    }
    in.x = ref::random_vector(rng, n);
    return in;
}

double rel(const Vector& got, const Vector& want)
{
    return (got - want).norm() / std::max(1e-300, want.norm());
}

} // namespace

TEST_CASE("weighted_pinv_apply")
{
    const ComplexMatrix z1 = ComplexMatrix::Constant(3, 1, 1.0 / std::sqrt(3.0));
    const ProjectionResult p1 =
        weighted_pinv_apply(z1, WeightOperator::identity(3), vec({1, 2, 3}));
    CHECK(rel(p1.projected.values(), vec({2, 2, 2})) <= 1e-15);
    CHECK(std::abs(p1.coords[0] - Complex(2.0 * std::sqrt(3.0))) <= 1e-14);

    // weighted mean sum(w x) / sum(w); a Signal has at least three samples
    const ComplexMatrix z2 = ComplexMatrix::Constant(3, 1, 1.0 / std::sqrt(3.0));
    const ProjectionResult p2 =
        weighted_pinv_apply(z2, diagonal_weight(vec({1, 3, 2})), vec({0, 4, 1}));
    CHECK(rel(p2.projected.values(), Vector::Constant(3, 14.0 / 6.0)) <= 1e-15);

    // the same weight given through W^{-1}
    BandedMatrix winv(3, 3, 0, 0);
    winv.ref(0, 0) = 1.0;
    winv.ref(1, 1) = 1.0 / 3.0;
    winv.ref(2, 2) = 0.5;
    const ProjectionResult p3 =
        weighted_pinv_apply(z2, WeightOperator::from_banded_inverse(winv), vec({0, 4, 1}));
    CHECK(rel(p3.projected.values(), Vector::Constant(3, 14.0 / 6.0)) <= 1e-15);

    SplitMix64 rng(1);
    const Vector x            = ref::random_vector(rng, 6);
    const ProjectionResult p4 = weighted_pinv_apply(ComplexMatrix::Identity(6, 6),
                                                    ar1_weight(6, 0.3, 1.0), x);
    CHECK(rel(p4.projected.values(), x) <= 1e-14);

    CHECK_GLRR_ERROR(weighted_pinv_apply(ComplexMatrix::Zero(3, 1), WeightOperator::identity(3),
                                         vec({1, 2, 3})),
                     ErrorCode::rank_deficient);
    CHECK_GLRR_ERROR(weighted_pinv_apply(z1, WeightOperator::identity(4), vec({1, 2, 3})),
                     ErrorCode::incompatible_dimension);
}

TEST_CASE("project_stable examples")
{
    for (HornerMethod m : {HornerMethod::plain, HornerMethod::compensated})
    {
        const ProjectionResult p =
            project_stable(GlrrVector{1, -1}, WeightOperator::identity(3), vec({1, 2, 3}), m);
        CHECK(rel(p.projected.values(), vec({2, 2, 2})) <= 1e-14);
    }

    // straight-line least squares by the normal equations
    Matrix design(4, 2);
    design << 1, 1, 1, 2, 1, 3, 1, 4;
    const Vector y    = vec({1, 0, 0, 1});
    const Vector beta = (design.transpose() * design).ldlt().solve(design.transpose() * y);
    const Vector fit  = design * beta;
    const ProjectionResult line =
        project_stable(GlrrVector{1, -2, 1}, WeightOperator::identity(4), y);
    CHECK(rel(line.projected.values(), fit) <= 1e-13);
    CHECK(rel(line.projected.values(), vec({0.5, 0.5, 0.5, 0.5})) <= 1e-13);

    SplitMix64 rng(9);
    const Vector x             = ref::random_vector(rng, 40);
    const WeightOperator w     = ar1_weight(40, 0.5, 1.0);
    const ProjectionResult once = project_stable(GlrrVector{1, -3, 3, -1}, w, x);
    const ProjectionResult twice =
        project_stable(GlrrVector{1, -3, 3, -1}, w, once.projected.values());
    CHECK(rel(twice.projected.values(), once.projected.values()) <= 1e-10);
}

TEST_CASE("gamma_apply_inverse")
{
    const Vector y = gamma_apply_inverse(GlrrVector{1, -1}, WeightOperator::identity(3), vec({1, 1}));
    CHECK(rel(y, vec({1, 1})) <= 1e-15);

    const Matrix g = gamma_dense(GlrrVector{1, -1}, WeightOperator::identity(3), 3);
    Matrix expected(2, 2);
    expected << 2, -1, -1, 2;
    CHECK((g - expected).norm() <= 1e-15);

    CHECK(gamma_apply_inverse(GlrrVector{1, -1}, WeightOperator::identity(5), Vector::Zero(4)) ==
          Vector::Zero(4));

    SplitMix64 rng(44);
    for (int trial = 0; trial < 30; ++trial)
    {
        const Instance in = random_instance(rng, trial);
        const Index n     = in.x.size();
        const Vector v    = ref::random_vector(rng, n - in.a.order());
        const Vector sol  = gamma_apply_inverse(in.a, in.w, v);
        const Matrix gd   = gamma_dense(in.a, in.w, n);
        CHECK((gd * sol - v).norm() <= 1e-10 * v.norm() * std::max(1.0, gd.norm() * sol.norm() / v.norm()) );
    }
}

TEST_CASE("Gamma factor layout")
{
    const Index n          = 30;
    const GammaFactor ma   = GammaFactor::build(GlrrVector{1, -2, 1}, ma1_weight(n, 0.5, 1.0));
    CHECK(ma.banded());
    CHECK(ma.size() == n - 2);
    CHECK(ma.bandwidth() == 3);
    const GammaFactor id = GammaFactor::build(GlrrVector{1, -2, 1}, WeightOperator::identity(n));
    CHECK(id.banded());
    CHECK(id.bandwidth() == 2);

    // banded W with p > 0 takes the dense route
    const GammaFactor ar = GammaFactor::build(GlrrVector{1, -2, 1}, ar1_weight(n, 0.5, 1.0));
    CHECK_FALSE(ar.banded());
    const Matrix gd = gamma_dense(GlrrVector{1, -2, 1}, ar1_weight(n, 0.5, 1.0), n);
    SplitMix64 rng(2);
    const Vector v = ref::random_vector(rng, n - 2);
    CHECK((gd * ar.solve(v) - v).norm() <= 1e-10 * v.norm());

    // the upper factor reproduces Gamma
    const Matrix u = ma.banded_factor().to_dense();
    const Matrix g = gamma_dense(GlrrVector{1, -2, 1}, ma1_weight(n, 0.5, 1.0), n);
    CHECK((u.transpose() * u - g).norm() <= 1e-12 * g.norm());
}

TEST_CASE("project_vp")
{
    const ProjectionResult p =
        project_vp(GlrrVector{1, -1}, WeightOperator::identity(3), vec({1, 2, 3}));
    CHECK(rel(p.projected.values(), vec({2, 2, 2})) <= 1e-14);
    CHECK(p.coords.size() == 0);
    CHECK(std::string(to_string(ProjectionMethod::svph)) == "svph");
    CHECK(parse_projection_method("vp") == ProjectionMethod::vp);
    CHECK_GLRR_ERROR(parse_projection_method("svd"), ErrorCode::invalid_argument);
}

TEST_CASE("projectors agree with the dense oracle on random instances")
{
    SplitMix64 rng(123);
    for (int trial = 0; trial < 100; ++trial)
    {
        const Instance in   = random_instance(rng, trial);
        const Vector want   = glrr::oracle::project_dense(in.a, in.w, in.x);
        for (ProjectionMethod m : {ProjectionMethod::vp, ProjectionMethod::svp, ProjectionMethod::svph})
        {
            const ProjectionResult got = project(in.a, in.w, in.x, m);
            CHECK(rel(got.projected.values(), want) <= 1e-8);
            if (m != ProjectionMethod::vp)
            {
                CHECK(rel(got.projected.values(), want) <= 1e-10);
            }
        }
        CHECK(rel(project_vp(in.a, in.w, in.x).projected.values(),
                  project_stable(in.a, in.w, in.x).projected.values()) <= 1e-8);
    }

    // closed-form weighted mean for r = 1 constants
    const Vector d = vec({1, 2, 0.5, 4, 3});
    const Vector x = vec({1, -1, 2, 0.5, 3});
    const double mean = d.dot(x) / d.sum();
    CHECK(rel(glrr::oracle::project_dense(GlrrVector{1, -1}, diagonal_weight(d), x),
              Vector::Constant(5, mean)) <= 1e-14);
    CHECK(rel(project_stable(GlrrVector{1, -1}, diagonal_weight(d), x).projected.values(),
              Vector::Constant(5, mean)) <= 1e-14);
    CHECK_GLRR_ERROR(glrr::oracle::project_dense(GlrrVector{1, -1}, WeightOperator::identity(2001),
                                           Vector::Ones(2001)),
                     ErrorCode::size_limit);
}

TEST_CASE("projection properties")
{
    SplitMix64 rng(321);
    for (int trial = 0; trial < 60; ++trial)
    {
        const Instance in = random_instance(rng, trial);
        const Index n     = in.x.size();
        const Vector y    = ref::random_vector(rng, n);
        const Matrix wd   = in.w.dense();
        const ComplexMatrix z = basis_stable(in.a, n).z;
        for (ProjectionMethod m : {ProjectionMethod::vp, ProjectionMethod::svp, ProjectionMethod::svph})
        {
            const ProjectionResult px = project(in.a, in.w, in.x, m);
            const Vector p            = px.projected.values();

            // W-orthogonal residual
            const Vector wr = wd * (in.x - p);
            CHECK((z.adjoint() * wr.cast<Complex>()).norm() <= 1e-8 * in.w.norm(in.x));

            // idempotence
            CHECK(rel(project(in.a, in.w, p, m).projected.values(), p) <= 1e-10);

            // linearity
            const Vector comb = project(in.a, in.w, Vector(2.0 * in.x - 0.5 * y), m).projected.values();
            const Vector sep  = 2.0 * p - 0.5 * project(in.a, in.w, y, m).projected.values();
            CHECK(rel(comb, sep) <= 1e-10);

            // membership
            const double tol = 1e-6 * in.x.norm() *
                               std::max(1.0, basis_stable(in.a, n).condition() * 2.2e-16 * double(n));
            CHECK(glrr_residual(px.projected, in.a) <= tol);

            if (m != ProjectionMethod::vp)
            {
                CHECK(px.imag_leak <= 1e-9 * in.x.norm());
                for (double c : {0.1, 10.0})
                {
                    const Vector scaled = project(in.a, in.w.scaled(c), in.x, m).projected.values();
                    CHECK(rel(scaled, p) <= 1e-10);
                }
            }
            else
            {
                for (double c : {0.1, 10.0})
                {
                    const Vector scaled = project(in.a, in.w.scaled(c), in.x, m).projected.values();
                    CHECK(rel(scaled, p) <= 1e-8);
                }
            }
        }
    }
}

TEST_CASE("Projector reuses one factorization")
{
    SplitMix64 rng(8);
    const GlrrVector a     = GlrrVector{1, -1.2, 0.5};
    const WeightOperator w = ma1_weight(50, 0.3, 1.0);
    for (ProjectionMethod m : {ProjectionMethod::vp, ProjectionMethod::svp, ProjectionMethod::svph})
    {
        const Projector proj(a, w, m);
        CHECK(proj.method() == m);
        for (int k = 0; k < 3; ++k)
        {
            const Vector x = ref::random_vector(rng, 50);
            CHECK(rel(proj.apply(x).projected.values(), project(a, w, x, m).projected.values()) <=
                  1e-13);
        }
    }
    CHECK(Projector(a, w, ProjectionMethod::vp).gamma().banded());
    CHECK_GLRR_ERROR(Projector(a, w, ProjectionMethod::svp).gamma(), ErrorCode::invalid_argument);
}

TEST_CASE("Gamma route loses accuracy on long cubic-trend series")
{
    const Index n      = 5000;
    const GlrrVector a = GlrrVector{1, -3, 3, -1};
    const Vector t     = uniform_grid(n);
    Vector x(n);
    for (Index i = 0; i < n; ++i)
    {
        x[i] = t[i] * t[i] * t[i] - 0.5 * t[i] + 0.01 * std::sin(37.0 * double(i));
    }
    for (const WeightOperator& w : {WeightOperator::identity(n), ma1_weight(n, 0.5, 1.0)})
    {
        const double stable = glrr_residual(project_stable(a, w, x).projected, a);
        CHECK(stable <= 1e-12);
        try
        {
            const double vp = glrr_residual(project_vp(a, w, x).projected, a);
            CHECK(vp >= 1e3 * stable);
        }
        catch (const Error& e)
        {
            // breakdown is the extreme form of the same failure
            CHECK(e.code() == ErrorCode::cholesky_breakdown);
        }
    }
}

TEST_CASE("weighted_lstsq")
{
    SplitMix64 rng(6);
    Matrix j(20, 3);
    for (Index i = 0; i < j.size(); ++i)
    {
        j.data()[i] = rng.uniform(-1, 1);
    }
    const Vector delta     = ref::random_vector(rng, 3);
    const WeightOperator w = ar1_weight(20, 0.4, 1.0);
    CHECK(rel(weighted_lstsq(j, w, j * delta), delta) <= 1e-12);
    const Matrix wd    = w.dense();
    const Vector r     = ref::random_vector(rng, 20);
    const Vector dense = (j.transpose() * wd * j).ldlt().solve(j.transpose() * wd * r);
    CHECK(rel(weighted_lstsq(j, w, r), dense) <= 1e-12);
}
