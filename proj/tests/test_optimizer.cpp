#include <doctest.h>

#include <cmath>

#include "glrr/harness.hpp"
#include "glrr/optimizer.hpp"
#include "support/check.hpp"
#include "support/oracles.hpp"

using namespace glrr;

namespace
{

Vector vec(std::initializer_list<double> v)
{
    return Vector(Eigen::Map<const Vector>(v.begin(), Index(v.size())));
}

double rel(const Vector& got, const Vector& want)
{
    return (got - want).norm() / std::max(1e-300, want.norm());
}

void check_monotone(const VpgnReport& report)
{
    for (std::size_t k = 1; k < report.iterations.size(); ++k)
    {
        CHECK(report.iterations[k].objective <= report.iterations[k - 1].objective);
    }
}

// A GLRR normalized at its largest coefficient, with a random member series.
struct Member
{
    GlrrVector a;
    Index tau = 0;
    Signal s;
};

Member random_member(SplitMix64& rng, Index r, Index n)
{
    Member m;
    const NormalizedGlrr norm = choose_tau_and_normalize(ref::random_glrr(rng, r));
    m.a                       = norm.a;
    m.tau                     = norm.tau;
    m.s                       = Signal(ref::random_member(rng, m.a, n));
    return m;
}

Vector perturbation(std::uint64_t seed, int rep)
{
    return stability_direction(seed, rep);
}

} // namespace

TEST_CASE("s_tau examples")
{
    const Signal c = s_tau({vec({5}), {vec({1}), 1}}, 3);
    CHECK(rel(c.values(), vec({5, 5, 5})) <= 1e-14);

    const Signal g = s_tau({vec({5}), {vec({0.5}), 1}}, 3);
    CHECK(rel(g.values(), vec({5, 2.5, 1.25})) <= 1e-14);

    const Signal line = s_tau({vec({1, 4}), {vec({0.5, 0.5}), 1}}, 4);
    CHECK(rel(line.values(), vec({1, 2, 3, 4})) <= 1e-13);

    for (HornerMethod m : {HornerMethod::plain, HornerMethod::compensated})
    {
        CHECK(rel(s_tau({vec({1, 4}), {vec({0.5, 0.5}), 1}}, 4, m).values(), vec({1, 2, 3, 4})) <=
              1e-13);
    }
    CHECK_GLRR_ERROR(s_tau({vec({1, 2}), {vec({1}), 1}}, 5), ErrorCode::incompatible_dimension);
}

TEST_CASE("s_tau_inverse examples")
{
    const ParamPoint p = s_tau_inverse(Signal{5, 5, 5}, GlrrVector{1, -1}, 1);
    CHECK(p.dot_s == vec({5}));
    CHECK(std::abs(p.reduced.dot_a[0] - 1.0) <= 1e-15);
    CHECK(p.reduced.tau == 1);

    const ParamPoint q = s_tau_inverse(Signal{5, 2.5, 1.25}, GlrrVector{0.5, -1}, 1);
    CHECK(std::abs(q.reduced.dot_a[0] - 0.5) <= 1e-15);

    CHECK_GLRR_ERROR(s_tau_inverse(Signal{5, 5, 5}, GlrrVector{1, -1}, 0), ErrorCode::normalization);
    // a0 orthogonal to the complement of the trajectory space vanishes after projection
    CHECK_GLRR_ERROR(s_tau_inverse(Signal{1, -1, 1}, GlrrVector{-1, 1}, 0),
                     ErrorCode::normalization_breakdown);
}

TEST_CASE("parameterization round trips")
{
    SplitMix64 rng(1001);
    for (int trial = 0; trial < 100; ++trial)
    {
        const Index r  = 1 + Index(trial % 3);
        const Index n  = 2 * r + 3 + Index(rng.next() % 30);
        const Member m = random_member(rng, r, n);

        // series -> parameters -> series
        const ParamPoint p = s_tau_inverse(m.s, m.a, m.tau);
        const Signal back  = s_tau(p, n);
        CHECK(rel(back.values(), m.s.values()) <= 1e-9);
        CHECK(rel(p.reduced.dot_a, h_tau_inverse(m.a, m.tau).dot_a) <= 1e-9);

        // parameters -> series -> parameters
        const ParamPoint p2 = s_tau_inverse(back, h_tau(p.reduced), m.tau);
        CHECK(rel(p2.dot_s, p.dot_s) <= 1e-9);
        CHECK(rel(p2.reduced.dot_a, p.reduced.dot_a) <= 1e-9);

        // boundary interpolation and membership
        const IndexSets sets = index_sets(m.tau, n, r);
        for (Index i = 0; i < r; ++i)
        {
            CHECK(std::abs(back[sets.boundary[std::size_t(i)]] - p.dot_s[i]) <=
                  1e-12 * std::max(1.0, p.dot_s.norm()));
        }
        CHECK(glrr_residual(back, h_tau(p.reduced)) <= 1e-10 * (1.0 + back.values().norm()));
    }
}

TEST_CASE("s_star")
{
    SplitMix64 rng(55);
    const Member m = random_member(rng, 2, 25);
    const ReducedGlrr red = h_tau_inverse(m.a, m.tau);
    for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
    {
        const Signal s = s_star(red, m.s, WeightOperator{}, v);
        CHECK(rel(s.values(), m.s.values()) <= 1e-10);
        CHECK(rel(s_star({vec({1}), 1}, Signal{1, 2, 3}, WeightOperator{}, v).values(),
                  vec({2, 2, 2})) <= 1e-14);
    }

    for (int trial = 0; trial < 30; ++trial)
    {
        const Index r          = 1 + Index(trial % 3);
        const Index n          = 2 * r + 2 + Index(rng.next() % 190);
        const Member mm        = random_member(rng, r, n);
        const Signal x         = Signal(ref::random_vector(rng, n));
        const WeightOperator w = trial % 2 ? ar1_weight(n, 0.5, 1.0) : WeightOperator::identity(n);
        const ReducedGlrr rr   = h_tau_inverse(mm.a, mm.tau);
        const Vector want      = glrr::oracle::project_dense(mm.a, w, x.values());
        for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
        {
            CHECK(rel(s_star(rr, x, w, v).values(), want) <= 1e-8);
        }
    }
    CHECK(std::string(to_string(Variant::svpgn_h)) == "svpgn-h");
    CHECK(parse_variant("svpgn") == Variant::svpgn);
    CHECK(projection_method(Variant::vpgn) == ProjectionMethod::vp);
    CHECK_GLRR_ERROR(parse_variant("gn"), ErrorCode::invalid_argument);
}

TEST_CASE("jacobian_s_star")
{
    SplitMix64 rng(66);
    const Member m        = random_member(rng, 2, 30);
    const ReducedGlrr red = h_tau_inverse(m.a, m.tau);

    CHECK(jacobian_s_star(red, Signal(Vector::Zero(30)), WeightOperator{}, Variant::svpgn)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    const Signal x         = Signal(Vector(m.s.values() + 0.1 * ref::random_vector(rng, 30)));
    const WeightOperator w = ar1_weight(30, 0.5, 1.0);
    for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
    {
        const Matrix j  = jacobian_s_star(red, x, w, v);
        const Matrix jc = jacobian_s_star(red, x, w.scaled(10.0), v);
        CHECK((j - jc).norm() <= 1e-10 * j.norm());

        const Matrix fd = ref::jacobian_fd(
            [&](const Vector& p) { return s_star({p, red.tau}, x, w, v).values(); }, red.dot_a);
        for (Index c = 0; c < j.cols(); ++c)
        {
            CHECK(rel(j.col(c), fd.col(c)) <= 1e-5);
        }
    }

    // identity and MA(1) weights, other orders
    for (int trial = 0; trial < 10; ++trial)
    {
        const Index r          = 1 + Index(trial % 3);
        const Index n          = 10 + Index(rng.next() % 40);
        const Member mm        = random_member(rng, r, n);
        const ReducedGlrr rr   = h_tau_inverse(mm.a, mm.tau);
        const Signal xx        = Signal(Vector(mm.s.values() + 0.2 * ref::random_vector(rng, n)));
        const WeightOperator ww = trial % 2 ? ma1_weight(n, 0.4, 1.0) : WeightOperator::identity(n);
        const Matrix j          = jacobian_s_star(rr, xx, ww, Variant::svpgn);
        const Matrix fd = ref::jacobian_fd(
            [&](const Vector& p) { return s_star({p, rr.tau}, xx, ww, Variant::svpgn).values(); },
            rr.dot_a);
        for (Index c = 0; c < j.cols(); ++c)
        {
            CHECK(rel(j.col(c), fd.col(c)) <= 1e-5);
        }
    }

    // finite differences are exact on affine maps
    Matrix lin(4, 2);
    lin << 1, 2, 3, 4, 5, 6, 7, 8;
    const Matrix fd = ref::jacobian_fd([&](const Vector& p) { return Vector(lin * p + Vector::Ones(4)); },
                                       vec({0.3, -2.0}));
    CHECK((fd - lin).norm() <= 1e-9);
}

TEST_CASE("circulant Jacobian route")
{
    CHECK(parse_jacobian_route("circulant") == JacobianRoute::circulant);
    CHECK(std::string(to_string(JacobianRoute::gamma)) == "gamma");
    CHECK_GLRR_ERROR(parse_jacobian_route("qr"), ErrorCode::invalid_argument);

    SplitMix64 rng(67);
    for (int trial = 0; trial < 24; ++trial)
    {
        const Index r           = 1 + Index(trial % 3);
        const Index n           = 4 * r + 4 + Index(rng.next() % 40);
        const Member m          = random_member(rng, r, n);
        const ReducedGlrr red   = h_tau_inverse(m.a, m.tau);
        const Signal x          = Signal(Vector(m.s.values() + 0.2 * ref::random_vector(rng, n)));
        const WeightOperator w  = trial % 3 == 0   ? WeightOperator::identity(n)
                                  : trial % 3 == 1 ? ar1_weight(n, 0.5, 1.0)
                                                   : ma1_weight(n, -0.4, 2.0);
        const Variant v         = static_cast<Variant>((trial / 3) % 3);
        const Matrix jc         = jacobian_s_star(red, x, w, v, JacobianRoute::circulant);
        const Matrix jg         = jacobian_s_star(red, x, w, v, JacobianRoute::gamma);
        CHECK((jc - jg).norm() <= 1e-8 * jg.norm());
        const Matrix fd = ref::jacobian_fd(
            [&](const Vector& p) { return s_star({p, red.tau}, x, w, v).values(); }, red.dot_a);
        for (Index c = 0; c < jc.cols(); ++c)
        {
            CHECK(rel(jc.col(c), fd.col(c)) <= 1e-5);
        }
    }

    const ExampleProblem ex = make_example(40, WeightOperator::identity(40));
    VpgnOptions opt;
    opt.variant  = Variant::svpgn_h;
    opt.jacobian = JacobianRoute::circulant;
    const GlrrVector a0(Vector(ex.a_star.coeffs() + 1e-6 * perturbation(1, 0)));
    const VpgnReport report = vpgn_solve(ex.x, a0, opt);
    CHECK((report.estimate.values() - ex.y_star.values()).norm() <= 1e-6);
    CHECK(report.failure.empty());
    check_monotone(report);
}

TEST_CASE("gn_step")
{
    SplitMix64 rng(77);
    Matrix j(12, 3);
    for (Index i = 0; i < j.size(); ++i)
    {
        j.data()[i] = rng.uniform(-1, 1);
    }
    const WeightOperator w = ar1_weight(12, 0.3, 1.0);
    const Signal s         = Signal(ref::random_vector(rng, 12));
    CHECK(gn_step(j, s, s, w).norm() == 0.0);

    const Vector delta = ref::random_vector(rng, 3);
    const Signal x     = Signal(Vector(s.values() + j * delta));
    CHECK(rel(gn_step(j, x, s, w), delta) <= 1e-10);

    // residual W-orthogonal to colspace(J)
    const Matrix wd    = w.dense();
    const Vector r0    = ref::random_vector(rng, 12);
    const Matrix wj    = wd * j;
    const Vector ortho = r0 - j * (j.transpose() * wj).ldlt().solve(wj.transpose() * r0);
    CHECK(gn_step(j, Signal(Vector(s.values() + ortho)), s, w).norm() <= 1e-12);

    Matrix deficient = j;
    deficient.col(2) = deficient.col(0);
    CHECK_GLRR_ERROR(gn_step(deficient, x, s, w), ErrorCode::rank_deficient);
}

TEST_CASE("line_search")
{
    SplitMix64 rng(88);
    const Member m        = random_member(rng, 2, 20);
    const ReducedGlrr red = h_tau_inverse(m.a, m.tau);
    const Signal x        = Signal(Vector(m.s.values() + 0.05 * ref::random_vector(rng, 20)));

    const LineSearchResult zero = line_search(red, Vector::Zero(2), x, WeightOperator{}, Variant::svpgn);
    CHECK(zero.gamma == 1.0);
    const double current = (x.values() - s_star(red, x, WeightOperator{}, Variant::svpgn).values()).norm();
    CHECK(zero.objective == doctest::Approx(current).epsilon(1e-14));

    // X on Z(a) has objective 0, so any move is uphill
    const LineSearchResult up = line_search(red, vec({0.3, -0.2}), m.s, WeightOperator{}, Variant::svpgn, 2);
    CHECK(up.gamma == 0.0);
    CHECK(up.dot_a == red.dot_a);

    // a Gauss-Newton direction near the stationary point takes the full step
    const ExampleProblem ex = make_example(40, WeightOperator::identity(40));
    const NormalizedGlrr a0 =
        choose_tau_and_normalize(GlrrVector(Vector(ex.a_star.coeffs() + 1e-6 * perturbation(3, 0))));
    const ReducedGlrr r0  = h_tau_inverse(a0.a, a0.tau);
    for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
    {
        const Signal s0     = s_star(r0, ex.x, ex.weight, v);
        const Matrix j      = jacobian_s_star(r0, ex.x, ex.weight, v);
        const Vector step   = gn_step(j, ex.x, s0, ex.weight);
        const LineSearchResult ls = line_search(r0, step, ex.x, ex.weight, v);
        CHECK(ls.gamma == 1.0);
        CHECK(ls.objective <= ex.weight.norm(ex.x.values() - s0.values()));
    }
    CHECK_GLRR_ERROR(line_search(red, vec({NAN, 0}), x, WeightOperator{}, Variant::svpgn),
                     ErrorCode::invalid_argument);
}

TEST_CASE("vpgn_solve from the true GLRR of an exact series")
{
    const Vector t = uniform_grid(30);
    Vector s(30);
    for (Index i = 0; i < 30; ++i)
    {
        s[i] = 1.0 + 2.0 * t[i] - t[i] * t[i];
    }
    for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
    {
        VpgnOptions opt;
        opt.variant = v;
        const VpgnReport rep = vpgn_solve(Signal(s), GlrrVector{1, -3, 3, -1}, opt);
        REQUIRE_FALSE(rep.iterations.empty());
        CHECK(rep.iterations[0].objective <= 1e-12);
        CHECK(rep.iterations[0].step_norm <= 1e-10);
        CHECK(rel(rep.estimate.values(), s) <= 1e-12);
        CHECK(rep.stop_reason == StopReason::step_exhausted);
        check_monotone(rep);
    }
}

TEST_CASE("vpgn_solve recovers the stationary point of the constructed example")
{
    const ExampleProblem ex = make_example(40, WeightOperator::identity(40));
    for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
    {
        for (int rep = 0; rep < 3; ++rep)
        {
            VpgnOptions opt;
            opt.variant = v;
            const GlrrVector a0(Vector(ex.a_star.coeffs() + 1e-6 * perturbation(1, rep)));
            const VpgnReport report = vpgn_solve(ex.x, a0, opt);
            CHECK((report.estimate.values() - ex.y_star.values()).norm() <= 1e-6);
            CHECK(report.necessary_condition_residual <= 1e-6);
            CHECK(report.failure.empty());
            check_monotone(report);

            // stationarity of the final iterate
            const NormalizedGlrr fin = choose_tau_and_normalize(report.final_glrr);
            const ReducedGlrr red    = h_tau_inverse(fin.a, fin.tau);
            const Signal s           = s_star(red, ex.x, ex.weight, v);
            const Matrix j           = jacobian_s_star(red, ex.x, ex.weight, v);
            CHECK(gn_step(j, ex.x, s, ex.weight).norm() <= 1e-6 * (1.0 + red.dot_a.norm()));

            for (const VpgnIteration& it : report.iterations)
            {
                CHECK(it.normalized_a[it.tau] == -1.0);
                CHECK(it.normalized_a.cwiseAbs().maxCoeff() == 1.0);
            }
        }
    }
}

TEST_CASE("vpgn_solve options and limits")
{
    const ExampleProblem ex = make_example(30, WeightOperator::identity(30));
    const GlrrVector a0(Vector(ex.a_star.coeffs() + 1e-3 * perturbation(5, 0)));
    VpgnOptions opt;
    opt.max_iters         = 1;
    const VpgnReport one  = vpgn_solve(ex.x, a0, opt);
    CHECK(one.iterations.size() == 1);
    CHECK(one.stop_reason == StopReason::max_iters);
    CHECK(std::string(to_string(StopReason::step_exhausted)) == "step-exhausted");

    opt.max_iters = 0;
    CHECK_GLRR_ERROR(vpgn_solve(ex.x, a0, opt), ErrorCode::invalid_argument);
    opt.max_iters = 10;
    CHECK_GLRR_ERROR(vpgn_solve(Signal{1, 2, 3, 4, 5, 6}, a0, opt), ErrorCode::length_too_short);
    opt.weight = WeightOperator::identity(7);
    CHECK_GLRR_ERROR(vpgn_solve(ex.x, a0, opt), ErrorCode::incompatible_dimension);

    // weighted runs keep the objective non-increasing too
    const ExampleProblem wex = make_example(40, ar1_weight(40, 0.5, 1.0));
    for (Variant v : {Variant::vpgn, Variant::svpgn, Variant::svpgn_h})
    {
        VpgnOptions w;
        w.variant = v;
        w.weight  = wex.weight;
        const VpgnReport rep =
            vpgn_solve(wex.x, GlrrVector(Vector(wex.a_star.coeffs() + 1e-6 * perturbation(2, 1))), w);
        check_monotone(rep);
        CHECK((rep.estimate.values() - wex.y_star.values()).norm() <= 1e-6);
    }
}

TEST_CASE("tangent space of the parameterization")
{
    const TangentSpaceCheck c = tangent_space_check(Signal(Vector::Constant(10, 2.0)), GlrrVector{1, -1}, 1);
    CHECK(c.residual <= 1e-6);
    CHECK(c.rank == 2);
    CHECK(c.fs_residual <= 1e-7);

    Vector lin(12);
    for (Index i = 0; i < 12; ++i)
    {
        lin[i] = 0.5 + 0.25 * double(i);
    }
    const TangentSpaceCheck l = tangent_space_check(Signal(lin), GlrrVector{0.5, -1, 0.5}, 1);
    CHECK(l.residual <= 1e-6);
    CHECK(l.rank == 4);
    CHECK(l.fs_residual <= 1e-7);

    const ExampleProblem ex = make_example(20, WeightOperator::identity(20));
    const TangentSpaceCheck q =
        tangent_space_check(ex.y_star, GlrrVector{1.0 / 3, -1, 1, -1.0 / 3}, 1);
    CHECK(q.residual <= 1e-6);
    CHECK(q.rank == 6);

    CHECK_GLRR_ERROR(tangent_space_check(Signal{1, 1, 1, 1}, GlrrVector{1, -1}, 1),
                     ErrorCode::length_too_short);
}

TEST_CASE("finite-difference blocks of the parameterization")
{
    SplitMix64 rng(909);
    for (int trial = 0; trial < 12; ++trial)
    {
        const Index r   = 1 + Index(trial % 3);
        const Index n   = 4 * r + 4 + Index(rng.next() % 10);
        const Member m  = random_member(rng, r, n);
        const ParamPoint p = s_tau_inverse(m.s, m.a, m.tau);
        const Vector as = p.reduced.dot_a;

        const Matrix fs = ref::jacobian_fd(
            [&](const Vector& ds) { return s_tau({ds, p.reduced}, n).values(); }, p.dot_s);
        const Matrix fa = ref::jacobian_fd(
            [&](const Vector& da) { return s_tau({p.dot_s, {da, m.tau}}, n).values(); }, as);

        const Matrix qt = ref::q_transpose_dense(m.a.coeffs(), n);
        CHECK((qt * fs).norm() <= 1e-7 * std::max(1.0, fs.norm()));

        // Q^T(a) F_a = -(rows K(tau) of T_{r+1}(S))^T
        const Matrix traj    = embed(m.s, r + 1).entries;
        const IndexSets sets = index_sets(m.tau, n, r);
        Matrix m_rows(n - r, r);
        for (Index i = 0; i < r; ++i)
        {
            m_rows.col(i) = traj.row(sets.mask[std::size_t(i)]).transpose();
        }
        CHECK((qt * fa + m_rows).norm() <= 1e-5 * m_rows.norm());

        // all 2r columns lie in Z(a^2)
        Matrix jac(n, 2 * r);
        jac << fs, fa;
        const Matrix q2 = ref::q_transpose_dense(acyclic_square(m.a).coeffs(), n);
        CHECK((q2 * jac).norm() <= 1e-6 * jac.norm());
        CHECK(ref::rank_svd(jac, 1e-7) == 2 * r);
    }
}
