#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glrr/harness.hpp"
#include "glrr/optimizer.hpp"
#include "glrr/projection.hpp"
#include "glrr/subspace.hpp"

namespace py = pybind11;
using namespace glrr;

namespace
{

HornerMethod parse_horner(const std::string& name)
{
    if (name == "plain")
    {
        return HornerMethod::plain;
    }
    if (name == "compensated")
    {
        return HornerMethod::compensated;
    }
    throw Error(ErrorCode::invalid_argument, "unknown Horner method '" + name + "'");
}

py::dict iteration_dict(const VpgnIteration& it)
{
    py::dict d;
    d["k"]               = it.k;
    d["tau"]             = it.tau;
    d["objective"]       = it.objective;
    d["gamma"]           = it.gamma;
    d["step_norm"]       = it.step_norm;
    d["normalized_glrr"] = it.normalized_a;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "GLRR projections and Gauss-Newton estimation";

    static py::exception<Error> glrr_error(m, "GlrrError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try
        {
            if (p)
            {
                std::rethrow_exception(p);
            }
        }
        catch (const Error& e)
        {
            py::object type = glrr_error;
            py::object err  = type(e.what());
            err.attr("code") = to_string(e.code());
            PyErr_SetObject(glrr_error.ptr(), err.ptr());
        }
    });

    m.def(
        "series_rank", [](const Vector& x, double tol) { return series_rank(Signal(x), tol); },
        py::arg("x"), py::arg("tol") = 1e-9);

    m.def(
        "glrr_residual",
        [](const Vector& x, const Vector& a) { return glrr_residual(Signal(x), GlrrVector(a)); },
        py::arg("x"), py::arg("a"), "max_i |sum_k a_k x_{i+k}| over the valid rows");

    m.def(
        "find_alpha0",
        [](const Vector& a, Index n, const std::string& horner) {
            const RotationDiagnostics d = find_alpha0(GlrrVector(a), n, parse_horner(horner));
            py::dict out;
            out["alpha0"]      = d.alpha0;
            out["min_abs_eig"] = d.min_abs_eig;
            out["max_abs_eig"] = d.max_abs_eig;
            out["condition"]   = d.condition;
            return out;
        },
        py::arg("a"), py::arg("n"), py::arg("horner") = "plain");

    m.def(
        "basis",
        [](const Vector& a, Index n, const std::string& horner) {
            const SubspaceBasis b = basis_stable(GlrrVector(a), n, parse_horner(horner));
            return py::make_tuple(b.z, b.alpha0, b.eigvals);
        },
        py::arg("a"), py::arg("n"), py::arg("horner") = "plain",
        "Orthonormal complex basis of Z(a), the rotation alpha0 and the circulant eigenvalues");

    m.def(
        "project",
        [](const Vector& a, const Vector& x, const std::string& method, const std::string& weights) {
            const WeightOperator w = WeightSpec::parse(weights).make(x.size());
            return project(GlrrVector(a), w, x, parse_projection_method(method)).projected.values();
        },
        py::arg("a"), py::arg("x"), py::arg("method") = "svp", py::arg("weights") = "identity",
        "W-orthogonal projection of x onto Z(a); method is vp, svp or svph");

    m.def(
        "estimate",
        [](const Vector& x, const Vector& a0, const std::string& method, const std::string& weights,
           int max_iters) {
            VpgnOptions opt;
            opt.variant   = parse_variant(method);
            opt.weight    = WeightSpec::parse(weights).make(x.size());
            opt.max_iters = max_iters;
            const VpgnReport r = vpgn_solve(Signal(x), GlrrVector(a0), opt);
            py::dict out;
            out["estimate"]    = r.estimate.values();
            out["final_glrr"]  = r.final_glrr.coeffs();
            out["stop_reason"] = to_string(r.stop_reason);
            out["necessary_condition_residual"] = r.necessary_condition_residual;
            py::list its;
            for (const VpgnIteration& it : r.iterations)
            {
                its.append(iteration_dict(it));
            }
            out["iterations"] = its;
            if (!r.failure.empty())
            {
                out["failure"] = r.failure;
            }
            return out;
        },
        py::arg("x"), py::arg("a0"), py::arg("method") = "svpgn", py::arg("weights") = "identity",
        py::arg("max_iters") = 200);

    m.def(
        "make_example",
        [](Index n, const std::string& weights) {
            const ExampleProblem ex = make_example(n, WeightSpec::parse(weights).make(n));
            py::dict out;
            out["x"]      = ex.x.values();
            out["y_star"] = ex.y_star.values();
            out["a_star"] = ex.a_star.coeffs();
            out["grid"]   = ex.grid;
            return out;
        },
        py::arg("n"), py::arg("weights") = "identity");

    m.def(
        "tangent_space_check",
        [](const Vector& x, const Vector& a, Index tau) {
            const TangentSpaceCheck c = tangent_space_check(Signal(x), GlrrVector(a), tau);
            return py::make_tuple(c.residual, c.rank);
        },
        py::arg("x"), py::arg("a"), py::arg("tau"));
}
