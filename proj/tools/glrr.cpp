// Command line front end: projection, estimation, example generation and
// the two experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glrr/harness.hpp"
#include "glrr/io.hpp"
#include "glrr/optimizer.hpp"
#include "glrr/projection.hpp"

namespace fs = std::filesystem;
using namespace glrr;

namespace
{

constexpr Index kDenseCliLimit  = 4000;
constexpr Index kDeskScaleLimit = 5000;

std::vector<Index> parse_index_list(const std::string& text)
{
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        std::size_t pos = 0;
        long long v     = 0;
        try
        {
            v = std::stoll(item, &pos);
        }
        catch (const std::exception&)
        {
            pos = 0;
        }
        if (pos != item.size() || v <= 0)
        {
            throw Error(ErrorCode::invalid_argument, "bad list entry '" + item + "'");
        }
        out.push_back(static_cast<Index>(v));
    }
    if (out.empty())
    {
        throw Error(ErrorCode::invalid_argument, "empty list");
    }
    return out;
}

std::vector<std::string> split_names(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (!item.empty())
        {
            out.push_back(item);
        }
    }
    return out;
}

/// Refuses the O(N^3) dense Gamma route unless explicitly allowed.
void check_dense_route(const WeightOperator& w, bool uses_gamma, bool allow_dense)
{
    if (uses_gamma && !w.inverse_factor() && w.size() > kDenseCliLimit && !allow_dense)
    {
        throw Error(ErrorCode::size_limit,
                    "the Gamma route with this weight is O(N^3) and N exceeds 4000; "
                    "pass --allow-dense to run it anyway");
    }
}

/// Appends "--key value" for every config entry whose flag is not on the
/// command line, so that explicit flags win.
std::vector<std::string> merge_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i)
    {
        if (args[i] == "--config" && i + 1 < args.size())
        {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0)
        {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty())
    {
        return args;
    }
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorCode::io_format, "cannot read config " + path);
    }
    nlohmann::json cfg;
    try
    {
        cfg = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::io_format, std::string("config: ") + e.what());
    }
    if (!cfg.is_object())
    {
        throw Error(ErrorCode::io_format, "config must be a JSON object");
    }
    auto present = [&](const std::string& flag) {
        for (const std::string& a : args)
        {
            if (a == flag || a.rfind(flag + "=", 0) == 0)
            {
                return true;
            }
        }
        return false;
    };
    auto scalar = [](const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    for (const auto& [key, value] : cfg.items())
    {
        const std::string flag = "--" + key;
        if (present(flag))
        {
            continue;
        }
        if (value.is_boolean())
        {
            if (value.get<bool>())
            {
                args.push_back(flag);
            }
            continue;
        }
        std::string text;
        if (value.is_array())
        {
            for (std::size_t i = 0; i < value.size(); ++i)
            {
                text += (i ? "," : "") + scalar(value[i]);
            }
        }
        else
        {
            text = scalar(value);
        }
        args.push_back(flag);
        args.push_back(text);
    }
    return args;
}

struct ProjectArgs
{
    std::string input, glrr, method = "svp", weights = "identity", output;
    bool allow_dense = false;
};

int run_project(const ProjectArgs& a)
{
    const Signal x         = io::read_signal_csv(a.input);
    const GlrrVector g(io::read_values_csv(a.glrr));
    const WeightOperator w = WeightSpec::parse(a.weights).make(x.size());
    const ProjectionMethod method = parse_projection_method(a.method);
    check_dense_route(w, method == ProjectionMethod::vp, a.allow_dense);

    const ProjectionResult res = project(g, w, x.values(), method);
    io::write_signal_csv(a.output, res.projected);
    std::printf("projected N=%lld r=%lld method=%s residual=%.3e imag_leak=%.3e\n",
                static_cast<long long>(x.size()), static_cast<long long>(g.order()),
                to_string(method), glrr_residual(res.projected, g), res.imag_leak);
    return 0;
}

struct EstimateArgs
{
    std::string input, init, method = "svpgn", weights = "identity", report, output,
                jacobian = "gamma";
    Index rank    = 0;
    int max_iters = 200;
    bool allow_dense = false;
};

int run_estimate(const EstimateArgs& a)
{
    const Signal x = io::read_signal_csv(a.input);
    const GlrrVector a0(io::read_values_csv(a.init));
    if (a0.order() != a.rank)
    {
        throw Error(ErrorCode::incompatible_dimension,
                    "--init has " + std::to_string(a0.size()) + " coefficients, rank " +
                        std::to_string(a.rank) + " needs " + std::to_string(a.rank + 1));
    }
    VpgnOptions opts;
    opts.variant   = parse_variant(a.method);
    opts.max_iters = a.max_iters;
    opts.weight    = WeightSpec::parse(a.weights).make(x.size());
    opts.jacobian  = parse_jacobian_route(a.jacobian);
    // the default Jacobian uses Gamma in every variant
    check_dense_route(opts.weight, opts.jacobian == JacobianRoute::gamma || opts.variant == Variant::vpgn,
                      a.allow_dense);

    const VpgnReport report = vpgn_solve(x, a0, opts);
    io::write_signal_csv(a.output, report.estimate);
    if (!a.report.empty())
    {
        io::write_text(a.report, io::report_to_json(report) + "\n");
    }
    std::printf("estimate N=%lld r=%lld method=%s iterations=%zu stop=%s objective=%.6e\n",
                static_cast<long long>(x.size()), static_cast<long long>(a.rank),
                to_string(opts.variant), report.iterations.size(), to_string(report.stop_reason),
                opts.weight.norm(x.values() - report.estimate.values()));
    return 0;
}

struct ExampleArgs
{
    Index n = 0;
    std::string kind = "solution", out_dir = ".", weights = "identity";
};

int run_make_example(const ExampleArgs& a)
{
    const WeightOperator w = WeightSpec::parse(a.weights).make(a.n);
    ExampleProblem ex;
    if (a.kind == "solution")
    {
        ex = make_example(a.n, w);
    }
    else if (a.kind == "projection")
    {
        ex = make_projection_example(a.n, w);
    }
    else
    {
        throw Error(ErrorCode::invalid_argument, "--kind must be solution or projection");
    }
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    io::write_signal_csv((dir / (a.kind == "solution" ? "x.csv" : "p.csv")).string(), ex.x);
    io::write_signal_csv((dir / "y_star.csv").string(), ex.y_star);
    io::write_values_csv((dir / "a_star.csv").string(), ex.a_star.coeffs());
    std::printf("wrote %s example N=%lld to %s\n", a.kind.c_str(), static_cast<long long>(a.n),
                a.out_dir.c_str());
    return 0;
}

void check_desk_scale(const std::vector<Index>& n_list, bool extended)
{
    for (Index n : n_list)
    {
        if (n > kDeskScaleLimit && !extended)
        {
            throw Error(ErrorCode::size_limit,
                        "N = " + std::to_string(n) + " exceeds the desk-scale cap of 5000; "
                        "pass --extended to run it");
        }
    }
}

struct AccuracyArgs
{
    std::string n_list = "20,50,100,200,500,1000,2000,5000", methods = "vp,svp,svph",
                weights = "identity", out = "results";
    int threads   = 1;
    bool extended = false;
};

int run_proj_accuracy(const AccuracyArgs& a)
{
    ProjectionAccuracyOptions opts;
    opts.n_list  = parse_index_list(a.n_list);
    opts.weight  = WeightSpec::parse(a.weights);
    opts.threads = a.threads;
    opts.methods.clear();
    for (const std::string& m : split_names(a.methods))
    {
        opts.methods.push_back(parse_projection_method(m));
    }
    check_desk_scale(opts.n_list, a.extended);
    const auto rows = experiment_projection_accuracy(opts);
    fs::create_directories(a.out);
    const fs::path dir(a.out);
    write_rows_csv((dir / "proj_accuracy.csv").string(), rows);
    io::write_text((dir / "proj_accuracy.svg").string(),
                   loglog_svg(rows, "accuracy", "Projection accuracy ||Pi P - Y*||"));
    for (const ExperimentRow& r : rows)
    {
        std::printf("N=%-6lld %-5s accuracy=%.3e %s\n", static_cast<long long>(r.n),
                    r.method.c_str(), r.value, r.status.c_str());
    }
    return 0;
}

struct StabilityArgs
{
    std::string n_list = "100,500,1500", variants = "vpgn,svpgn,svpgn-h", weights = "identity",
                out = "results", jacobian = "gamma";
    int reps = 20, threads = 1, max_iters = 200;
    std::uint64_t seed = 1;
    bool extended      = false;
};

int run_stability(const StabilityArgs& a)
{
    StabilityOptions opts;
    opts.n_list    = parse_index_list(a.n_list);
    opts.reps      = a.reps;
    opts.seed      = a.seed;
    opts.weight    = WeightSpec::parse(a.weights);
    opts.threads   = a.threads;
    opts.max_iters = a.max_iters;
    opts.jacobian  = parse_jacobian_route(a.jacobian);
    opts.variants.clear();
    for (const std::string& v : split_names(a.variants))
    {
        opts.variants.push_back(parse_variant(v));
    }
    check_desk_scale(opts.n_list, a.extended);
    const auto rows    = experiment_solution_stability(opts);
    const auto summary = summarize(rows);
    fs::create_directories(a.out);
    const fs::path dir(a.out);
    write_rows_csv((dir / "stability.csv").string(), rows);
    write_rows_csv((dir / "stability_summary.csv").string(), summary);
    io::write_text((dir / "stability_distance.svg").string(),
                   loglog_svg(summary, "mean_distance", "Mean distance ||Y~ - Y*||"));
    std::vector<ExperimentRow> gaps = summary;
    for (ExperimentRow& r : gaps)
    {
        r.value = std::abs(r.value);
    }
    io::write_text((dir / "stability_objective_gap.svg").string(),
                   loglog_svg(gaps, "mean_objective_gap", "Mean |objective gap|"));
    for (const ExperimentRow& r : summary)
    {
        std::printf("N=%-6lld %-8s %-20s %.3e %s\n", static_cast<long long>(r.n), r.method.c_str(),
                    r.metric.c_str(), r.value, r.status.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    CLI::App app{"Low-rank time series estimation with GLRR projections"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "glrr 0.1.0");

    ProjectArgs pa;
    auto* project_cmd = app.add_subcommand("project", "Project a series onto Z(a)");
    project_cmd->add_option("--input", pa.input, "Series CSV")->required();
    project_cmd->add_option("--glrr", pa.glrr, "GLRR coefficient CSV")->required();
    project_cmd->add_option("--method", pa.method, "vp | svp | svph")->capture_default_str();
    project_cmd->add_option("--weights", pa.weights, "identity | ar1:phi=..,sigma2=.. | ma1:theta=..,sigma2=..")
        ->capture_default_str();
    project_cmd->add_option("--output", pa.output, "Output CSV")->required();
    project_cmd->add_flag("--allow-dense", pa.allow_dense, "Allow the O(N^3) Gamma route above N=4000");

    EstimateArgs ea;
    auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the rank-r signal by Gauss-Newton");
    estimate_cmd->add_option("--input", ea.input, "Series CSV")->required();
    estimate_cmd->add_option("--rank", ea.rank, "Order r of the GLRR")->required()->check(CLI::PositiveNumber);
    estimate_cmd->add_option("--init", ea.init, "Initial GLRR coefficients CSV (r+1 values)")->required();
    estimate_cmd->add_option("--method", ea.method, "vpgn | svpgn | svpgn-h")->capture_default_str();
    estimate_cmd->add_option("--max-iters", ea.max_iters, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    estimate_cmd->add_option("--weights", ea.weights, "Weight specification")->capture_default_str();
    estimate_cmd->add_option("--report", ea.report, "JSON report path");
    estimate_cmd->add_option("--output", ea.output, "Estimate CSV")->required();
    estimate_cmd->add_flag("--allow-dense", ea.allow_dense, "Allow the O(N^3) Gamma route above N=4000");
    estimate_cmd->add_option("--jacobian", ea.jacobian, "gamma | circulant")->group("");

    ExampleArgs xa;
    auto* example_cmd = app.add_subcommand("make-example", "Write a test problem with a known solution");
    example_cmd->add_option("--n", xa.n, "Series length (>= 8)")->required();
    example_cmd->add_option("--kind", xa.kind, "solution | projection")->capture_default_str();
    example_cmd->add_option("--out-dir", xa.out_dir, "Output directory")->capture_default_str();
    example_cmd->add_option("--weights", xa.weights, "Weight specification")->capture_default_str();

    auto* experiment_cmd = app.add_subcommand("experiment", "Run an experiment");
    experiment_cmd->require_subcommand(1);

    AccuracyArgs aa;
    auto* acc_cmd = experiment_cmd->add_subcommand("proj-accuracy", "Projection accuracy against N");
    acc_cmd->add_option("--n-list", aa.n_list, "Comma separated lengths")->capture_default_str();
    acc_cmd->add_option("--methods", aa.methods, "Comma separated methods")->capture_default_str();
    acc_cmd->add_option("--weights", aa.weights, "Weight specification")->capture_default_str();
    acc_cmd->add_option("--out", aa.out, "Output directory")->capture_default_str();
    acc_cmd->add_option("--threads", aa.threads, "Worker threads")->capture_default_str();
    acc_cmd->add_flag("--extended", aa.extended, "Allow N above 5000");

    StabilityArgs sa;
    auto* stab_cmd = experiment_cmd->add_subcommand("stability", "Solution stability of the solvers");
    stab_cmd->add_option("--n-list", sa.n_list, "Comma separated lengths")->capture_default_str();
    stab_cmd->add_option("--reps", sa.reps, "Replications per N")->capture_default_str()->check(CLI::PositiveNumber);
    stab_cmd->add_option("--seed", sa.seed, "Base seed")->capture_default_str();
    stab_cmd->add_option("--variants", sa.variants, "Comma separated solver variants")->capture_default_str();
    stab_cmd->add_option("--weights", sa.weights, "Weight specification")->capture_default_str();
    stab_cmd->add_option("--max-iters", sa.max_iters, "Iteration cap")->capture_default_str();
    stab_cmd->add_option("--out", sa.out, "Output directory")->capture_default_str();
    stab_cmd->add_option("--threads", sa.threads, "Worker threads")->capture_default_str();
    stab_cmd->add_flag("--extended", sa.extended, "Allow N above 5000");
    stab_cmd->add_option("--jacobian", sa.jacobian, "gamma | circulant")->group("");

    try
    {
        args = merge_config(std::move(args));
        // CLI11 consumes the argument vector from the back
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    catch (const Error& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_status(e.code());
    }

    try
    {
        if (project_cmd->parsed())
        {
            return run_project(pa);
        }
        if (estimate_cmd->parsed())
        {
            return run_estimate(ea);
        }
        if (example_cmd->parsed())
        {
            return run_make_example(xa);
        }
        if (acc_cmd->parsed())
        {
            return run_proj_accuracy(aa);
        }
        if (stab_cmd->parsed())
        {
            return run_stability(sa);
        }
    }
    catch (const Error& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_status(e.code());
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
