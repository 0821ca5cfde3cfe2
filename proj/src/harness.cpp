#include "glrr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <Eigen/QR>

#include "glrr/rng.hpp"

namespace glrr
{

namespace
{

constexpr Index kExampleMinLength = 8;
constexpr double kStartPerturbation = 1e-6;

void run_tasks(std::size_t count, int threads, const std::function<void(std::size_t)>& task)
{
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
            {
                task(i);
            }
        });
    }
    for (auto& th : pool)
    {
        th.join();
    }
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(std::string_view text, std::string_view what)
{
    const std::string s(text);
    char* end      = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
    {
        throw Error(ErrorCode::io_format, "bad number '" + s + "' for " + std::string(what));
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos)
        {
            return parts;
        }
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    {
        s.remove_suffix(1);
    }
    return s;
}

ExampleProblem base_example(Index n, const WeightOperator& w, Index residual_degree)
{
    if (n < kExampleMinLength)
    {
        throw Error(ErrorCode::length_too_short, "example problems need N >= 8");
    }
    if (w.size() != n)
    {
        throw Error(ErrorCode::incompatible_dimension, "weight size differs from N");
    }
    ExampleProblem ex;
    ex.grid   = uniform_grid(n);
    ex.a_star = example_glrr();
    ex.weight = w;

    const Vector y_star = example_solution(n);
    Vector rhat         = ex.grid.cwiseAbs();
    rhat /= rhat.norm();
    const Matrix basis = legendre_basis(ex.grid, residual_degree);
    const Vector coef  = weighted_lstsq(basis, w, rhat);
    const Vector r     = rhat - basis * coef;

    ex.y_star = Signal(y_star);
    ex.x      = Signal(Vector(y_star + r));
    return ex;
}

} // namespace

WeightOperator WeightSpec::make(Index n) const
{
    switch (kind)
    {
    case Kind::identity: return WeightOperator::identity(n);
    case Kind::ar1: return ar1_weight(n, coef, sigma2);
    case Kind::ma1: break;
    }
    return ma1_weight(n, coef, sigma2);
}

std::string WeightSpec::str() const
{
    switch (kind)
    {
    case Kind::identity: return "identity";
    case Kind::ar1: return "ar1:phi=" + format_double(coef) + ",sigma2=" + format_double(sigma2);
    case Kind::ma1: break;
    }
    return "ma1:theta=" + format_double(coef) + ",sigma2=" + format_double(sigma2);
}

WeightSpec WeightSpec::parse(std::string_view text)
{
    text = trim(text);
    WeightSpec spec;
    if (text == "identity")
    {
        return spec;
    }
    const std::size_t colon = text.find(':');
    const std::string_view family = text.substr(0, colon);
    std::string_view coef_name;
    if (family == "ar1")
    {
        spec.kind = Kind::ar1;
        coef_name = "phi";
    }
    else if (family == "ma1")
    {
        spec.kind = Kind::ma1;
        coef_name = "theta";
    }
    else
    {
        throw Error(ErrorCode::invalid_argument, "unknown weight family '" + std::string(text) + "'");
    }
    if (colon != std::string_view::npos)
    {
        for (std::string_view item : split(text.substr(colon + 1), ','))
        {
            const std::size_t eq = item.find('=');
            if (eq == std::string_view::npos)
            {
                throw Error(ErrorCode::invalid_argument,
                            "weight parameter '" + std::string(item) + "' is not key=value");
            }
            const std::string_view key = trim(item.substr(0, eq));
            const double value         = parse_number(trim(item.substr(eq + 1)), key);
            if (key == coef_name)
            {
                spec.coef = value;
            }
            else if (key == "sigma2")
            {
                spec.sigma2 = value;
            }
            else
            {
                throw Error(ErrorCode::invalid_argument,
                            "unknown weight parameter '" + std::string(key) + "'");
            }
        }
    }
    return spec;
}

Vector uniform_grid(Index n)
{
    Vector t(n);
    for (Index i = 0; i < n; ++i)
    {
        t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return t;
}

Matrix legendre_basis(const Vector& points, Index max_degree)
{
    if (max_degree < 0)
    {
        throw Error(ErrorCode::invalid_argument, "degree must be nonnegative");
    }
    const Index n = points.size();
    const Index d = max_degree + 1;
    if (n < d)
    {
        throw Error(ErrorCode::rank_deficient, "fewer points than polynomial degrees");
    }
    Matrix p(n, d);
    p.col(0).setOnes();
    if (d > 1)
    {
        p.col(1) = points;
    }
    for (Index k = 1; k + 1 < d; ++k)
    {
        const double kk = static_cast<double>(k);
        p.col(k + 1) = ((2.0 * kk + 1.0) * points.cwiseProduct(p.col(k)) - kk * p.col(k - 1)) /
                       (kk + 1.0);
    }
    Eigen::HouseholderQR<Matrix> qr(p);
    Matrix q = qr.householderQ() * Matrix::Identity(n, d);
    for (Index k = 0; k < d; ++k)
    {
        if (qr.matrixQR()(k, k) < 0.0)
        {
            q.col(k) = -q.col(k);
        }
    }
    return q;
}

Vector example_solution(Index n)
{
    if (n < 3)
    {
        throw Error(ErrorCode::length_too_short, "the example needs N >= 3");
    }
    Vector y = uniform_grid(n).array().square();
    return y / y.norm();
}

GlrrVector example_glrr()
{
    return GlrrVector{1.0, -3.0, 3.0, -1.0};
}

ExampleProblem make_example(Index n, const WeightOperator& w)
{
    return base_example(n, w, 5);
}

ExampleProblem make_projection_example(Index n, const WeightOperator& w)
{
    return base_example(n, w, 2);
}

std::vector<ExperimentRow> experiment_projection_accuracy(const ProjectionAccuracyOptions& options)
{
    if (options.n_list.empty())
    {
        throw Error(ErrorCode::invalid_argument, "N list is empty");
    }
    const std::size_t nm = options.methods.size();
    std::vector<ExperimentRow> rows(options.n_list.size() * nm);
    run_tasks(options.n_list.size(), options.threads, [&](std::size_t cell) {
        const Index n = options.n_list[cell];
        ExampleProblem ex;
        std::string setup_error;
        try
        {
            ex = make_projection_example(n, options.weight.make(n));
        }
        catch (const Error& e)
        {
            setup_error = e.what();
        }
        for (std::size_t m = 0; m < nm; ++m)
        {
            ExperimentRow& row = rows[cell * nm + m];
            row.n              = n;
            row.method         = to_string(options.methods[m]);
            row.metric         = "accuracy";
            try
            {
                if (!setup_error.empty())
                {
                    throw Error(ErrorCode::invalid_argument, setup_error);
                }
                const Vector p =
                    project(ex.a_star, ex.weight, ex.x.values(), options.methods[m]).projected.values();
                row.value = (p - ex.y_star.values()).norm();
                if (!std::isfinite(row.value))
                {
                    row.status = "diverged";
                }
            }
            catch (const Error&)
            {
                row.value  = std::numeric_limits<double>::infinity();
                row.status = "diverged";
            }
        }
    });
    return rows;
}

Vector stability_direction(std::uint64_t seed, int replication)
{
    SplitMix64 rng(SplitMix64::derive(seed, static_cast<std::uint64_t>(replication)));
    Vector d(4);
    for (Index i = 0; i < 4; ++i)
    {
        d[i] = rng.uniform(-1.0, 1.0);
    }
    return d;
}

std::vector<ExperimentRow> experiment_solution_stability(const StabilityOptions& options)
{
    if (options.reps < 1)
    {
        throw Error(ErrorCode::invalid_argument, "reps must be at least 1");
    }
    if (options.n_list.empty())
    {
        throw Error(ErrorCode::invalid_argument, "N list is empty");
    }
    const std::size_t nv    = options.variants.size();
    const std::size_t reps  = static_cast<std::size_t>(options.reps);
    const std::size_t cells = options.n_list.size() * reps;
    std::vector<ExperimentRow> rows(cells * nv * 2);

    run_tasks(cells, options.threads, [&](std::size_t cell) {
        const Index n    = options.n_list[cell / reps];
        const int rep    = static_cast<int>(cell % reps);
        const auto seed  = SplitMix64::derive(options.seed, static_cast<std::uint64_t>(rep));
        const Vector d   = stability_direction(options.seed, rep);
        const ExampleProblem ex = make_example(n, options.weight.make(n));
        const GlrrVector a0(Vector(ex.a_star.coeffs() + kStartPerturbation * d));
        const double base_objective = ex.weight.norm(ex.x.values() - ex.y_star.values());

        for (std::size_t v = 0; v < nv; ++v)
        {
            // rows ordered by (N, method, replication, metric)
            const std::size_t slot = ((cell / reps) * nv + v) * reps + static_cast<std::size_t>(rep);
            ExperimentRow* out     = &rows[slot * 2];
            for (int k = 0; k < 2; ++k)
            {
                out[k].n           = n;
                out[k].method      = to_string(options.variants[v]);
                out[k].replication = rep;
                out[k].seed        = seed;
                out[k].metric      = k == 0 ? "distance" : "objective_gap";
            }
            try
            {
                VpgnOptions opts;
                opts.variant   = options.variants[v];
                opts.max_iters = options.max_iters;
                opts.weight    = ex.weight;
                opts.seed      = seed;
                opts.jacobian  = options.jacobian;
                const VpgnReport report = vpgn_solve(ex.x, a0, opts);
                const Vector& est       = report.estimate.values();
                out[0].value = (est - ex.y_star.values()).norm();
                out[1].value = ex.weight.norm(ex.x.values() - est) - base_objective;
                for (int k = 0; k < 2; ++k)
                {
                    if (!std::isfinite(out[k].value))
                    {
                        out[k].status = "diverged";
                    }
                }
            }
            catch (const Error&)
            {
                for (int k = 0; k < 2; ++k)
                {
                    out[k].value  = std::numeric_limits<double>::infinity();
                    out[k].status = "diverged";
                }
            }
        }
    });

    return rows;
}

std::vector<ExperimentRow> summarize(const std::vector<ExperimentRow>& rows)
{
    struct Acc
    {
        double sum    = 0.0;
        int count     = 0;
        bool diverged = false;
    };
    std::vector<std::tuple<Index, std::string, std::string>> order;
    std::map<std::tuple<Index, std::string, std::string>, Acc> acc;
    for (const ExperimentRow& row : rows)
    {
        const auto key = std::make_tuple(row.n, row.method, row.metric);
        auto [it, inserted] = acc.try_emplace(key);
        if (inserted)
        {
            order.push_back(key);
        }
        it->second.sum += row.value;
        it->second.count += 1;
        it->second.diverged = it->second.diverged || row.status != "ok";
    }
    std::vector<ExperimentRow> out;
    for (const auto& key : order)
    {
        const Acc& a = acc[key];
        ExperimentRow row;
        row.n           = std::get<0>(key);
        row.method      = std::get<1>(key);
        row.metric      = "mean_" + std::get<2>(key);
        row.replication = -1;
        row.value       = a.sum / a.count;
        row.status      = a.diverged ? "diverged" : "ok";
        out.push_back(std::move(row));
    }
    return out;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows)
{
    std::ostringstream os;
    os << "n,method,replication,seed,metric,value,status\n";
    for (const ExperimentRow& r : rows)
    {
        os << r.n << ',' << r.method << ',' << r.replication << ',' << r.seed << ',' << r.metric
           << ',' << format_double(r.value) << ',' << r.status << '\n';
    }
    return os.str();
}

std::vector<ExperimentRow> rows_from_csv(std::string_view text)
{
    std::vector<ExperimentRow> rows;
    bool header = true;
    for (std::string_view line : split(text, '\n'))
    {
        line = trim(line);
        if (line.empty())
        {
            continue;
        }
        if (header)
        {
            header = false;
            if (line != "n,method,replication,seed,metric,value,status")
            {
                throw Error(ErrorCode::io_format, "unexpected experiment CSV header");
            }
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 7)
        {
            throw Error(ErrorCode::io_format, "experiment CSV row needs 7 fields");
        }
        ExperimentRow r;
        r.n           = static_cast<Index>(parse_number(f[0], "n"));
        r.method      = std::string(f[1]);
        r.replication = static_cast<int>(parse_number(f[2], "replication"));
        r.seed        = std::strtoull(std::string(f[3]).c_str(), nullptr, 10);
        r.metric      = std::string(f[4]);
        r.value       = parse_number(f[5], "value");
        r.status      = std::string(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_rows_csv(const std::string& path, const std::vector<ExperimentRow>& rows)
{
    std::ofstream out(path);
    if (!out)
    {
        throw Error(ErrorCode::io_format, "cannot write " + path);
    }
    out << rows_to_csv(rows);
}

std::vector<ExperimentRow> read_rows_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorCode::io_format, "cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return rows_from_csv(ss.str());
}

std::string loglog_svg(const std::vector<ExperimentRow>& rows, std::string_view metric,
                       std::string_view title)
{
    std::vector<std::string> methods;
    std::map<std::string, std::vector<std::pair<double, double>>> lines;
    for (const ExperimentRow& r : rows)
    {
        if (r.metric != metric || !(r.value > 0.0) || !std::isfinite(r.value) || r.n <= 0)
        {
            continue;
        }
        if (!lines.count(r.method))
        {
            methods.push_back(r.method);
        }
        lines[r.method].emplace_back(std::log10(static_cast<double>(r.n)), std::log10(r.value));
    }

    constexpr double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool any = false;
    for (const auto& [m, pts] : lines)
    {
        for (const auto& [x, y] : pts)
        {
            if (!any)
            {
                x0 = x1 = x;
                y0 = y1 = y;
                any     = true;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    x0 = std::floor(x0);
    x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0);
    y1 = std::max(std::ceil(y1), y0 + 1);
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double gx = x0; gx <= x1 + 1e-9; gx += 1.0)
    {
        os << "<line x1=\"" << sx(gx) << "\" y1=\"" << top << "\" x2=\"" << sx(gx) << "\" y2=\""
           << top + ph << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << sx(gx) << "\" y=\"" << top + ph + 18
           << "\" text-anchor=\"middle\">1e" << static_cast<int>(gx) << "</text>\n";
    }
    for (double gy = y0; gy <= y1 + 1e-9; gy += 1.0)
    {
        os << "<line x1=\"" << left << "\" y1=\"" << sy(gy) << "\" x2=\"" << left + pw << "\" y2=\""
           << sy(gy) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << sy(gy) + 4 << "\" text-anchor=\"end\">1e"
           << static_cast<int>(gy) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\">N</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << top + ph / 2 << ")\">" << metric << "</text>\n";
    for (std::size_t i = 0; i < methods.size(); ++i)
    {
        const char* color = colors[i % 6];
        auto pts          = lines[methods[i]];
        std::sort(pts.begin(), pts.end());
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : pts)
        {
            os << sx(x) << ',' << sy(y) << ' ';
        }
        os << "\"/>\n";
        for (const auto& [x, y] : pts)
        {
            os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << color
               << "\"/>\n";
        }
        const double ly = top + 16 + 18 * static_cast<double>(i);
        os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << methods[i]
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace glrr
