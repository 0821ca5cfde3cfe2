#include "glrr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace glrr::io
{

namespace
{

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b  = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
    {
        return {};
    }
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

nlohmann::json number(double v)
{
    // JSON has no inf/nan; encode them as null
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json vector_json(const Vector& v)
{
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i)
    {
        out.push_back(number(v[i]));
    }
    return out;
}

} // namespace

Vector parse_values_csv(std::string_view text)
{
    std::vector<double> values;
    std::size_t line_no = 0;
    bool first          = true;
    std::size_t start   = 0;
    while (start <= text.size())
    {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        const std::string_view line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty())
        {
            first = false;
            continue;
        }
        if (first && line == "value")
        {
            first = false;
            continue;
        }
        first = false;
        const std::string s(line);
        char* stop     = nullptr;
        const double v = std::strtod(s.c_str(), &stop);
        if (stop != s.c_str() + s.size() || !std::isfinite(v))
        {
            throw Error(ErrorCode::io_format,
                        "line " + std::to_string(line_no) + ": '" + s + "' is not a finite number");
        }
        values.push_back(v);
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::string values_to_csv(const Vector& values)
{
    std::string out = "value\n";
    char buf[64];
    for (Index i = 0; i < values.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%.17g\n", values[i]);
        out += buf;
    }
    return out;
}

Vector read_values_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw Error(ErrorCode::io_format, "cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_values_csv(ss.str());
}

void write_text(const std::string& path, std::string_view text)
{
    std::ofstream out(path);
    if (!out)
    {
        throw Error(ErrorCode::io_format, "cannot write " + path);
    }
    out << text;
}

void write_values_csv(const std::string& path, const Vector& values)
{
    write_text(path, values_to_csv(values));
}

Signal read_signal_csv(const std::string& path)
{
    return Signal(read_values_csv(path));
}

void write_signal_csv(const std::string& path, const Signal& series)
{
    write_values_csv(path, series.values());
}

std::string report_to_json(const VpgnReport& report, int indent)
{
    nlohmann::json j;
    j["estimate"]    = vector_json(report.estimate.values());
    j["final_glrr"]  = vector_json(report.final_glrr.coeffs());
    j["stop_reason"] = to_string(report.stop_reason);
    j["necessary_condition_residual"] = number(report.necessary_condition_residual);
    if (!report.failure.empty())
    {
        j["failure"] = report.failure;
    }
    nlohmann::json its = nlohmann::json::array();
    for (const VpgnIteration& it : report.iterations)
    {
        its.push_back({{"k", it.k},
                       {"tau", it.tau},
                       {"objective", number(it.objective)},
                       {"gamma", number(it.gamma)},
                       {"step_norm", number(it.step_norm)},
                       {"normalized_glrr", vector_json(it.normalized_a)}});
    }
    j["iterations"] = std::move(its);
    return j.dump(indent);
}

} // namespace glrr::io
