#ifndef GLRR_IO_HPP
#define GLRR_IO_HPP

#include <string>
#include <string_view>

#include "glrr/core.hpp"
#include "glrr/optimizer.hpp"

namespace glrr::io
{

/// One value per line with an optional "value" header line. Throws io_format.
Vector parse_values_csv(std::string_view text);
std::string values_to_csv(const Vector& values);

Vector read_values_csv(const std::string& path);
void write_values_csv(const std::string& path, const Vector& values);

Signal read_signal_csv(const std::string& path);
void write_signal_csv(const std::string& path, const Signal& series);

/// JSON text of a solver report; iterations in order.
std::string report_to_json(const VpgnReport& report, int indent = 2);

void write_text(const std::string& path, std::string_view text);

} // namespace glrr::io

#endif
