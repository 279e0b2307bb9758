#pragma once

#include <string>
#include <vector>

namespace logonet::csv {

// minimal comma-separated handling; none of the formats here quote cells
std::vector<std::string> split_line(const std::string& line);
std::vector<std::vector<std::string>> read_file(const std::string& path);

double parse_double(const std::string& cell, const std::string& context);
long parse_long(const std::string& cell, const std::string& context);

// shortest exact round-trip formatting is not needed; fixed %.17g keeps
// rewrites byte-identical
std::string format_double(double v);

bool is_missing(const std::string& cell);

}  // namespace logonet::csv
