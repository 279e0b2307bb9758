#include "logonet/csv.hpp"

#include <cstdio>
#include <fstream>

#include "logonet/errors.hpp"

namespace logonet::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::vector<std::vector<std::string>> read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_line(line));
    }
    return rows;
}

double parse_double(const std::string& cell, const std::string& context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw parse_error("bad numeric value '" + cell + "' in " + context);
    }
}

long parse_long(const std::string& cell, const std::string& context) {
    try {
        std::size_t pos = 0;
        long v = std::stol(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw parse_error("bad integer value '" + cell + "' in " + context);
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

}  // namespace logonet::csv
