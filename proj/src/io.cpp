#include "seloqr/io.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace seloqr {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_cell(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_fields(line));
    }
    if (rows.empty()) throw data_error("'" + path + "' has no data rows");

    // header detection: any first-row cell that is not a number
    bool header = false;
    for (const std::string& cell : rows.front()) {
        double v;
        if (!parse_cell(cell, v)) {
            header = true;
            break;
        }
    }

    std::size_t y_col = 0;
    std::size_t first_data = 0;
    if (header) {
        bool found = false;
        for (std::size_t c = 0; c < rows.front().size(); ++c)
            if (rows.front()[c] == "y") {
                y_col = c;
                found = true;
                break;
            }
        if (!found) throw data_error("'" + path + "' has a header row without a column 'y'");
        first_data = 1;
        if (rows.size() < 2) throw data_error("'" + path + "' has no data rows");
    }

    const std::size_t width = rows[first_data].size();
    if (width < 2)
        throw data_error("'" + path + "' needs a response plus at least one predictor column");
    const std::size_t n = rows.size() - first_data;
    if (n < 2) throw data_error("'" + path + "' needs at least two data rows");
    const std::size_t d = width - 1;

    Vector y(static_cast<Index>(n));
    Matrix X(static_cast<Index>(n), static_cast<Index>(d));
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const std::size_t file_row = r + 1;
        if (rows[r].size() != width)
            throw data_error("row " + std::to_string(file_row) + " has " +
                             std::to_string(rows[r].size()) + " cells, expected " +
                             std::to_string(width));
        std::size_t xc = 0;
        for (std::size_t c = 0; c < width; ++c) {
            double v;
            if (!parse_cell(rows[r][c], v))
                throw data_error("unparseable value at row " + std::to_string(file_row) +
                                 ", column " + std::to_string(c + 1));
            if (!std::isfinite(v))
                throw data_error("non-finite value at row " + std::to_string(file_row) +
                                 ", column " + std::to_string(c + 1));
            if (c == y_col)
                y[static_cast<Index>(r - first_data)] = v;
            else
                X(static_cast<Index>(r - first_data), static_cast<Index>(xc++)) = v;
        }
    }
    return Dataset(std::move(y), std::move(X));
}

void write_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "y";
    for (Index j = 0; j < ds.d(); ++j) out << ",x" << (j + 1);
    out << "\n";
    for (Index i = 0; i < ds.n(); ++i) {
        out << format_double(ds.y()[i]);
        for (Index j = 0; j < ds.d(); ++j) out << "," << format_double(ds.X()(i, j));
        out << "\n";
    }
    if (!out) throw data_error("write to '" + path + "' failed");
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    assert(res.ec == std::errc());
    return std::string(buf, res.ptr);
}

}  // namespace seloqr
