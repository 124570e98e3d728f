#include "handdmp/text_format.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "handdmp/error.hpp"

namespace handdmp {

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

std::vector<double> split_numbers(const std::string& row, std::size_t line) {
    std::vector<double> out;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const char* first = cell.data();
        const char* last = cell.data() + cell.size();
        while (first < last && *first == ' ') ++first;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            throw ParseError(line, "not a number: '" + cell + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_vector(const std::string& text) {
    try {
        return split_numbers(text, 0);
    } catch (const ParseError&) {
        throw InvalidInput("expected comma-separated numbers, got '" + text + "'");
    }
}

}  // namespace handdmp
