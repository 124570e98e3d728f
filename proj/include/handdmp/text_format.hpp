#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace handdmp {

/// Shortest text that round-trips the double exactly (17 significant digits).
std::string format_double(double v);

std::string trim_cr(std::string s);

/// Splits a comma-separated row of numbers; throws ParseError tagged with `line`.
std::vector<double> split_numbers(const std::string& row, std::size_t line);

/// Parses "x,y,z" (as given to --start / --goal).
std::vector<double> parse_vector(const std::string& text);

}  // namespace handdmp
