#pragma once

#include <string>
#include <vector>

namespace numline {

/// Writes via a temp file + rename so an existing file is never left
/// partially overwritten.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);  // throws std::runtime_error

std::vector<std::string> read_lines(const std::string& path);

/// Shortest round-trip decimal rendering of a double (to_chars).
std::string format_double(double v);

/// First whitespace/tab-separated field of each nonempty line, parsed as a
/// double. Lines that do not start with a number raise std::runtime_error.
std::vector<double> read_number_column(const std::string& path);

}  // namespace numline
