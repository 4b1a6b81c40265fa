#pragma once

#include <string>
#include <vector>

namespace rex::io {

/// Whole-file read. Throws rex::Error when the file cannot be opened.
std::string read_file(const std::string& path);

/// Write via temp file + rename so partially written outputs are never
/// visible.
void atomic_write(const std::string& path, const std::string& content);

/// Splits on '\n', dropping a trailing empty line.
std::vector<std::string> split_lines(const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace rex::io
