#pragma once
// Small file/number helpers shared by the CSV and JSON surfaces.

#include <string>

namespace bdb {

// Shortest round-trip decimal form; "nan" / "inf" / "-inf" for non-finite.
std::string format_double(double v);

// Writes via a temporary file in the same directory, then renames into place.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace bdb
