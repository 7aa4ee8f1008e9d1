#pragma once

#include <string>

#include "censee/model.hpp"

namespace censee {

// UTF-8, comma-separated, header row with a "y" column; remaining columns
// become X in header order. An optional leading "# censor_level=<v>" line
// carries the censoring level (default 0).
Dataset parse_csv(const std::string& path);

// Round-trip writer (shortest decimal that parses back to the same double).
void write_csv(const Dataset& d, const std::string& path);

// Shortest round-trip formatting for one double.
std::string format_double(double v);

}  // namespace censee
