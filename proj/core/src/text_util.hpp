// SPDX-License-Identifier: Apache-2.0
// Internal CSV/number helpers shared by the writers and readers.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace atsss::detail {

/// %.6g, with "inf"/"-inf"/"nan" spelled the same on every platform.
std::string format_g6(double v);
/// Shortest round-trip representation (%.17g).
std::string format_exact(double v);

double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

std::vector<std::string> split_csv(std::string_view line);
std::string trim_cr(std::string s);

}  // namespace atsss::detail
