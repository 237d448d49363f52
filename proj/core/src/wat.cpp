// SPDX-License-Identifier: Apache-2.0
#include "atsss/wat.hpp"

#include "atsss/error.hpp"

namespace atsss {

std::optional<Wat> parse_wat(std::string_view s) noexcept {
  if (s == "5G" || s == "FiveG" || s == "NR") return Wat::FiveG;
  if (s == "WiFi" || s == "Wi-Fi") return Wat::WiFi;
  if (s == "LiFi") return Wat::LiFi;
  return std::nullopt;
}

namespace {
std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error("invalid configuration: " + join(violations)), violations_(std::move(violations)) {}

ConfigError::ConfigError(const std::string& field, const std::string& message)
    : ConfigError(std::vector<std::string>{field + ": " + message}) {}

}  // namespace atsss
