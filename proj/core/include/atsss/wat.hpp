// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace atsss {

/// Wireless access technology. Every per-WAT container is total over these.
enum class Wat : std::uint8_t { FiveG = 0, WiFi = 1, LiFi = 2 };

inline constexpr std::size_t kWatCount = 3;
inline constexpr std::array<Wat, kWatCount> kAllWats{Wat::FiveG, Wat::WiFi, Wat::LiFi};

constexpr std::size_t index(Wat w) noexcept { return static_cast<std::size_t>(w); }

constexpr std::string_view to_string(Wat w) noexcept {
  switch (w) {
    case Wat::FiveG: return "5G";
    case Wat::WiFi: return "WiFi";
    case Wat::LiFi: return "LiFi";
  }
  return "?";
}

/// Accepts "5G", "WiFi", "Wi-Fi", "LiFi" (case-sensitive).
std::optional<Wat> parse_wat(std::string_view s) noexcept;

/// Fixed-size map keyed by Wat.
template <typename T>
struct PerWat {
  std::array<T, kWatCount> values{};

  constexpr T& operator[](Wat w) noexcept { return values[index(w)]; }
  constexpr const T& operator[](Wat w) const noexcept { return values[index(w)]; }

  static constexpr PerWat filled(const T& v) {
    PerWat p;
    p.values.fill(v);
    return p;
  }

  auto begin() noexcept { return values.begin(); }
  auto end() noexcept { return values.end(); }
  auto begin() const noexcept { return values.begin(); }
  auto end() const noexcept { return values.end(); }

  friend bool operator==(const PerWat&, const PerWat&) = default;
};

}  // namespace atsss
