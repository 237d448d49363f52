// SPDX-License-Identifier: Apache-2.0
//
// Utility-based traffic steering. Each WAT's telemetry is scored with a
// logarithmic per-parameter utility, gated by operator thresholds, and turned
// into either load-balancing percentages or a duplication set.
//
// Everything here is pure and thread-safe.
#pragma once

#include <atsss/wat.hpp>

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace atsss::steering {

inline constexpr double kDefaultDelayCapMs = 100.0;
/// Suggested stand-in for "ignore this parameter"; a weight of exactly zero is invalid.
inline constexpr double kIgnoreWeight = 1e-6;

struct TelemetrySample {
  Wat wat = Wat::FiveG;
  int cell_id = 0;  ///< 0 means no serving cell (no coverage).
  double rsrp_dbm = 0.0;
  double sinr_db = 0.0;
  double buffer_pct = 0.0;
  double delay_ms = 0.0;
  double timestamp_s = 0.0;

  bool covered() const noexcept { return cell_id > 0; }

  friend bool operator==(const TelemetrySample&, const TelemetrySample&) = default;
};

struct ParamWeights {
  double sinr = 1.0;
  double buffer = 1.0;
  double delay = 1.0;

  friend bool operator==(const ParamWeights&, const ParamWeights&) = default;
};

/// SINR is a lower bound; buffer and delay are upper bounds. All strict.
struct ParamThresholds {
  double sinr_db = 0.0;
  double buffer_pct = 100.0;
  double delay_ms = kDefaultDelayCapMs;

  friend bool operator==(const ParamThresholds&, const ParamThresholds&) = default;
};

struct NormalizationMaxima {
  double sinr_db = 40.0;
  double buffer_pct = 100.0;
  double delay_ms = kDefaultDelayCapMs;

  friend bool operator==(const NormalizationMaxima&, const NormalizationMaxima&) = default;
};

enum class SteeringMode { LoadBalancing, SplitDuplicate };

std::string_view to_string(SteeringMode m) noexcept;

/// Which quantity a normalized threshold gates.
enum class ThresholdGate {
  Parameters,  ///< per-parameter raw thresholds, the default
  Composite,   ///< the composite utility must exceed the threshold
};

struct SteeringPolicy {
  SteeringMode mode = SteeringMode::LoadBalancing;
  ParamWeights weights;
  PerWat<ParamThresholds> thresholds;
  PerWat<NormalizationMaxima> maxima;
  /// When set, a WAT is also ineligible unless its composite utility exceeds it.
  std::optional<double> composite_threshold;

  friend bool operator==(const SteeringPolicy&, const SteeringPolicy&) = default;
};

/// Raw thresholds from a normalized level q: t_sinr = q * x_max_sinr (lower
/// bound), t_buffer = q * x_max_buffer and t_delay = q * x_max_delay (upper bounds).
ParamThresholds expand_normalized_threshold(double q, const NormalizationMaxima& maxima);

/// Policy with the same maxima, a normalized threshold and gate applied to every WAT.
SteeringPolicy make_policy(SteeringMode mode, ParamWeights weights, double normalized_threshold,
                           NormalizationMaxima maxima = {},
                           ThresholdGate gate = ThresholdGate::Parameters);

/// Throws InvalidArgument naming the first violated invariant.
void validate(const SteeringPolicy& policy);
/// Every violation, each prefixed with `prefix`.
std::vector<std::string> policy_violations(const SteeringPolicy& policy, std::string_view prefix);

struct UtilityBreakdown {
  double u_sinr = 0.0;
  double u_buffer = 0.0;
  double u_delay = 0.0;
  double overall = 0.0;
  bool eligible = false;

  friend bool operator==(const UtilityBreakdown&, const UtilityBreakdown&) = default;
};

struct SteeringDecision {
  int user_id = 0;
  SteeringMode mode = SteeringMode::LoadBalancing;
  /// Percentages; meaningful in LoadBalancing mode, all zero otherwise.
  PerWat<double> lb_weights;
  /// Meaningful in SplitDuplicate mode, all false otherwise.
  PerWat<bool> sd_selection;
  PerWat<UtilityBreakdown> breakdowns;
  /// No WAT usable: LB with no positive utility, or SD with nothing selected.
  bool degenerate = false;

  friend bool operator==(const SteeringDecision&, const SteeringDecision&) = default;
};

/// log(1 + w x) / log(1 + w x_max), clamped to 0 for x <= 0 and 1 for x >= x_max.
double param_utility(double x, double w, double x_max);

struct NormalizedInputs {
  double sinr = 0.0;
  double buffer = 0.0;
  double delay = 0.0;
};

NormalizedInputs normalize_sample(const TelemetrySample& s, const NormalizationMaxima& maxima);

bool eligibility(const TelemetrySample& s, const ParamThresholds& th) noexcept;

UtilityBreakdown utility_breakdown(const TelemetrySample& s, const SteeringPolicy& policy);

struct LbWeights {
  PerWat<double> weights;
  bool degenerate = false;
};

/// Clamps each composite utility at zero and normalizes to percentages.
LbWeights decide_lb(const PerWat<UtilityBreakdown>& breakdowns) noexcept;

PerWat<bool> decide_sd(const PerWat<UtilityBreakdown>& breakdowns) noexcept;

SteeringDecision decide_user(const PerWat<TelemetrySample>& samples, const SteeringPolicy& policy,
                             int user_id);

/// Decides every active user independently. Throws InvalidArgument naming the
/// first active user with no telemetry or no policy.
std::vector<SteeringDecision> decide_all(std::span<const int> active_users,
                                         const std::map<int, PerWat<TelemetrySample>>& telemetry,
                                         const std::map<int, SteeringPolicy>& policy_per_user);

/// Integer percentages summing to exactly 100 (largest remainder), or all zero
/// when the input sums to zero.
PerWat<int> round_weights(const PerWat<double>& weights);

}  // namespace atsss::steering
