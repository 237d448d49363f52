// SPDX-License-Identifier: Apache-2.0
#include "atsss/steering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "atsss/error.hpp"

namespace atsss::steering {

std::string_view to_string(SteeringMode m) noexcept {
  return m == SteeringMode::LoadBalancing ? "LB" : "SD";
}

ParamThresholds expand_normalized_threshold(double q, const NormalizationMaxima& maxima) {
  return ParamThresholds{q * maxima.sinr_db, q * maxima.buffer_pct, q * maxima.delay_ms};
}

SteeringPolicy make_policy(SteeringMode mode, ParamWeights weights, double normalized_threshold,
                           NormalizationMaxima maxima, ThresholdGate gate) {
  SteeringPolicy p;
  p.mode = mode;
  p.weights = weights;
  p.maxima = PerWat<NormalizationMaxima>::filled(maxima);
  if (gate == ThresholdGate::Parameters) {
    p.thresholds = PerWat<ParamThresholds>::filled(expand_normalized_threshold(normalized_threshold, maxima));
  } else {
    constexpr double inf = std::numeric_limits<double>::infinity();
    p.thresholds = PerWat<ParamThresholds>::filled(ParamThresholds{-inf, inf, inf});
    p.composite_threshold = normalized_threshold;
  }
  return p;
}

std::vector<std::string> policy_violations(const SteeringPolicy& policy, std::string_view prefix) {
  std::vector<std::string> out;
  auto bad = [&](std::string_view field, std::string_view what) {
    out.push_back(fmt::format("{}{}: {}", prefix, field, what));
  };
  auto check_weight = [&](std::string_view field, double w) {
    if (!std::isfinite(w)) bad(field, "weight must be finite");
    else if (w < 0.0) bad(field, fmt::format("weight must be non-negative (got {})", w));
    else if (w == 0.0)
      bad(field, fmt::format("weight must be non-zero; use a small value such as {} to ignore the parameter",
                             kIgnoreWeight));
  };
  check_weight("weights.sinr", policy.weights.sinr);
  check_weight("weights.buffer", policy.weights.buffer);
  check_weight("weights.delay", policy.weights.delay);

  for (Wat w : kAllWats) {
    const auto& th = policy.thresholds[w];
    const auto& mx = policy.maxima[w];
    const std::string wat{to_string(w)};
    if (std::isnan(th.sinr_db)) bad("thresholds." + wat + ".sinr_db", "must be a number");
    if (std::isnan(th.buffer_pct) || th.buffer_pct < 0.0)
      bad("thresholds." + wat + ".buffer_pct", fmt::format("must be >= 0 (got {})", th.buffer_pct));
    if (std::isnan(th.delay_ms) || th.delay_ms <= 0.0)
      bad("thresholds." + wat + ".delay_ms", fmt::format("must be > 0 (got {})", th.delay_ms));
    auto check_max = [&](std::string_view field, double v) {
      if (!std::isfinite(v) || v <= 0.0)
        bad(fmt::format("maxima.{}.{}", wat, field), fmt::format("must be finite and > 0 (got {})", v));
    };
    check_max("sinr_db", mx.sinr_db);
    check_max("buffer_pct", mx.buffer_pct);
    check_max("delay_ms", mx.delay_ms);
  }
  if (policy.composite_threshold && std::isnan(*policy.composite_threshold))
    bad("composite_threshold", "must be a number");
  return out;
}

void validate(const SteeringPolicy& policy) {
  auto v = policy_violations(policy, "");
  if (!v.empty()) throw InvalidArgument("invalid steering policy: " + v.front());
}

double param_utility(double x, double w, double x_max) {
  if (!std::isfinite(x)) throw InvalidArgument(fmt::format("utility input must be finite (got {})", x));
  if (!std::isfinite(w) || w < 0.0) throw InvalidArgument(fmt::format("utility weight must be finite and >= 0 (got {})", w));
  if (w == 0.0) throw InvalidArgument("utility weight of zero makes the utility undefined");
  if (!std::isfinite(x_max) || x_max <= 0.0)
    throw InvalidArgument(fmt::format("utility maximum must be finite and > 0 (got {})", x_max));
  if (x <= 0.0) return 0.0;
  if (x >= x_max) return 1.0;
  return std::log1p(w * x) / std::log1p(w * x_max);
}

NormalizedInputs normalize_sample(const TelemetrySample& s, const NormalizationMaxima& maxima) {
  return NormalizedInputs{s.sinr_db, s.buffer_pct, std::min(s.delay_ms, maxima.delay_ms)};
}

bool eligibility(const TelemetrySample& s, const ParamThresholds& th) noexcept {
  return s.sinr_db > th.sinr_db && s.buffer_pct < th.buffer_pct && s.delay_ms < th.delay_ms;
}

UtilityBreakdown utility_breakdown(const TelemetrySample& s, const SteeringPolicy& policy) {
  if (!eligibility(s, policy.thresholds[s.wat])) return {};
  const auto& mx = policy.maxima[s.wat];
  const auto x = normalize_sample(s, mx);
  UtilityBreakdown b;
  b.u_sinr = param_utility(x.sinr, policy.weights.sinr, mx.sinr_db);
  b.u_buffer = param_utility(x.buffer, policy.weights.buffer, mx.buffer_pct);
  b.u_delay = param_utility(x.delay, policy.weights.delay, mx.delay_ms);
  b.overall = b.u_sinr - b.u_buffer - b.u_delay;
  b.eligible = true;
  if (policy.composite_threshold && !(b.overall > *policy.composite_threshold)) return {};
  return b;
}

LbWeights decide_lb(const PerWat<UtilityBreakdown>& breakdowns) noexcept {
  PerWat<double> clamped;
  double total = 0.0;
  for (Wat w : kAllWats) {
    clamped[w] = std::max(0.0, breakdowns[w].overall);
    total += clamped[w];
  }
  LbWeights out;
  if (!(total > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (Wat w : kAllWats) out.weights[w] = clamped[w] / total * 100.0;
  return out;
}

PerWat<bool> decide_sd(const PerWat<UtilityBreakdown>& breakdowns) noexcept {
  PerWat<bool> sel;
  for (Wat w : kAllWats) sel[w] = breakdowns[w].overall > 0.0;
  return sel;
}

SteeringDecision decide_user(const PerWat<TelemetrySample>& samples, const SteeringPolicy& policy,
                             int user_id) {
  SteeringDecision d;
  d.user_id = user_id;
  d.mode = policy.mode;
  for (Wat w : kAllWats) {
    if (samples[w].wat != w)
      throw InvalidArgument(fmt::format("user {}: sample in the {} slot is tagged {}", user_id,
                                        to_string(w), to_string(samples[w].wat)));
    d.breakdowns[w] = utility_breakdown(samples[w], policy);
  }
  if (policy.mode == SteeringMode::LoadBalancing) {
    auto lb = decide_lb(d.breakdowns);
    d.lb_weights = lb.weights;
    d.degenerate = lb.degenerate;
  } else {
    d.sd_selection = decide_sd(d.breakdowns);
    d.degenerate = std::none_of(d.sd_selection.begin(), d.sd_selection.end(), [](bool b) { return b; });
  }
  return d;
}

std::vector<SteeringDecision> decide_all(std::span<const int> active_users,
                                         const std::map<int, PerWat<TelemetrySample>>& telemetry,
                                         const std::map<int, SteeringPolicy>& policy_per_user) {
  std::vector<SteeringDecision> out;
  out.reserve(active_users.size());
  for (int user : active_users) {
    auto t = telemetry.find(user);
    if (t == telemetry.end()) throw InvalidArgument(fmt::format("missing telemetry for active user {}", user));
    auto p = policy_per_user.find(user);
    if (p == policy_per_user.end()) throw InvalidArgument(fmt::format("missing policy for active user {}", user));
    out.push_back(decide_user(t->second, p->second, user));
  }
  return out;
}

PerWat<int> round_weights(const PerWat<double>& weights) {
  PerWat<int> out;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return out;
  PerWat<double> rem;
  int assigned = 0;
  for (Wat w : kAllWats) {
    const double scaled = weights[w] / total * 100.0;
    out[w] = static_cast<int>(std::floor(scaled));
    rem[w] = scaled - out[w];
    assigned += out[w];
  }
  // Hand out the missing points by largest remainder, ties to the lower WAT index.
  std::array<Wat, kWatCount> order = kAllWats;
  std::stable_sort(order.begin(), order.end(), [&](Wat a, Wat b) { return rem[a] > rem[b]; });
  for (int i = 0; assigned < 100; ++i, ++assigned) ++out[order[static_cast<std::size_t>(i) % kWatCount]];
  return out;
}

}  // namespace atsss::steering
