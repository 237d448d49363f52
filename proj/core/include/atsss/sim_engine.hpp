// SPDX-License-Identifier: Apache-2.0
//
// Epoch-driven simulation of the factory: AGV motion, request arrivals,
// association, telemetry, steering decisions and queue service. A run is a
// pure function of its configuration (seed included).
#pragma once

#include <atsss/network_state.hpp>
#include <atsss/radio.hpp>
#include <atsss/steering.hpp>
#include <atsss/traffic.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace atsss::sim {

inline constexpr int kAgvUserId = 0;

struct WatNetworkParams {
  std::int64_t capacity_bytes = net::kDefaultCapacityBytes;
  double efficiency = net::kDefaultEfficiency;
  double max_rate_bps = 2e9;

  friend bool operator==(const WatNetworkParams&, const WatNetworkParams&) = default;
};

struct SimConfig {
  std::string name = "custom";
  radio::ScenarioLayout layout;
  traffic::LibraryConfig library;
  double lambda_per_s = 2.0;
  /// Replayed instead of generated when set.
  std::optional<traffic::RequestStream> requests;

  std::map<traffic::TrafficType, steering::SteeringPolicy> policies;
  traffic::TrafficType agv_traffic = traffic::TrafficType::eMBB;
  std::map<traffic::TrafficType, double> agv_rate_bps{{traffic::TrafficType::eMBB, 50e6},
                                                      {traffic::TrafficType::URLLC, 5e6}};
  bool include_agv = true;
  /// Per-user source rate for background file downloads.
  double source_rate_bps = 1e9;

  double dt_s = 0.1;
  double decision_epoch_s = 1.0;
  double duration_s = 600.0;
  std::uint64_t seed = 42;
  double delay_cap_ms = steering::kDefaultDelayCapMs;
  /// Telemetry is rounded to this step (must be 1/k for integer k).
  double telemetry_resolution = 0.01;
  std::int64_t probe_bytes = 12'000;
  PerWat<WatNetworkParams> network;
  double shadowing_sigma_db = 0.0;
  double hysteresis_db = 0.0;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Every violated invariant, not just the first.
std::vector<std::string> config_violations(const SimConfig& cfg);

/// Default factory configuration with the given AGV traffic type and policies
/// for both traffic types (LB weights 1/0.7/0.2 with normalized threshold 0.6,
/// SD weights 0.5/0.2/1). The layout is left empty.
SimConfig default_config();

struct UserEpoch {
  int user_id = 0;
  traffic::TrafficType traffic_type = traffic::TrafficType::eMBB;
  PerWat<steering::TelemetrySample> telemetry;
  steering::SteeringDecision decision;
  std::int64_t delivered_bytes = 0;  ///< cumulative unique bytes delivered
  std::int64_t backlog_bytes = 0;    ///< not yet dispatched into any queue
};

struct EpochRecord {
  double timestamp_s = 0.0;
  radio::Vec3 agv_position;
  std::vector<UserEpoch> users;  ///< AGV first, then static users by id
  std::vector<double> node_buffer_pct;  ///< aligned with the layout's node list
  net::Totals totals;
};

struct RunSummary {
  net::Totals totals;
  std::int64_t epochs = 0;
  std::int64_t requests = 0;
  std::int64_t completed_flows = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct SimTrace {
  std::vector<EpochRecord> epochs;
  std::vector<net::FlowCompletion> flows;
  RunSummary summary;
};

/// Runs the simulation. Throws ConfigError before stepping if cfg is invalid,
/// SimulationError (with the epoch time) if an invariant breaks mid-run.
SimTrace run(const SimConfig& cfg);

/// Policy each user's decisions are taken with.
/// Content library a run draws its background requests from.
traffic::ContentLibrary library_for(const SimConfig& cfg);

const steering::SteeringPolicy& policy_for(const SimConfig& cfg, traffic::TrafficType type);
traffic::TrafficType traffic_type_of(const SimConfig& cfg, int user_id);

// --- sweeps ---------------------------------------------------------------

struct SweepPoint {
  std::optional<double> normalized_threshold;
  std::optional<steering::ParamWeights> weights;

  std::string label() const;
};

struct SweepGrid {
  std::vector<double> normalized_thresholds;
  std::vector<steering::ParamWeights> weight_sets;
  /// Policy the grid edits; defaults to the AGV's traffic type.
  std::optional<traffic::TrafficType> target;

  /// Cartesian product; a missing axis contributes no variation. Empty when both are.
  std::vector<SweepPoint> points() const;
};

struct SweepResult {
  std::size_t index = 0;
  SweepPoint point;
  SimConfig config;
  std::optional<SimTrace> trace;
  std::string error;  ///< set when the run failed
};

/// Base config with the point applied and the seed derived from the base seed and index.
SimConfig sweep_point_config(const SimConfig& base, const SweepGrid& grid, const SweepPoint& point, std::size_t index);

/// Applies a normalized threshold to a policy, honouring its gate kind.
void apply_normalized_threshold(steering::SteeringPolicy& policy, double q);

/// One independent run per grid point, in grid order. Failures are captured
/// per point. `threads` > 1 runs points concurrently. `on_done` (optional) is
/// invoked from worker threads as each point finishes; calls are serialized.
std::vector<SweepResult> sweep(const SimConfig& base, const SweepGrid& grid, unsigned threads = 1,
                               const std::function<void(const SweepResult&)>& on_done = {});

}  // namespace atsss::sim
