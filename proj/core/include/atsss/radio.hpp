// SPDX-License-Identifier: Apache-2.0
//
// Geometry-driven link budget: log-distance pathloss for 5G and Wi-Fi, a
// line-of-sight Lambertian optical channel for LiFi, co-channel SINR, strongest
// cell association and AGV motion along a waypoint route.
#pragma once

#include <atsss/wat.hpp>

#include <optional>
#include <span>
#include <vector>

namespace atsss::radio {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(const Vec3& a, const Vec3& b) noexcept;

enum class PathlossKind { LogDistance, Lambertian };

/// Channel model parameters. Which fields matter depends on `kind`.
struct ChannelModel {
  PathlossKind kind = PathlossKind::LogDistance;
  // Log-distance: PL = pl0_db + 10 n log10(d / d0).
  double pl0_db = 40.0;
  double exponent = 2.0;
  double d0_m = 1.0;
  // Lambertian LOS, source pointing straight down, receiver pointing up.
  double semi_angle_deg = 60.0;
  double fov_deg = 60.0;
  double detector_area_m2 = 1e-4;
  double filter_gain = 1.0;
  double concentrator_gain = 1.0;
  // Receiver side.
  double noise_figure_db = 7.0;
  /// Reported RSRP/RSS = total received power minus this offset (per-resource-element scaling).
  double rs_offset_db = 0.0;

  friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

struct AccessNode {
  int node_id = 1;  ///< unique within its WAT, 1-based
  Wat wat = Wat::FiveG;
  Vec3 position_m;
  double tx_power_dbm = 0.0;
  double carrier_hz = 3.5e9;
  double bandwidth_hz = 20e6;
  int channel = 0;  ///< nodes of one WAT on the same channel interfere
  ChannelModel model;

  friend bool operator==(const AccessNode&, const AccessNode&) = default;
};

struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(const Vec3& p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class PathEnd { Stop, Loop };

struct AgvRoute {
  std::vector<Vec3> waypoints;
  double speed_mps = 0.7;
  PathEnd end = PathEnd::Stop;

  friend bool operator==(const AgvRoute&, const AgvRoute&) = default;
};

struct StaticUser {
  int user_id = 1;
  Vec3 position_m;

  friend bool operator==(const StaticUser&, const StaticUser&) = default;
};

struct ScenarioLayout {
  Rect bounds_m;
  std::vector<AccessNode> nodes;
  std::vector<StaticUser> static_users;
  AgvRoute agv;

  friend bool operator==(const ScenarioLayout&, const ScenarioLayout&) = default;
};

struct LinkMeasurement {
  int node_id = 0;
  double rsrp_dbm = 0.0;
  double sinr_db = 0.0;

  friend bool operator==(const LinkMeasurement&, const LinkMeasurement&) = default;
};

/// Loss in dB; +infinity when the receiver is outside a LiFi field of view.
/// Throws InvalidArgument at zero distance.
double pathloss_db(const AccessNode& tx, const Vec3& rx_position);

/// Lambertian LOS DC gain (linear), 0 outside the field of view.
double lambertian_gain(const ChannelModel& m, const Vec3& tx, const Vec3& rx);

/// Total received power in dBm, -infinity without line of sight.
double rx_power_dbm(const AccessNode& tx, const Vec3& rx_position);

/// Thermal noise over the node's bandwidth: -174 dBm/Hz + 10 log10(B) + NF.
double noise_dbm(const AccessNode& node) noexcept;

/// Nodes of the same WAT and channel as `serving`, excluding it.
bool interferes(const AccessNode& serving, const AccessNode& other) noexcept;

/// Serving power over co-channel interference plus thermal noise, in dB.
double sinr_db(const Vec3& user_pos, const AccessNode& serving, std::span<const AccessNode> all_nodes);

/// Same, with received powers supplied per node (aligned with all_nodes); lets
/// callers apply shadowing.
double sinr_db(std::span<const double> rx_dbm, std::size_t serving_index,
               std::span<const AccessNode> all_nodes);

struct AssociationOptions {
  double hysteresis_db = 0.0;
  std::optional<int> current_node_id;  ///< kept unless another node is better by more than the margin
};

/// Strongest reported power among nodes of `wat`; ties go to the lowest node_id.
/// std::nullopt means no coverage. Throws InvalidArgument if the WAT has no nodes.
std::optional<LinkMeasurement> associate(const Vec3& user_pos, Wat wat, std::span<const AccessNode> nodes,
                                         const AssociationOptions& opts = {});

/// Variant with precomputed received powers aligned with `nodes`.
std::optional<LinkMeasurement> associate(std::span<const double> rx_dbm, Wat wat,
                                         std::span<const AccessNode> nodes,
                                         const AssociationOptions& opts = {});

double route_length(const AgvRoute& route) noexcept;

/// Arc-length position at distance speed * t along the route. With PathEnd::Loop
/// the route closes from the last waypoint back to the first.
Vec3 agv_position(double t_s, const AgvRoute& route);

/// Every problem with the layout (bounds, ids, bandwidths, route, coverage).
std::vector<std::string> layout_violations(const ScenarioLayout& layout);

}  // namespace atsss::radio
