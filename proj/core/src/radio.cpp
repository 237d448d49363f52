// SPDX-License-Identifier: Apache-2.0
#include "atsss/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include <fmt/format.h>

#include "atsss/error.hpp"

namespace atsss::radio {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
}  // namespace

double distance(const Vec3& a, const Vec3& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double lambertian_gain(const ChannelModel& m, const Vec3& tx, const Vec3& rx) {
  const double d = distance(tx, rx);
  const double h = tx.z - rx.z;
  if (!(h > 0.0)) return 0.0;
  const double cos_angle = h / d;  // irradiance and incidence angles coincide for facing optics
  const double incidence = std::acos(std::clamp(cos_angle, -1.0, 1.0));
  if (incidence > deg2rad(m.fov_deg)) return 0.0;
  const double order = -std::log(2.0) / std::log(std::cos(deg2rad(m.semi_angle_deg)));
  return (order + 1.0) * m.detector_area_m2 / (2.0 * std::numbers::pi * d * d) *
         std::pow(cos_angle, order) * m.filter_gain * m.concentrator_gain * cos_angle;
}

double pathloss_db(const AccessNode& tx, const Vec3& rx_position) {
  const double d = distance(tx.position_m, rx_position);
  if (!(d > 0.0)) throw InvalidArgument(fmt::format("pathloss: zero distance to {} node {}", to_string(tx.wat), tx.node_id));
  const auto& m = tx.model;
  if (m.kind == PathlossKind::LogDistance) return m.pl0_db + 10.0 * m.exponent * std::log10(d / m.d0_m);
  const double g = lambertian_gain(m, tx.position_m, rx_position);
  return g > 0.0 ? -10.0 * std::log10(g) : kInf;
}

double rx_power_dbm(const AccessNode& tx, const Vec3& rx_position) {
  return tx.tx_power_dbm - pathloss_db(tx, rx_position);
}

double noise_dbm(const AccessNode& node) noexcept {
  return -174.0 + 10.0 * std::log10(node.bandwidth_hz) + node.model.noise_figure_db;
}

bool interferes(const AccessNode& serving, const AccessNode& other) noexcept {
  return other.wat == serving.wat && other.channel == serving.channel && other.node_id != serving.node_id;
}

double sinr_db(std::span<const double> rx_dbm, std::size_t serving_index, std::span<const AccessNode> all_nodes) {
  const auto& serving = all_nodes[serving_index];
  double interference_mw = 0.0;
  for (std::size_t i = 0; i < all_nodes.size(); ++i) {
    if (i == serving_index || !interferes(serving, all_nodes[i])) continue;
    if (std::isfinite(rx_dbm[i])) interference_mw += to_mw(rx_dbm[i]);
  }
  return rx_dbm[serving_index] - 10.0 * std::log10(interference_mw + to_mw(noise_dbm(serving)));
}

double sinr_db(const Vec3& user_pos, const AccessNode& serving, std::span<const AccessNode> all_nodes) {
  std::vector<double> rx(all_nodes.size());
  std::size_t serving_index = all_nodes.size();
  for (std::size_t i = 0; i < all_nodes.size(); ++i) {
    rx[i] = rx_power_dbm(all_nodes[i], user_pos);
    if (all_nodes[i].wat == serving.wat && all_nodes[i].node_id == serving.node_id) serving_index = i;
  }
  if (serving_index == all_nodes.size())
    throw InvalidArgument(fmt::format("sinr: serving {} node {} is not in the node list", to_string(serving.wat), serving.node_id));
  return sinr_db(rx, serving_index, all_nodes);
}

std::optional<LinkMeasurement> associate(std::span<const double> rx_dbm, Wat wat, std::span<const AccessNode> nodes,
                                         const AssociationOptions& opts) {
  std::optional<std::size_t> best;
  std::optional<std::size_t> current;
  bool any = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].wat != wat) continue;
    any = true;
    if (opts.current_node_id && nodes[i].node_id == *opts.current_node_id) current = i;
    if (!std::isfinite(rx_dbm[i])) continue;
    const double rsrp = rx_dbm[i] - nodes[i].model.rs_offset_db;
    if (!best) {
      best = i;
      continue;
    }
    const double best_rsrp = rx_dbm[*best] - nodes[*best].model.rs_offset_db;
    if (rsrp > best_rsrp || (rsrp == best_rsrp && nodes[i].node_id < nodes[*best].node_id)) best = i;
  }
  if (!any) throw InvalidArgument(fmt::format("associate: layout has no {} nodes", to_string(wat)));
  if (!best) return std::nullopt;
  std::size_t chosen = *best;
  if (current && std::isfinite(rx_dbm[*current]) && *current != *best) {
    const double cur = rx_dbm[*current] - nodes[*current].model.rs_offset_db;
    const double top = rx_dbm[*best] - nodes[*best].model.rs_offset_db;
    if (top - cur <= opts.hysteresis_db) chosen = *current;
  }
  return LinkMeasurement{nodes[chosen].node_id, rx_dbm[chosen] - nodes[chosen].model.rs_offset_db,
                         sinr_db(rx_dbm, chosen, nodes)};
}

std::optional<LinkMeasurement> associate(const Vec3& user_pos, Wat wat, std::span<const AccessNode> nodes,
                                         const AssociationOptions& opts) {
  std::vector<double> rx(nodes.size(), -kInf);
  for (std::size_t i = 0; i < nodes.size(); ++i) rx[i] = rx_power_dbm(nodes[i], user_pos);
  return associate(rx, wat, nodes, opts);
}

double route_length(const AgvRoute& route) noexcept {
  double len = 0.0;
  for (std::size_t i = 1; i < route.waypoints.size(); ++i) len += distance(route.waypoints[i - 1], route.waypoints[i]);
  return len;
}

Vec3 agv_position(double t_s, const AgvRoute& route) {
  const auto& wp = route.waypoints;
  if (wp.empty()) throw InvalidArgument("agv_position: route has no waypoints");
  if (!(t_s >= 0.0)) throw InvalidArgument(fmt::format("agv_position: time must be >= 0 (got {})", t_s));
  if (wp.size() == 1) return wp.front();

  std::vector<Vec3> pts = wp;
  if (route.end == PathEnd::Loop && !(pts.back() == pts.front())) pts.push_back(pts.front());
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += distance(pts[i - 1], pts[i]);
  if (!(total > 0.0)) return pts.front();

  double s = route.speed_mps * t_s;
  if (route.end == PathEnd::Loop) s = std::fmod(s, total);
  else if (s >= total) return pts.back();

  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = distance(pts[i - 1], pts[i]);
    if (s <= seg && seg > 0.0) {
      const double f = s / seg;
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      return Vec3{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.z + f * (b.z - a.z)};
    }
    s -= seg;
  }
  return pts.back();
}

std::vector<std::string> layout_violations(const ScenarioLayout& layout) {
  std::vector<std::string> out;
  const auto& b = layout.bounds_m;
  if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) out.push_back("layout.bounds_m: empty rectangle");

  std::set<std::pair<Wat, int>> ids;
  PerWat<int> per_wat{};
  for (const auto& n : layout.nodes) {
    const auto tag = fmt::format("layout.nodes[{} {}]", to_string(n.wat), n.node_id);
    if (n.node_id <= 0) out.push_back(tag + ": node id must be >= 1");
    if (!ids.insert({n.wat, n.node_id}).second) out.push_back(tag + ": duplicate node id");
    if (!(n.bandwidth_hz > 0.0)) out.push_back(tag + ": bandwidth must be > 0");
    if (!std::isfinite(n.tx_power_dbm)) out.push_back(tag + ": tx power must be finite");
    if (!b.contains(n.position_m)) out.push_back(tag + ": position outside the factory bounds");
    if (n.model.kind == PathlossKind::LogDistance && !(n.model.d0_m > 0.0)) out.push_back(tag + ": d0_m must be > 0");
    if (n.model.kind == PathlossKind::Lambertian) {
      if (!(n.model.semi_angle_deg > 0.0 && n.model.semi_angle_deg < 90.0))
        out.push_back(tag + ": semi_angle_deg must be in (0, 90)");
      if (!(n.model.fov_deg > 0.0 && n.model.fov_deg <= 90.0)) out.push_back(tag + ": fov_deg must be in (0, 90]");
      if (!(n.model.detector_area_m2 > 0.0)) out.push_back(tag + ": detector_area_m2 must be > 0");
    }
    ++per_wat[n.wat];
  }
  for (Wat w : kAllWats)
    if (per_wat[w] == 0) out.push_back(fmt::format("layout.nodes: no {} nodes", to_string(w)));

  const auto& r = layout.agv;
  if (r.waypoints.size() < 2) out.push_back("layout.agv.path: needs at least 2 waypoints");
  if (!(r.speed_mps > 0.0) || !std::isfinite(r.speed_mps)) out.push_back("layout.agv.speed_mps: must be > 0");
  for (std::size_t i = 0; i < r.waypoints.size(); ++i)
    if (!b.contains(r.waypoints[i])) out.push_back(fmt::format("layout.agv.path[{}]: outside the factory bounds", i));

  std::set<int> user_ids;
  for (const auto& u : layout.static_users) {
    const auto tag = fmt::format("layout.static_users[{}]", u.user_id);
    if (u.user_id <= 0) out.push_back(tag + ": user id must be >= 1 (0 is the AGV)");
    if (!user_ids.insert(u.user_id).second) out.push_back(tag + ": duplicate user id");
    if (!b.contains(u.position_m)) out.push_back(tag + ": position outside the factory bounds");
  }

  // Coverage is only meaningful once the node set itself is sane.
  if (out.empty()) {
    for (const auto& u : layout.static_users) {
      for (Wat w : kAllWats) {
        bool covered = false;
        for (const auto& n : layout.nodes)
          if (n.wat == w && distance(n.position_m, u.position_m) > 0.0 && std::isfinite(rx_power_dbm(n, u.position_m)))
            covered = true;
        if (!covered)
          out.push_back(fmt::format("layout.static_users[{}]: no {} node in range", u.user_id, to_string(w)));
      }
    }
  }
  return out;
}

}  // namespace atsss::radio
