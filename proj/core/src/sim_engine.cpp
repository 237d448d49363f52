// SPDX-License-Identifier: Apache-2.0
#include "atsss/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "atsss/config.hpp"
#include "atsss/error.hpp"
#include "atsss/rng.hpp"

namespace atsss::sim {

using steering::SteeringMode;
using steering::SteeringPolicy;
using steering::TelemetrySample;
using traffic::TrafficType;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integer_ratio(double num, double den) {
  const double r = num / den;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

struct Quantizer {
  double factor = 100.0;
  double operator()(double x) const {
    if (!std::isfinite(x)) return x;
    const double q = std::round(x * factor) / factor;
    return q == 0.0 ? 0.0 : q;  // no negative zero
  }
};

struct UserSlot {
  int user_id = 0;
  TrafficType type = TrafficType::eMBB;
  radio::Vec3 position;
  std::vector<double> rx_dbm;
  std::vector<double> shadow_db;
  PerWat<std::optional<int>> current_cell;
  net::ServingNodes serving;
  net::Routing routing;
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg), nodes_(cfg.layout.nodes), state_(nodes_, capacities(cfg)) {
    quant_.factor = std::round(1.0 / cfg.telemetry_resolution);
    if (cfg.include_agv) add_user(kAgvUserId, cfg.agv_traffic, agv_position(0.0, cfg.layout.agv));
    for (const auto& u : cfg.layout.static_users) add_user(u.user_id, TrafficType::eMBB, u.position_m);
    for (const auto& u : users_) {
      user_ids_.push_back(u.user_id);
      policies_.emplace(u.user_id, policy_for(cfg, u.type));
    }
    shadow_rng_.emplace(derive_seed(cfg.seed, "shadowing"));
  }

  SimTrace run() {
    SimTrace trace;
    const auto requests = build_requests();
    trace.summary.requests = static_cast<std::int64_t>(requests.size());

    const double dt = cfg_.dt_s;
    const auto steps = static_cast<std::int64_t>(std::floor(cfg_.duration_s / dt + 1e-9));
    const auto per_epoch = static_cast<std::int64_t>(std::llround(cfg_.decision_epoch_s / dt));
    const double agv_rate = cfg_.include_agv ? cfg_.agv_rate_bps.at(cfg_.agv_traffic) : 0.0;
    std::size_t next_req = 0;
    std::int64_t agv_sent_bits_floor = 0;

    for (std::int64_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      if (cfg_.include_agv) move_agv(t);
      if (k % per_epoch == 0) {
        const double epoch_t = static_cast<double>(k / per_epoch) * cfg_.decision_epoch_s;
        trace.epochs.push_back(run_epoch(epoch_t));
      } else if (cfg_.include_agv) {
        refresh_rates(users_.front());
      }

      if (cfg_.include_agv) {
        // Constant-rate session: whole bytes up to the end of this step.
        const auto total = static_cast<std::int64_t>(std::floor(agv_rate * static_cast<double>(k + 1) * dt / 8.0));
        const std::int64_t bytes = total - agv_sent_bits_floor;
        agv_sent_bits_floor = total;
        if (bytes > 0) state_.add_file(kAgvUserId, 0, bytes, t);
      }
      // Requests join at the first step boundary at or after their arrival.
      while (next_req < requests.size() && requests[next_req].arrival_time_s <= t) {
        const auto& r = requests[next_req++];
        state_.add_file(r.user_id, r.file_id, r.size_bytes, r.arrival_time_s);
      }

      const auto source_budget = static_cast<std::int64_t>(std::floor(cfg_.source_rate_bps * dt / 8.0));
      for (auto& u : users_) {
        const auto* flow = state_.flow(u.user_id);
        if (flow == nullptr || flow->backlog_bytes() == 0) continue;
        const std::int64_t budget = u.user_id == kAgvUserId && cfg_.include_agv ? flow->backlog_bytes() : source_budget;
        state_.dispatch(u.user_id, budget, u.routing, u.serving);
      }

      auto rep = state_.advance(dt, t + dt);
      for (auto& c : rep.completions) trace.flows.push_back(c);
    }

    trace.summary.totals = state_.totals();
    if (!trace.summary.totals.balanced())
      throw SimulationError("byte accounting out of balance at end of run");
    trace.summary.epochs = static_cast<std::int64_t>(trace.epochs.size());
    trace.summary.completed_flows = static_cast<std::int64_t>(
        std::count_if(trace.flows.begin(), trace.flows.end(), [](const auto& f) { return f.user_id != kAgvUserId; }));
    trace.summary.seed = cfg_.seed;
    trace.summary.config_hash = config::config_hash(cfg_);
    return trace;
  }

 private:
  static PerWat<std::int64_t> capacities(const SimConfig& cfg) {
    PerWat<std::int64_t> c;
    for (Wat w : kAllWats) c[w] = cfg.network[w].capacity_bytes;
    return c;
  }

  void add_user(int id, TrafficType type, radio::Vec3 pos) {
    UserSlot u;
    u.user_id = id;
    u.type = type;
    u.position = pos;
    u.rx_dbm.resize(nodes_.size());
    u.shadow_db.assign(nodes_.size(), 0.0);
    users_.push_back(std::move(u));
  }

  traffic::RequestStream build_requests() const {
    if (cfg_.requests) {
      auto r = *cfg_.requests;
      std::stable_sort(r.begin(), r.end(),
                       [](const auto& a, const auto& b) { return a.arrival_time_s < b.arrival_time_s; });
      return r;
    }
    std::vector<int> ids;
    for (const auto& u : cfg_.layout.static_users) ids.push_back(u.user_id);
    if (ids.empty()) return {};
    const auto lib = library_for(cfg_);
    traffic::ArrivalConfig ac{cfg_.lambda_per_s, cfg_.duration_s, derive_seed(cfg_.seed, "requests")};
    return traffic::generate_requests(ac, lib, ids, TrafficType::eMBB);
  }

  void move_agv(double t) {
    users_.front().position = radio::agv_position(t, cfg_.layout.agv);
    compute_rx(users_.front());
  }

  void compute_rx(UserSlot& u) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      u.rx_dbm[i] = radio::rx_power_dbm(nodes_[i], u.position) + u.shadow_db[i];
  }

  double link_rate_for(const UserSlot& u, std::size_t node) const {
    if (!std::isfinite(u.rx_dbm[node])) return 0.0;
    const auto& n = nodes_[node];
    const auto& p = cfg_.network[n.wat];
    return net::serve_rate_bps(radio::sinr_db(u.rx_dbm, node, nodes_), n.bandwidth_hz, p.efficiency, p.max_rate_bps);
  }

  /// Rates toward serving nodes and toward any node still holding the user's bytes.
  void refresh_rates(UserSlot& u) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const bool serving = u.serving[nodes_[i].wat] == i;
      const bool holds = state_.node(i).queued_bytes(u.user_id) > 0;
      if (!serving && !holds) continue;
      const double rate = link_rate_for(u, i);
      if (rate <= 0.0 && holds) state_.reclaim(u.user_id, i);
      state_.set_link_rate(u.user_id, i, rate);
    }
  }

  void associate_user(UserSlot& u) {
    if (cfg_.shadowing_sigma_db > 0.0) {
      for (auto& s : u.shadow_db) s = cfg_.shadowing_sigma_db * shadow_rng_->normal();
    }
    compute_rx(u);
    for (Wat w : kAllWats) {
      radio::AssociationOptions opts{cfg_.hysteresis_db, u.current_cell[w]};
      auto m = radio::associate(u.rx_dbm, w, nodes_, opts);
      if (m) {
        u.current_cell[w] = m->node_id;
        u.serving[w] = state_.node_index(w, m->node_id);
      } else {
        u.current_cell[w].reset();
        u.serving[w].reset();
      }
    }
  }

  TelemetrySample telemetry(const UserSlot& u, Wat w, double t) const {
    TelemetrySample s;
    s.wat = w;
    s.timestamp_s = t;
    if (!u.serving[w]) {
      s.cell_id = 0;
      s.rsrp_dbm = -kInf;
      s.sinr_db = -kInf;
      s.buffer_pct = 0.0;
      s.delay_ms = cfg_.delay_cap_ms;
      return s;
    }
    const std::size_t i = *u.serving[w];
    const auto& node = nodes_[i];
    s.cell_id = node.node_id;
    s.rsrp_dbm = quant_(u.rx_dbm[i] - node.model.rs_offset_db);
    s.sinr_db = quant_(radio::sinr_db(u.rx_dbm, i, nodes_));
    s.buffer_pct = quant_(state_.node(i).buffer_pct());
    s.delay_ms = quant_(state_.user_delay_ms(u.user_id, i, cfg_.probe_bytes, cfg_.delay_cap_ms));
    return s;
  }

  EpochRecord run_epoch(double t) {
    for (auto& u : users_) associate_user(u);
    for (auto& u : users_) refresh_rates(u);

    std::map<int, PerWat<TelemetrySample>> tel;
    for (const auto& u : users_) {
      PerWat<TelemetrySample> s;
      for (Wat w : kAllWats) s[w] = telemetry(u, w, t);
      tel.emplace(u.user_id, s);
    }

    std::vector<steering::SteeringDecision> decisions;
    try {
      decisions = steering::decide_all(user_ids_, tel, policies_);
    } catch (const Error& e) {
      throw SimulationError(fmt::format("t={}s: {}", t, e.what()));
    }

    EpochRecord rec;
    rec.timestamp_s = t;
    rec.agv_position = cfg_.include_agv ? users_.front().position : radio::Vec3{};
    rec.users.reserve(users_.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      auto& u = users_[i];
      const auto& d = decisions[i];
      check_decision(d, t);
      const auto& s = tel.at(u.user_id);
      std::optional<Wat> fallback;
      for (Wat w : kAllWats) {
        if (s[w].covered() && (!fallback || s[w].sinr_db > s[*fallback].sinr_db)) fallback = w;
      }
      u.routing = net::routing_for(d, fallback);

      UserEpoch ue;
      ue.user_id = u.user_id;
      ue.traffic_type = u.type;
      ue.telemetry = s;
      ue.decision = d;
      if (const auto* f = state_.flow(u.user_id)) {
        ue.delivered_bytes = f->delivered_bytes;
        ue.backlog_bytes = f->backlog_bytes();
      }
      rec.users.push_back(std::move(ue));
    }
    rec.node_buffer_pct.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) rec.node_buffer_pct.push_back(state_.node(i).buffer_pct());
    rec.totals = state_.totals();
    if (!rec.totals.balanced()) throw SimulationError(fmt::format("t={}s: byte accounting out of balance", t));
    return rec;
  }

  static void check_decision(const steering::SteeringDecision& d, double t) {
    if (d.mode != SteeringMode::LoadBalancing || d.degenerate) return;
    double sum = 0.0;
    for (double w : d.lb_weights) {
      if (w < 0.0) throw SimulationError(fmt::format("t={}s: user {} has a negative LB weight", t, d.user_id));
      sum += w;
    }
    if (std::abs(sum - 100.0) > 1e-6)
      throw SimulationError(fmt::format("t={}s: user {} LB weights sum to {}", t, d.user_id, sum));
  }

  const SimConfig& cfg_;
  const std::vector<radio::AccessNode>& nodes_;
  net::NetworkState state_;
  Quantizer quant_;
  std::vector<UserSlot> users_;
  std::vector<int> user_ids_;
  std::map<int, SteeringPolicy> policies_;
  std::optional<Rng> shadow_rng_;
};

}  // namespace

std::vector<std::string> config_violations(const SimConfig& cfg) {
  std::vector<std::string> out;
  auto bad = [&](std::string field, std::string what) { out.push_back(field + ": " + what); };

  if (!(cfg.dt_s > 0.0) || !std::isfinite(cfg.dt_s)) bad("dt_s", "must be finite and > 0");
  if (!(cfg.decision_epoch_s > 0.0) || !std::isfinite(cfg.decision_epoch_s)) {
    bad("decision_epoch_s", "must be finite and > 0");
  } else if (cfg.dt_s > 0.0 && (cfg.decision_epoch_s < cfg.dt_s || !is_integer_ratio(cfg.decision_epoch_s, cfg.dt_s))) {
    bad("decision_epoch_s", fmt::format("must be a positive integer multiple of dt_s ({} / {} is not)",
                                        cfg.decision_epoch_s, cfg.dt_s));
  }
  if (!(cfg.duration_s >= 0.0) || !std::isfinite(cfg.duration_s)) bad("duration_s", "must be finite and >= 0");
  if (!(cfg.delay_cap_ms > 0.0) || !std::isfinite(cfg.delay_cap_ms)) bad("delay_cap_ms", "must be finite and > 0");
  if (!(cfg.telemetry_resolution > 0.0) || !is_integer_ratio(1.0, cfg.telemetry_resolution))
    bad("telemetry_resolution", "must be 1/k for a positive integer k");
  if (cfg.probe_bytes < 0) bad("probe_bytes", "must be >= 0");
  if (!(cfg.source_rate_bps > 0.0)) bad("source_rate_bps", "must be > 0");
  if (!(cfg.shadowing_sigma_db >= 0.0)) bad("shadowing_sigma_db", "must be >= 0");
  if (!(cfg.hysteresis_db >= 0.0)) bad("hysteresis_db", "must be >= 0");

  if (!(cfg.lambda_per_s > 0.0) || !std::isfinite(cfg.lambda_per_s)) bad("traffic.lambda_per_s", "must be finite and > 0");
  if (cfg.library.n_files < 1) bad("traffic.n_files", "must be >= 1");
  if (!(cfg.library.zipf_alpha >= 0.0) || !std::isfinite(cfg.library.zipf_alpha))
    bad("traffic.zipf_alpha", "must be finite and >= 0");
  if (cfg.library.size_min_bytes <= 0) bad("traffic.size_min_bytes", "must be > 0");
  if (cfg.library.size_max_bytes < cfg.library.size_min_bytes)
    bad("traffic.size_max_bytes", "must be >= size_min_bytes");

  for (Wat w : kAllWats) {
    const auto& p = cfg.network[w];
    const std::string prefix = fmt::format("network.{}.", to_string(w));
    if (p.capacity_bytes <= 0) bad(prefix + "capacity_bytes", "must be > 0");
    if (!(p.efficiency > 0.0 && p.efficiency <= 1.0)) bad(prefix + "efficiency", "must be in (0, 1]");
    if (!(p.max_rate_bps > 0.0)) bad(prefix + "max_rate_bps", "must be > 0");
  }

  auto need_policy = [&](TrafficType t) {
    auto it = cfg.policies.find(t);
    if (it == cfg.policies.end()) {
      bad(fmt::format("policies.{}", traffic::to_string(t)), "missing");
      return;
    }
    auto v = steering::policy_violations(it->second, fmt::format("policies.{}.", traffic::to_string(t)));
    out.insert(out.end(), v.begin(), v.end());
  };
  need_policy(TrafficType::eMBB);
  if (cfg.include_agv) {
    if (cfg.agv_traffic != TrafficType::eMBB) need_policy(cfg.agv_traffic);
    auto r = cfg.agv_rate_bps.find(cfg.agv_traffic);
    if (r == cfg.agv_rate_bps.end() || !(r->second > 0.0) || !std::isfinite(r->second))
      bad(fmt::format("agv.rate_bps.{}", traffic::to_string(cfg.agv_traffic)), "must be finite and > 0");
  }

  auto lv = radio::layout_violations(cfg.layout);
  for (auto& v : lv) out.push_back("layout: " + v);
  if (cfg.requests) {
    std::vector<int> ids;
    for (const auto& u : cfg.layout.static_users) ids.push_back(u.user_id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < cfg.requests->size(); ++i) {
      const auto& r = (*cfg.requests)[i];
      if (!std::binary_search(ids.begin(), ids.end(), r.user_id)) {
        bad(fmt::format("requests[{}]", i), fmt::format("unknown user {}", r.user_id));
        break;
      }
      if (r.size_bytes <= 0 || !(r.arrival_time_s >= 0.0)) {
        bad(fmt::format("requests[{}]", i), "needs size > 0 and arrival time >= 0");
        break;
      }
    }
  }
  return out;
}

SimConfig default_config() {
  SimConfig cfg;
  cfg.policies[TrafficType::eMBB] =
      steering::make_policy(SteeringMode::LoadBalancing, {1.0, 0.7, 0.2}, 0.6);
  cfg.policies[TrafficType::URLLC] =
      steering::make_policy(SteeringMode::SplitDuplicate, {0.5, 0.2, 1.0}, 0.6);
  cfg.network[Wat::FiveG].max_rate_bps = 2e9;
  cfg.network[Wat::WiFi].max_rate_bps = 1.2e9;
  cfg.network[Wat::LiFi].max_rate_bps = 1e8;
  return cfg;
}

traffic::ContentLibrary library_for(const SimConfig& cfg) {
  return traffic::make_library(cfg.library, derive_seed(cfg.seed, "library"));
}

const SteeringPolicy& policy_for(const SimConfig& cfg, TrafficType type) {
  auto it = cfg.policies.find(type);
  if (it == cfg.policies.end())
    throw ConfigError(fmt::format("policies.{}", traffic::to_string(type)), "missing");
  return it->second;
}

TrafficType traffic_type_of(const SimConfig& cfg, int user_id) {
  return user_id == kAgvUserId && cfg.include_agv ? cfg.agv_traffic : TrafficType::eMBB;
}

SimTrace run(const SimConfig& cfg) {
  auto v = config_violations(cfg);
  if (!v.empty()) throw ConfigError(std::move(v));
  Engine engine(cfg);
  return engine.run();
}

// --- sweeps ---------------------------------------------------------------

std::string SweepPoint::label() const {
  std::string s;
  if (normalized_threshold) s += fmt::format("q{}", *normalized_threshold);
  if (weights) {
    if (!s.empty()) s += "_";
    s += fmt::format("w{}-{}-{}", weights->sinr, weights->buffer, weights->delay);
  }
  return s.empty() ? "base" : s;
}

std::vector<SweepPoint> SweepGrid::points() const {
  if (normalized_thresholds.empty() && weight_sets.empty()) return {};
  std::vector<std::optional<double>> qs(normalized_thresholds.begin(), normalized_thresholds.end());
  std::vector<std::optional<steering::ParamWeights>> ws(weight_sets.begin(), weight_sets.end());
  if (qs.empty()) qs.emplace_back();
  if (ws.empty()) ws.emplace_back();
  std::vector<SweepPoint> out;
  for (const auto& q : qs)
    for (const auto& w : ws) out.push_back(SweepPoint{q, w});
  return out;
}

void apply_normalized_threshold(SteeringPolicy& policy, double q) {
  if (policy.composite_threshold) {
    policy.composite_threshold = q;
    return;
  }
  for (Wat w : kAllWats) policy.thresholds[w] = steering::expand_normalized_threshold(q, policy.maxima[w]);
}

SimConfig sweep_point_config(const SimConfig& base, const SweepGrid& grid, const SweepPoint& point,
                             std::size_t index) {
  SimConfig cfg = base;
  const TrafficType target = grid.target.value_or(base.agv_traffic);
  auto it = cfg.policies.find(target);
  if (it == cfg.policies.end())
    throw ConfigError(fmt::format("sweep.target"), fmt::format("no policy for {}", traffic::to_string(target)));
  if (point.normalized_threshold) apply_normalized_threshold(it->second, *point.normalized_threshold);
  if (point.weights) it->second.weights = *point.weights;
  cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(index));
  cfg.name = fmt::format("{}-{}", base.name, point.label());
  return cfg;
}

std::vector<SweepResult> sweep(const SimConfig& base, const SweepGrid& grid, unsigned threads,
                               const std::function<void(const SweepResult&)>& on_done) {
  const auto points = grid.points();
  std::vector<SweepResult> results(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      auto& r = results[i];
      r.index = i;
      r.point = points[i];
      try {
        r.config = sweep_point_config(base, grid, points[i], i);
        r.trace = run(r.config);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (on_done) {
        std::lock_guard lock(done_mu);
        on_done(r);
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace atsss::sim
