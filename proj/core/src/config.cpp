// SPDX-License-Identifier: Apache-2.0
#include "atsss/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "atsss/error.hpp"
#include "text_util.hpp"

namespace atsss::config {

using nlohmann::json;
using steering::SteeringMode;
using steering::SteeringPolicy;
using traffic::TrafficType;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Reads fields of one JSON object, recording type errors and unknown keys.
class Fields {
 public:
  Fields(const json& j, std::string path, std::vector<std::string>& out) : j_(j), path_(std::move(path)), out_(out) {
    if (!j_.is_object()) fail("", "must be an object");
  }
  ~Fields() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) out_.push_back(fmt::format("{}: unknown key", name(k)));
    }
  }
  Fields(const Fields&) = delete;
  Fields& operator=(const Fields&) = delete;

  std::string name(std::string_view key) const {
    if (path_.empty()) return std::string(key);
    if (key.empty()) return path_;
    return path_ + "." + std::string(key);
  }
  void fail(std::string_view key, std::string_view what) { out_.push_back(fmt::format("{}: {}", name(key), what)); }

  const json* get(std::string_view key) {
    seen_.insert(std::string(key));
    if (!j_.is_object()) return nullptr;
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  bool has(std::string_view key) const { return j_.is_object() && j_.contains(key); }
  void ignore(std::string_view key) { seen_.insert(std::string(key)); }

  /// Numbers; the strings "inf" / "-inf" are accepted for unbounded values.
  void number(std::string_view key, double& v) {
    const json* x = get(key);
    if (x == nullptr) return;
    if (x->is_number()) {
      v = x->get<double>();
    } else if (x->is_string() && (*x == "inf" || *x == "-inf")) {
      v = *x == "inf" ? kInf : -kInf;
    } else {
      fail(key, "must be a number");
    }
  }
  template <class Int>
  void integer(std::string_view key, Int& v) {
    const json* x = get(key);
    if (x == nullptr) return;
    if (x->is_number_integer()) {
      v = x->get<Int>();
    } else if (x->is_number_float() && std::floor(x->get<double>()) == x->get<double>() &&
               std::abs(x->get<double>()) < 9e15) {
      v = static_cast<Int>(x->get<double>());
    } else {
      fail(key, "must be an integer");
    }
  }
  void boolean(std::string_view key, bool& v) {
    const json* x = get(key);
    if (x == nullptr) return;
    if (x->is_boolean()) v = x->get<bool>();
    else fail(key, "must be true or false");
  }
  bool string(std::string_view key, std::string& v) {
    const json* x = get(key);
    if (x == nullptr) return false;
    if (!x->is_string()) {
      fail(key, "must be a string");
      return false;
    }
    v = x->get<std::string>();
    return true;
  }
  bool vec3(std::string_view key, radio::Vec3& v) {
    const json* x = get(key);
    if (x == nullptr) return false;
    if (!x->is_array() || (x->size() != 2 && x->size() != 3) ||
        !std::all_of(x->begin(), x->end(), [](const json& e) { return e.is_number(); })) {
      fail(key, "must be [x, y] or [x, y, z]");
      return false;
    }
    v = radio::Vec3{(*x)[0].get<double>(), (*x)[1].get<double>(), x->size() == 3 ? (*x)[2].get<double>() : 0.0};
    return true;
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& out_;
  std::set<std::string> seen_;
};

/// Shared per-WAT fields are read once per WAT, so identical messages can repeat.
void dedupe(std::vector<std::string>& v) {
  std::set<std::string> seen;
  std::erase_if(v, [&](const std::string& s) { return !seen.insert(s).second; });
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json vec3_json(const radio::Vec3& v) { return json::array({v.x, v.y, v.z}); }

radio::ChannelModel model_from_json(const json& j, const std::string& path, radio::ChannelModel m,
                                    std::vector<std::string>& out) {
  Fields f(j, path, out);
  std::string kind;
  if (f.string("model", kind)) {
    if (kind == "log_distance") m.kind = radio::PathlossKind::LogDistance;
    else if (kind == "lambertian") m.kind = radio::PathlossKind::Lambertian;
    else f.fail("model", fmt::format("unknown pathloss model '{}' (log_distance, lambertian)", kind));
  }
  f.number("pl0_db", m.pl0_db);
  f.number("exponent", m.exponent);
  f.number("d0_m", m.d0_m);
  f.number("semi_angle_deg", m.semi_angle_deg);
  f.number("fov_deg", m.fov_deg);
  f.number("detector_area_m2", m.detector_area_m2);
  f.number("filter_gain", m.filter_gain);
  f.number("concentrator_gain", m.concentrator_gain);
  f.number("noise_figure_db", m.noise_figure_db);
  f.number("rs_offset_db", m.rs_offset_db);
  return m;
}

json model_to_json(const radio::ChannelModel& m) {
  json j;
  if (m.kind == radio::PathlossKind::LogDistance) {
    j["model"] = "log_distance";
    j["pl0_db"] = m.pl0_db;
    j["exponent"] = m.exponent;
    j["d0_m"] = m.d0_m;
  } else {
    j["model"] = "lambertian";
    j["semi_angle_deg"] = m.semi_angle_deg;
    j["fov_deg"] = m.fov_deg;
    j["detector_area_m2"] = m.detector_area_m2;
    j["filter_gain"] = m.filter_gain;
    j["concentrator_gain"] = m.concentrator_gain;
  }
  j["noise_figure_db"] = m.noise_figure_db;
  j["rs_offset_db"] = m.rs_offset_db;
  return j;
}

std::optional<Wat> wat_field(Fields& f, std::string_view key) {
  std::string s;
  if (!f.string(key, s)) return std::nullopt;
  auto w = parse_wat(s);
  if (!w) f.fail(key, fmt::format("unknown WAT '{}' (5G, WiFi, LiFi)", s));
  return w;
}

void maxima_fields(Fields& f, steering::NormalizationMaxima& m) {
  f.number("sinr_db", m.sinr_db);
  f.number("buffer_pct", m.buffer_pct);
  f.number("delay_ms", m.delay_ms);
}

void threshold_fields(Fields& f, steering::ParamThresholds& t) {
  f.number("sinr_db", t.sinr_db);
  f.number("buffer_pct", t.buffer_pct);
  f.number("delay_ms", t.delay_ms);
}

/// Shared fields at the top level, per-WAT overrides under "5G"/"WiFi"/"LiFi".
template <class T, class Apply>
void per_wat_block(const json& j, const std::string& path, PerWat<T>& out, std::vector<std::string>& violations,
                   Apply apply) {
  Fields f(j, path, violations);
  for (Wat w : kAllWats) {
    apply(f, out[w]);
    const std::string key{to_string(w)};
    if (const json* sub = f.get(key)) {
      Fields g(*sub, f.name(key), violations);
      apply(g, out[w]);
    }
  }
}

}  // namespace

// --- policies -------------------------------------------------------------

SteeringPolicy policy_from_json(const json& j, const std::string& prefix, std::vector<std::string>& violations) {
  Fields f(j, prefix, violations);
  SteeringPolicy p;
  std::string mode;
  if (f.string("mode", mode)) {
    if (mode == "LB") p.mode = SteeringMode::LoadBalancing;
    else if (mode == "SD") p.mode = SteeringMode::SplitDuplicate;
    else f.fail("mode", fmt::format("unknown mode '{}' (LB, SD)", mode));
  } else if (!f.has("mode")) {
    f.fail("mode", "missing");
  }
  if (const json* w = f.get("weights")) {
    Fields g(*w, f.name("weights"), violations);
    g.number("sinr", p.weights.sinr);
    g.number("buffer", p.weights.buffer);
    g.number("delay", p.weights.delay);
  }
  if (const json* m = f.get("maxima")) {
    per_wat_block(*m, f.name("maxima"), p.maxima, violations, maxima_fields);
  }

  std::string gate = "parameters";
  f.string("threshold_gate", gate);
  if (gate != "parameters" && gate != "composite") f.fail("threshold_gate", "must be 'parameters' or 'composite'");

  std::optional<double> q;
  if (f.has("normalized_threshold")) {
    double v = 0.0;
    f.number("normalized_threshold", v);
    q = v;
  }
  if (gate == "composite") {
    if (!q) f.fail("normalized_threshold", "required when threshold_gate is 'composite'");
    p.thresholds = PerWat<steering::ParamThresholds>::filled({-kInf, kInf, kInf});
    p.composite_threshold = q.value_or(0.0);
  } else if (q) {
    for (Wat w : kAllWats) p.thresholds[w] = steering::expand_normalized_threshold(*q, p.maxima[w]);
  }
  if (const json* t = f.get("thresholds")) {
    per_wat_block(*t, f.name("thresholds"), p.thresholds, violations, threshold_fields);
  }
  if (const json* c = f.get("composite_threshold")) {
    if (c->is_null()) {
      p.composite_threshold.reset();
    } else if (c->is_number()) {
      p.composite_threshold = c->get<double>();
    } else {
      f.fail("composite_threshold", "must be a number or null");
    }
  }
  return p;
}

json policy_to_json(const SteeringPolicy& p) {
  json j;
  j["mode"] = std::string(steering::to_string(p.mode));
  j["weights"] = {{"sinr", p.weights.sinr}, {"buffer", p.weights.buffer}, {"delay", p.weights.delay}};
  json mx = json::object();
  json th = json::object();
  for (Wat w : kAllWats) {
    const std::string k{to_string(w)};
    mx[k] = {{"sinr_db", p.maxima[w].sinr_db}, {"buffer_pct", p.maxima[w].buffer_pct},
             {"delay_ms", p.maxima[w].delay_ms}};
    th[k] = {{"sinr_db", number_json(p.thresholds[w].sinr_db)},
             {"buffer_pct", number_json(p.thresholds[w].buffer_pct)},
             {"delay_ms", number_json(p.thresholds[w].delay_ms)}};
  }
  j["maxima"] = mx;
  j["thresholds"] = th;
  j["composite_threshold"] = p.composite_threshold ? json(*p.composite_threshold) : json(nullptr);
  return j;
}

// --- layout ---------------------------------------------------------------

radio::ScenarioLayout layout_from_json(const json& j, std::vector<std::string>& violations) {
  radio::ScenarioLayout L;
  Fields f(j, "layout", violations);
  if (const json* b = f.get("bounds_m")) {
    Fields g(*b, f.name("bounds_m"), violations);
    g.number("x_min", L.bounds_m.x_min);
    g.number("y_min", L.bounds_m.y_min);
    g.number("x_max", L.bounds_m.x_max);
    g.number("y_max", L.bounds_m.y_max);
  } else {
    f.fail("bounds_m", "missing");
  }

  PerWat<radio::ChannelModel> models;
  models[Wat::LiFi].kind = radio::PathlossKind::Lambertian;
  if (const json* m = f.get("wat_models")) {
    Fields g(*m, f.name("wat_models"), violations);
    for (Wat w : kAllWats) {
      const std::string k{to_string(w)};
      if (const json* x = g.get(k)) models[w] = model_from_json(*x, g.name(k), models[w], violations);
    }
  }

  if (const json* ns = f.get("nodes"); ns && ns->is_array()) {
    for (std::size_t i = 0; i < ns->size(); ++i) {
      Fields g((*ns)[i], fmt::format("layout.nodes[{}]", i), violations);
      radio::AccessNode n;
      g.integer("id", n.node_id);
      if (auto w = wat_field(g, "wat")) n.wat = *w;
      else if (!g.has("wat")) g.fail("wat", "missing");
      if (!g.vec3("pos", n.position_m)) {
        if (!g.has("pos")) g.fail("pos", "missing");
      }
      g.number("tx_power_dbm", n.tx_power_dbm);
      g.number("carrier_hz", n.carrier_hz);
      g.number("bandwidth_hz", n.bandwidth_hz);
      g.integer("channel", n.channel);
      n.model = models[n.wat];
      if (const json* m = g.get("model")) n.model = model_from_json(*m, g.name("model"), n.model, violations);
      L.nodes.push_back(n);
    }
  } else {
    f.fail("nodes", "must be an array");
  }

  if (const json* us = f.get("static_users")) {
    if (!us->is_array()) {
      f.fail("static_users", "must be an array");
    } else {
      for (std::size_t i = 0; i < us->size(); ++i) {
        Fields g((*us)[i], fmt::format("layout.static_users[{}]", i), violations);
        radio::StaticUser u;
        g.integer("id", u.user_id);
        if (!g.vec3("pos", u.position_m) && !g.has("pos")) g.fail("pos", "missing");
        L.static_users.push_back(u);
      }
    }
  }

  if (const json* a = f.get("agv")) {
    Fields g(*a, "layout.agv", violations);
    if (const json* p = g.get("path"); p && p->is_array()) {
      for (std::size_t i = 0; i < p->size(); ++i) {
        const json& e = (*p)[i];
        if (!e.is_array() || e.size() < 2 || e.size() > 3 ||
            !std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_number(); })) {
          g.fail(fmt::format("path[{}]", i), "must be [x, y] or [x, y, z]");
          continue;
        }
        L.agv.waypoints.push_back({e[0].get<double>(), e[1].get<double>(), e.size() == 3 ? e[2].get<double>() : 0.0});
      }
    } else {
      g.fail("path", "must be an array of waypoints");
    }
    g.number("speed_mps", L.agv.speed_mps);
    std::string end;
    if (g.string("end", end)) {
      if (end == "stop") L.agv.end = radio::PathEnd::Stop;
      else if (end == "loop") L.agv.end = radio::PathEnd::Loop;
      else g.fail("end", "must be 'stop' or 'loop'");
    }
  }
  return L;
}

radio::ScenarioLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open layout file '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  std::vector<std::string> v;
  auto L = layout_from_json(j, v);
  auto lv = radio::layout_violations(L);
  v.insert(v.end(), lv.begin(), lv.end());
  dedupe(v);
  if (!v.empty()) throw ConfigError(std::move(v));
  return L;
}

json layout_to_json(const radio::ScenarioLayout& L) {
  json j;
  j["bounds_m"] = {{"x_min", L.bounds_m.x_min}, {"y_min", L.bounds_m.y_min},
                   {"x_max", L.bounds_m.x_max}, {"y_max", L.bounds_m.y_max}};
  PerWat<std::optional<radio::ChannelModel>> models;
  for (const auto& n : L.nodes) {
    if (!models[n.wat]) models[n.wat] = n.model;
  }
  json wm = json::object();
  for (Wat w : kAllWats) {
    if (models[w]) wm[std::string(to_string(w))] = model_to_json(*models[w]);
  }
  j["wat_models"] = wm;
  json nodes = json::array();
  for (const auto& n : L.nodes) {
    json e = {{"id", n.node_id},
              {"wat", std::string(to_string(n.wat))},
              {"pos", vec3_json(n.position_m)},
              {"tx_power_dbm", n.tx_power_dbm},
              {"carrier_hz", n.carrier_hz},
              {"bandwidth_hz", n.bandwidth_hz},
              {"channel", n.channel}};
    if (n.model != *models[n.wat]) e["model"] = model_to_json(n.model);
    nodes.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  json users = json::array();
  for (const auto& u : L.static_users) users.push_back({{"id", u.user_id}, {"pos", vec3_json(u.position_m)}});
  j["static_users"] = std::move(users);
  json path = json::array();
  for (const auto& p : L.agv.waypoints) path.push_back(vec3_json(p));
  j["agv"] = {{"path", std::move(path)},
              {"speed_mps", L.agv.speed_mps},
              {"end", L.agv.end == radio::PathEnd::Stop ? "stop" : "loop"}};
  return j;
}

// --- sweep ----------------------------------------------------------------

sim::SweepGrid sweep_grid_from_json(const json& j, std::vector<std::string>& violations) {
  sim::SweepGrid g;
  Fields f(j, "sweep", violations);
  if (const json* q = f.get("normalized_threshold")) {
    if (!q->is_array() || !std::all_of(q->begin(), q->end(), [](const json& e) { return e.is_number(); }))
      f.fail("normalized_threshold", "must be an array of numbers");
    else
      for (const auto& e : *q) g.normalized_thresholds.push_back(e.get<double>());
  }
  if (const json* ws = f.get("weight_sets")) {
    if (!ws->is_array()) {
      f.fail("weight_sets", "must be an array");
    } else {
      for (std::size_t i = 0; i < ws->size(); ++i) {
        Fields h((*ws)[i], fmt::format("sweep.weight_sets[{}]", i), violations);
        steering::ParamWeights w;
        h.number("sinr", w.sinr);
        h.number("buffer", w.buffer);
        h.number("delay", w.delay);
        g.weight_sets.push_back(w);
      }
    }
  }
  std::string target;
  if (f.string("target", target)) {
    try {
      g.target = traffic::parse_traffic_type(target);
    } catch (const Error&) {
      f.fail("target", "must be 'eMBB' or 'URLLC'");
    }
  }
  return g;
}

// --- whole config ---------------------------------------------------------

sim::SimConfig parse_config(const json& j, const std::filesystem::path& base_dir,
                            std::vector<std::string>& violations) {
  sim::SimConfig cfg = sim::default_config();
  Fields f(j, "", violations);
  f.string("name", cfg.name);
  f.integer("seed", cfg.seed);
  f.number("duration_s", cfg.duration_s);
  f.number("dt_s", cfg.dt_s);
  f.number("decision_epoch_s", cfg.decision_epoch_s);
  f.number("delay_cap_ms", cfg.delay_cap_ms);
  f.number("telemetry_resolution", cfg.telemetry_resolution);
  f.integer("probe_bytes", cfg.probe_bytes);
  f.number("source_rate_bps", cfg.source_rate_bps);
  f.number("shadowing_sigma_db", cfg.shadowing_sigma_db);
  f.number("hysteresis_db", cfg.hysteresis_db);
  f.ignore("sweep");  // read by sweep_grid_from_json

  std::string layout_file;
  if (f.string("layout_file", layout_file)) {
    const auto p = base_dir / layout_file;
    std::ifstream in(p);
    if (!in) throw IoError(fmt::format("cannot open layout file '{}'", p.string()));
    try {
      cfg.layout = layout_from_json(json::parse(in), violations);
    } catch (const json::parse_error& e) {
      violations.push_back(fmt::format("{}: {}", p.string(), e.what()));
    }
  } else if (const json* l = f.get("layout")) {
    cfg.layout = layout_from_json(*l, violations);
  } else {
    violations.emplace_back("layout: one of layout_file or layout is required");
  }

  if (const json* t = f.get("traffic")) {
    Fields g(*t, "traffic", violations);
    g.number("lambda_per_s", cfg.lambda_per_s);
    g.integer("n_files", cfg.library.n_files);
    g.number("zipf_alpha", cfg.library.zipf_alpha);
    g.integer("size_min_bytes", cfg.library.size_min_bytes);
    g.integer("size_max_bytes", cfg.library.size_max_bytes);
    std::string req;
    if (g.string("requests_file", req)) {
      cfg.requests = traffic::read_requests_csv(base_dir / req);
    }
  }

  if (const json* a = f.get("agv")) {
    Fields g(*a, "agv", violations);
    g.boolean("enabled", cfg.include_agv);
    std::string tt;
    if (g.string("traffic_type", tt)) {
      try {
        cfg.agv_traffic = traffic::parse_traffic_type(tt);
      } catch (const Error&) {
        g.fail("traffic_type", "must be 'eMBB' or 'URLLC'");
      }
    }
    if (const json* r = g.get("rate_bps")) {
      Fields h(*r, "agv.rate_bps", violations);
      for (TrafficType t : {TrafficType::eMBB, TrafficType::URLLC}) h.number(traffic::to_string(t), cfg.agv_rate_bps[t]);
    }
  }

  if (const json* n = f.get("network")) {
    Fields g(*n, "network", violations);
    for (Wat w : kAllWats) {
      const std::string k{to_string(w)};
      if (const json* x = g.get(k)) {
        Fields h(*x, g.name(k), violations);
        h.integer("capacity_bytes", cfg.network[w].capacity_bytes);
        h.number("efficiency", cfg.network[w].efficiency);
        h.number("max_rate_bps", cfg.network[w].max_rate_bps);
      }
    }
  }

  if (const json* ps = f.get("policies")) {
    Fields g(*ps, "policies", violations);
    for (TrafficType t : {TrafficType::eMBB, TrafficType::URLLC}) {
      const std::string k{traffic::to_string(t)};
      if (const json* x = g.get(k)) cfg.policies[t] = policy_from_json(*x, "policies." + k, violations);
    }
  }
  return cfg;
}

sim::SimConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  std::vector<std::string> v;
  auto cfg = parse_config(j, base_dir, v);
  auto sv = sim::config_violations(cfg);
  v.insert(v.end(), sv.begin(), sv.end());
  dedupe(v);
  if (!v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

sim::SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const sim::SimConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["duration_s"] = cfg.duration_s;
  j["dt_s"] = cfg.dt_s;
  j["decision_epoch_s"] = cfg.decision_epoch_s;
  j["delay_cap_ms"] = cfg.delay_cap_ms;
  j["telemetry_resolution"] = cfg.telemetry_resolution;
  j["probe_bytes"] = cfg.probe_bytes;
  j["source_rate_bps"] = cfg.source_rate_bps;
  j["shadowing_sigma_db"] = cfg.shadowing_sigma_db;
  j["hysteresis_db"] = cfg.hysteresis_db;
  j["layout"] = layout_to_json(cfg.layout);
  j["traffic"] = {{"lambda_per_s", cfg.lambda_per_s},
                  {"n_files", cfg.library.n_files},
                  {"zipf_alpha", cfg.library.zipf_alpha},
                  {"size_min_bytes", cfg.library.size_min_bytes},
                  {"size_max_bytes", cfg.library.size_max_bytes}};
  json rates = json::object();
  for (const auto& [t, r] : cfg.agv_rate_bps) rates[std::string(traffic::to_string(t))] = r;
  j["agv"] = {{"enabled", cfg.include_agv},
              {"traffic_type", std::string(traffic::to_string(cfg.agv_traffic))},
              {"rate_bps", rates}};
  json net = json::object();
  for (Wat w : kAllWats) {
    net[std::string(to_string(w))] = {{"capacity_bytes", cfg.network[w].capacity_bytes},
                                      {"efficiency", cfg.network[w].efficiency},
                                      {"max_rate_bps", cfg.network[w].max_rate_bps}};
  }
  j["network"] = net;
  json pol = json::object();
  for (const auto& [t, p] : cfg.policies) pol[std::string(traffic::to_string(t))] = policy_to_json(p);
  j["policies"] = pol;
  return j;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string config_hash(const sim::SimConfig& cfg) {
  std::string text = to_json(cfg).dump();
  if (cfg.requests) {
    std::ostringstream ss;
    traffic::write_requests_csv(*cfg.requests, ss);
    text += '\n';
    text += ss.str();
  }
  return sha256_hex(text);
}

}  // namespace atsss::config
