// SPDX-License-Identifier: Apache-2.0
#include "atsss/metrics_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "atsss/config.hpp"
#include "atsss/error.hpp"
#include "atsss/version.hpp"
#include "text_util.hpp"

namespace atsss::metrics {

using nlohmann::json;
using steering::SteeringMode;

namespace {

double canon(double v) { return detail::parse_double(detail::format_g6(v)); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

constexpr const char* kFlowsHeader = "user_id,seq,file_id,size_bytes,arrival_time_s,completion_time_s";

bool is_agv(const RunData& run, int user) { return run.config.include_agv && user == sim::kAgvUserId; }

double weight_of(const TraceRow& r, SteeringMode mode) {
  return mode == SteeringMode::LoadBalancing ? r.lb_weight_pct : (r.sd_selected ? 100.0 : 0.0);
}

}  // namespace

std::vector<TraceRow> to_rows(const sim::SimTrace& trace) {
  std::vector<TraceRow> rows;
  std::size_t n = 0;
  for (const auto& e : trace.epochs) n += e.users.size() * kWatCount;
  rows.reserve(n);
  for (const auto& e : trace.epochs) {
    for (const auto& u : e.users) {
      for (Wat w : kAllWats) {
        const auto& s = u.telemetry[w];
        TraceRow r;
        r.timestamp_s = canon(e.timestamp_s);
        r.user_id = u.user_id;
        r.wat = w;
        r.cell_id = s.cell_id;
        r.rsrp_dbm = canon(s.rsrp_dbm);
        r.sinr_db = canon(s.sinr_db);
        r.buffer_pct = canon(s.buffer_pct);
        r.delay_ms = canon(s.delay_ms);
        r.utility_overall = canon(u.decision.breakdowns[w].overall);
        r.lb_weight_pct = canon(u.decision.lb_weights[w]);
        r.sd_selected = u.decision.sd_selection[w];
        r.degenerate = u.decision.degenerate;
        rows.push_back(r);
      }
    }
  }
  return rows;
}

steering::TelemetrySample sample_of(const TraceRow& r) {
  return steering::TelemetrySample{r.wat, r.cell_id, r.rsrp_dbm, r.sinr_db, r.buffer_pct, r.delay_ms, r.timestamp_s};
}

void write_trace(const std::vector<TraceRow>& rows, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << detail::format_g6(r.timestamp_s) << ',' << r.user_id << ',' << to_string(r.wat) << ',' << r.cell_id << ','
        << detail::format_g6(r.rsrp_dbm) << ',' << detail::format_g6(r.sinr_db) << ','
        << detail::format_g6(r.buffer_pct) << ',' << detail::format_g6(r.delay_ms) << ','
        << detail::format_g6(r.utility_overall) << ',' << detail::format_g6(r.lb_weight_pct) << ','
        << (r.sd_selected ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

void write_trace(const std::vector<TraceRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_trace(rows, out);
  check_written(out, path);
}

std::string trace_text(const std::vector<TraceRow>& rows) {
  std::ostringstream ss;
  write_trace(rows, ss);
  return ss.str();
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace is empty (header missing)");
  if (detail::trim_cr(line) != kTraceHeader) throw IoError("trace line 1: unexpected header '" + line + "'");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  auto flag = [](const std::string& s) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw InvalidArgument("flag must be 0 or 1, got '" + s + "'");
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 12) throw IoError(fmt::format("trace line {}: expected 12 fields, got {}", lineno, f.size()));
    try {
      TraceRow r;
      r.timestamp_s = detail::parse_double(f[0]);
      r.user_id = static_cast<int>(detail::parse_int(f[1]));
      const auto wat = parse_wat(f[2]);
      if (!wat) throw InvalidArgument("unknown WAT '" + f[2] + "'");
      r.wat = *wat;
      r.cell_id = static_cast<int>(detail::parse_int(f[3]));
      r.rsrp_dbm = detail::parse_double(f[4]);
      r.sinr_db = detail::parse_double(f[5]);
      r.buffer_pct = detail::parse_double(f[6]);
      r.delay_ms = detail::parse_double(f[7]);
      r.utility_overall = detail::parse_double(f[8]);
      r.lb_weight_pct = detail::parse_double(f[9]);
      r.sd_selected = flag(f[10]);
      r.degenerate = flag(f[11]);
      rows.push_back(r);
    } catch (const Error& e) {
      throw IoError(fmt::format("trace line {}: {}", lineno, e.what()));
    }
  }
  return rows;
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_trace(in);
  } catch (const IoError& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_flows(const std::vector<net::FlowCompletion>& flows, std::ostream& out) {
  out << kFlowsHeader << '\n';
  for (const auto& f : flows) {
    out << f.user_id << ',' << f.seq << ',' << f.file_id << ',' << f.size_bytes << ','
        << detail::format_exact(f.arrival_time_s) << ',' << detail::format_exact(f.completion_time_s) << '\n';
  }
}

std::vector<net::FlowCompletion> read_flows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim_cr(line) != kFlowsHeader) throw IoError("flows line 1: unexpected header");
  std::vector<net::FlowCompletion> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 6) throw IoError(fmt::format("flows line {}: expected 6 fields", lineno));
    try {
      out.push_back(net::FlowCompletion{static_cast<int>(detail::parse_int(f[0])), detail::parse_int(f[1]),
                                        detail::parse_int(f[2]), detail::parse_int(f[3]),
                                        detail::parse_double(f[4]), detail::parse_double(f[5])});
    } catch (const Error& e) {
      throw IoError(fmt::format("flows line {}: {}", lineno, e.what()));
    }
  }
  return out;
}

// --- run directories ------------------------------------------------------

RunData capture(const sim::SimConfig& cfg, const sim::SimTrace& trace) {
  RunData run;
  run.meta.name = cfg.name;
  run.meta.version = kVersion;
  run.meta.config_hash = trace.summary.config_hash;
  run.meta.seed = trace.summary.seed;
  run.meta.epochs = trace.summary.epochs;
  run.meta.requests = trace.summary.requests;
  run.meta.completed_flows = trace.summary.completed_flows;
  run.config = cfg;
  run.totals = trace.summary.totals;
  run.rows = to_rows(trace);
  run.flows = trace.flows;
  return run;
}

namespace {

json totals_json(const net::Totals& t) {
  return {{"enqueued_bytes", t.enqueued}, {"served_bytes", t.served},   {"dropped_bytes", t.dropped},
          {"flushed_bytes", t.flushed},   {"queued_bytes", t.queued},   {"returned_bytes", t.returned}};
}

net::Totals totals_from(const json& j) {
  net::Totals t;
  t.enqueued = j.at("enqueued_bytes").get<std::int64_t>();
  t.served = j.at("served_bytes").get<std::int64_t>();
  t.dropped = j.at("dropped_bytes").get<std::int64_t>();
  t.flushed = j.at("flushed_bytes").get<std::int64_t>();
  t.queued = j.at("queued_bytes").get<std::int64_t>();
  t.returned = j.at("returned_bytes").get<std::int64_t>();
  return t;
}

}  // namespace

void write_run(const RunData& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  write_trace(run.rows, dir / "trace.csv");
  {
    auto out = open_out(dir / "flows.csv");
    write_flows(run.flows, out);
    check_written(out, dir / "flows.csv");
  }
  json cfg = config::to_json(run.config);
  if (run.config.requests) {
    traffic::write_requests_csv(*run.config.requests, dir / "requests.csv");
    cfg["traffic"]["requests_file"] = "requests.csv";
  }
  json j;
  j["meta"] = {{"name", run.meta.name},
               {"version", run.meta.version},
               {"config_hash", run.meta.config_hash},
               {"seed", run.meta.seed},
               {"epochs", run.meta.epochs},
               {"requests", run.meta.requests},
               {"completed_flows", run.meta.completed_flows}};
  j["totals"] = totals_json(run.totals);
  j["config"] = std::move(cfg);
  {
    auto out = open_out(dir / "run.json");
    out << j.dump(1) << '\n';
    check_written(out, dir / "run.json");
  }
  if (!run.rows.empty()) {
    auto out = open_out(dir / "summary.txt");
    out << format_summary(summarize(run));
    check_written(out, dir / "summary.txt");
  }
}

RunData load_run(const std::filesystem::path& dir) {
  RunData run;
  json j;
  {
    auto in = open_in(dir / "run.json");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw IoError(fmt::format("{}: {}", (dir / "run.json").string(), e.what()));
    }
  }
  try {
    const auto& m = j.at("meta");
    run.meta.name = m.at("name").get<std::string>();
    run.meta.version = m.at("version").get<std::string>();
    run.meta.config_hash = m.at("config_hash").get<std::string>();
    run.meta.seed = m.at("seed").get<std::uint64_t>();
    run.meta.epochs = m.at("epochs").get<std::int64_t>();
    run.meta.requests = m.at("requests").get<std::int64_t>();
    run.meta.completed_flows = m.at("completed_flows").get<std::int64_t>();
    run.totals = totals_from(j.at("totals"));
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", (dir / "run.json").string(), e.what()));
  }
  run.config = config::config_from_json(j.at("config"), dir);
  run.rows = read_trace(dir / "trace.csv");
  auto in = open_in(dir / "flows.csv");
  run.flows = read_flows(in);
  return run;
}

// --- statistics -----------------------------------------------------------

Stats describe(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.count = static_cast<std::int64_t>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.min = v.front();
  s.max = v.back();
  auto pct = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.p50 = pct(0.5);
  s.p95 = pct(0.95);
  return s;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman: samples differ in length");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

SummaryReport summarize(const RunData& run) {
  if (run.rows.empty()) throw InvalidArgument("cannot summarize an empty trace");
  SummaryReport s;
  s.meta = run.meta;
  s.totals = run.totals;

  std::set<double> times;
  std::set<int> users;
  for (const auto& r : run.rows) {
    times.insert(r.timestamp_s);
    users.insert(r.user_id);
  }
  s.epochs = static_cast<std::int64_t>(times.size());
  s.users = static_cast<std::int64_t>(users.size());

  if (run.config.include_agv) {
    const auto& policy = sim::policy_for(run.config, run.config.agv_traffic);
    PerWat<std::vector<double>> sinr;
    PerWat<double> weight_sum{};
    PerWat<std::int64_t> eligible{};
    std::int64_t agv_epochs = 0, degenerate = 0;
    std::vector<double> x5, y5;
    for (const auto& r : run.rows) {
      if (!is_agv(run, r.user_id)) continue;
      const double w = weight_of(r, policy.mode);
      if (r.cell_id != 0) sinr[r.wat].push_back(r.sinr_db);
      weight_sum[r.wat] += w;
      if (steering::utility_breakdown(sample_of(r), policy).eligible) ++eligible[r.wat];
      if (r.wat == Wat::FiveG) {
        ++agv_epochs;
        if (r.degenerate) ++degenerate;
        if (r.cell_id != 0) {
          x5.push_back(r.sinr_db);
          y5.push_back(w);
        }
        if (r.sinr_db > 0.0 && w == 0.0) ++s.agv_5g_good_sinr_zero_weight_epochs;
      }
    }
    if (agv_epochs > 0) {
      const double n = static_cast<double>(agv_epochs);
      for (Wat w : kAllWats) {
        s.agv_sinr_db[w] = describe(sinr[w]);
        s.agv_mean_weight_pct[w] = weight_sum[w] / n;
        s.agv_eligible_fraction[w] = static_cast<double>(eligible[w]) / n;
      }
      s.agv_degenerate_fraction = static_cast<double>(degenerate) / n;
    }
    s.agv_5g_sinr_weight_rank_corr = spearman(x5, y5);
  }

  std::vector<double> agv_delay, fct;
  for (const auto& f : run.flows) {
    (is_agv(run, f.user_id) ? agv_delay : fct).push_back(f.completion_time_s - f.arrival_time_s);
  }
  s.agv_delivery_delay_s = describe(std::move(agv_delay));
  s.flows_completed = static_cast<std::int64_t>(fct.size());
  s.flow_completion_s = describe(std::move(fct));
  return s;
}

std::string format_summary(const SummaryReport& s) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{:<40} {}\n", key, value); };
  auto num = [](double v) { return detail::format_g6(v); };
  auto stats = [&](std::string_view key, const Stats& st) {
    line(key, fmt::format("n={} mean={} p50={} p95={} min={} max={}", st.count, num(st.mean), num(st.p50),
                          num(st.p95), num(st.min), num(st.max)));
  };
  line("name", s.meta.name);
  line("version", s.meta.version);
  line("config_hash", s.meta.config_hash);
  line("seed", std::to_string(s.meta.seed));
  line("epochs", std::to_string(s.epochs));
  line("users", std::to_string(s.users));
  line("requests", std::to_string(s.meta.requests));
  line("bytes.enqueued", std::to_string(s.totals.enqueued));
  line("bytes.served", std::to_string(s.totals.served));
  line("bytes.dropped", std::to_string(s.totals.dropped));
  line("bytes.flushed", std::to_string(s.totals.flushed));
  line("bytes.queued", std::to_string(s.totals.queued));
  line("bytes.returned", std::to_string(s.totals.returned));
  line("bytes.balanced", s.totals.balanced() ? "yes" : "NO");
  for (Wat w : kAllWats) {
    const std::string wat{to_string(w)};
    stats("agv." + wat + ".sinr_db", s.agv_sinr_db[w]);
    line("agv." + wat + ".mean_weight_pct", num(s.agv_mean_weight_pct[w]));
    line("agv." + wat + ".eligible_fraction", num(s.agv_eligible_fraction[w]));
  }
  line("agv.degenerate_fraction", num(s.agv_degenerate_fraction));
  line("agv.5G.sinr_weight_rank_corr",
       s.agv_5g_sinr_weight_rank_corr ? num(*s.agv_5g_sinr_weight_rank_corr) : std::string("undefined"));
  line("agv.5G.good_sinr_zero_weight_epochs", std::to_string(s.agv_5g_good_sinr_zero_weight_epochs));
  stats("agv.delivery_delay_s", s.agv_delivery_delay_s);
  line("flows.completed", std::to_string(s.flows_completed));
  stats("flows.completion_time_s", s.flow_completion_s);
  return out;
}

// --- plots ----------------------------------------------------------------

PlotData export_plot_data(const RunData& run, PlotKind kind) {
  PlotData d;
  switch (kind) {
    case PlotKind::Agv5g: {
      d.columns = {"timestamp_s", "sinr_db", "weight_pct", "utility_overall"};
      if (!run.config.include_agv) break;
      const auto mode = sim::policy_for(run.config, run.config.agv_traffic).mode;
      for (const auto& r : run.rows) {
        if (is_agv(run, r.user_id) && r.wat == Wat::FiveG)
          d.rows.push_back({r.timestamp_s, r.sinr_db, weight_of(r, mode), r.utility_overall});
      }
      break;
    }
    case PlotKind::Weights: {
      d.columns = {"timestamp_s", "weight_5G", "weight_WiFi", "weight_LiFi", "degenerate"};
      if (!run.config.include_agv) break;
      const auto mode = sim::policy_for(run.config, run.config.agv_traffic).mode;
      for (const auto& r : run.rows) {
        if (!is_agv(run, r.user_id)) continue;
        if (r.wat == Wat::FiveG) d.rows.push_back({r.timestamp_s, 0.0, 0.0, 0.0, r.degenerate ? 1.0 : 0.0});
        d.rows.back()[1 + index(r.wat)] = weight_of(r, mode);
      }
      break;
    }
    case PlotKind::Popularity: {
      d.columns = {"rank", "probability", "cdf", "size_bytes"};
      const auto lib = sim::library_for(run.config);
      for (std::size_t i = 0; i < lib.n_files(); ++i)
        d.rows.push_back({static_cast<double>(i + 1), lib.popularity[i], lib.cdf[i],
                          static_cast<double>(lib.sizes_bytes[i])});
      break;
    }
  }
  return d;
}

void write_plot_csv(const PlotData& data, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < data.columns.size(); ++i) out << (i ? "," : "") << data.columns[i];
  out << '\n';
  for (const auto& row : data.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::format_g6(row[i]);
    out << '\n';
  }
  check_written(out, path);
}

}  // namespace atsss::metrics
