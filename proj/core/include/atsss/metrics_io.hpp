// SPDX-License-Identifier: Apache-2.0
//
// Trace files, run directories, summary statistics and plot-ready exports.
//
// A run directory holds:
//   trace.csv    one row per (epoch, user, WAT)
//   flows.csv    completed file transfers
//   run.json     metadata, byte totals and the resolved config
//   summary.txt  human-readable summary
#pragma once

#include <atsss/sim_engine.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace atsss::metrics {

/// Column order of trace.csv.
inline constexpr const char* kTraceHeader =
    "timestamp_s,user_id,wat,cell_id,rsrp_dbm,sinr_db,buffer_pct,delay_ms,"
    "utility_overall,lb_weight_pct,sd_selected,degenerate_flag";

struct TraceRow {
  double timestamp_s = 0.0;
  int user_id = 0;
  Wat wat = Wat::FiveG;
  int cell_id = 0;
  double rsrp_dbm = 0.0;
  double sinr_db = 0.0;
  double buffer_pct = 0.0;
  double delay_ms = 0.0;
  double utility_overall = 0.0;
  double lb_weight_pct = 0.0;
  bool sd_selected = false;
  bool degenerate = false;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Rows in epoch, user, WAT order, with every real value rounded to the
/// 6 significant digits written to disk, so rows survive a CSV round trip unchanged.
std::vector<TraceRow> to_rows(const sim::SimTrace& trace);

/// Telemetry sample carried by a row.
steering::TelemetrySample sample_of(const TraceRow& row);

void write_trace(const std::vector<TraceRow>& rows, std::ostream& out);
void write_trace(const std::vector<TraceRow>& rows, const std::filesystem::path& path);
/// Throws IoError naming the line on malformed input or if unreadable.
std::vector<TraceRow> read_trace(std::istream& in);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

void write_flows(const std::vector<net::FlowCompletion>& flows, std::ostream& out);
std::vector<net::FlowCompletion> read_flows(std::istream& in);

struct RunMeta {
  std::string name;
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::int64_t epochs = 0;
  std::int64_t requests = 0;
  std::int64_t completed_flows = 0;
};

/// Everything a run directory stores, in memory.
struct RunData {
  RunMeta meta;
  sim::SimConfig config;
  net::Totals totals;
  std::vector<TraceRow> rows;
  std::vector<net::FlowCompletion> flows;
};

RunData capture(const sim::SimConfig& cfg, const sim::SimTrace& trace);

/// Creates `dir` if needed and writes every file; throws IoError on failure.
void write_run(const RunData& run, const std::filesystem::path& dir);
RunData load_run(const std::filesystem::path& dir);

struct Stats {
  std::int64_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

/// Linear-interpolated percentiles; all zero for an empty sample.
Stats describe(std::vector<double> values);

/// Spearman rank correlation with average ranks for ties; nullopt when
/// either side is constant or fewer than two points are given.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SummaryReport {
  RunMeta meta;
  net::Totals totals;
  std::int64_t epochs = 0;
  std::int64_t users = 0;
  // AGV, per WAT.
  PerWat<Stats> agv_sinr_db;          ///< epochs with coverage
  PerWat<double> agv_mean_weight_pct{};  ///< LB weight, or 100 * selection rate in SD
  PerWat<double> agv_eligible_fraction{};
  double agv_degenerate_fraction = 0.0;
  std::optional<double> agv_5g_sinr_weight_rank_corr;
  std::int64_t agv_5g_good_sinr_zero_weight_epochs = 0;  ///< SINR > 0 dB but weight 0
  Stats agv_delivery_delay_s;          ///< per constant-rate burst
  // Background downloads.
  Stats flow_completion_s;
  std::int64_t flows_completed = 0;
};

/// Throws InvalidArgument on an empty trace.
SummaryReport summarize(const RunData& run);
std::string format_summary(const SummaryReport& s);

enum class PlotKind {
  Agv5g,       ///< AGV 5G SINR, 5G weight and utility over time
  Weights,     ///< AGV per-WAT weight (or selection) over time
  Popularity,  ///< file popularity by rank
};

struct PlotData {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

PlotData export_plot_data(const RunData& run, PlotKind kind);
void write_plot_csv(const PlotData& data, const std::filesystem::path& path);

/// trace.csv contents as a string.
std::string trace_text(const std::vector<TraceRow>& rows);

}  // namespace atsss::metrics
