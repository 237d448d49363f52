// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <atsss/config.hpp>
#include <atsss/error.hpp>
#include <atsss/metrics_io.hpp>
#include <atsss/rng.hpp>
#include <atsss/sim_engine.hpp>
#include <atsss/version.hpp>

namespace atsss::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  unsigned threads = 1;
  std::vector<double> thresholds;
  std::string run_dir;
};

void log(const Options& o, std::ostream& err, const std::string& msg) {
  if (!o.quiet) err << msg << '\n';
}

sim::SimConfig load(const Options& o) {
  auto cfg = config::load_config(resolve_config(o.config));
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

void write_plots(const metrics::RunData& run, const fs::path& dir) {
  metrics::write_plot_csv(metrics::export_plot_data(run, metrics::PlotKind::Agv5g), dir / "agv_5g.csv");
  metrics::write_plot_csv(metrics::export_plot_data(run, metrics::PlotKind::Weights), dir / "weights.csv");
  metrics::write_plot_csv(metrics::export_plot_data(run, metrics::PlotKind::Popularity), dir / "popularity.csv");
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o);
  log(o, err, fmt::format("running '{}' (seed {}, {} s)", cfg.name, cfg.seed, cfg.duration_s));
  const auto trace = sim::run(cfg);
  const auto data = metrics::capture(cfg, trace);
  const fs::path dir(o.out);
  metrics::write_run(data, dir);
  write_plots(data, dir);
  if (!o.quiet && !data.rows.empty()) out << metrics::format_summary(metrics::summarize(data));
  log(o, err, fmt::format("wrote {}", dir.string()));
  return kOk;
}

int cmd_sweep(const Options& o, const fs::path& config_path, std::ostream& out, std::ostream& err) {
  auto base = load(o);
  nlohmann::json j;
  {
    std::ifstream in(config_path);
    j = nlohmann::json::parse(in);
  }
  std::vector<std::string> violations;
  auto grid = config::sweep_grid_from_json(j.value("sweep", nlohmann::json::object()), violations);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  if (!o.thresholds.empty()) grid.normalized_thresholds = o.thresholds;
  const auto points = grid.points();
  log(o, err, fmt::format("sweeping {} point(s) of '{}' on {} thread(s)", points.size(), base.name, o.threads));

  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  std::vector<std::string> dirs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) dirs[i] = fmt::format("{:03}_{}", i, points[i].label());

  std::vector<std::string> write_errors(points.size());
  auto results = sim::sweep(base, grid, o.threads, [&](const sim::SweepResult& r) {
    if (!r.trace) return;
    const std::size_t i = r.index;
    try {
      const auto data = metrics::capture(r.config, *r.trace);
      metrics::write_run(data, dir / dirs[i]);
      write_plots(data, dir / dirs[i]);
    } catch (const std::exception& e) {
      write_errors[i] = e.what();
    }
    log(o, err, fmt::format("  done {}", dirs[i]));
  });

  std::ofstream index(dir / "sweep.csv");
  if (!index) throw IoError(fmt::format("cannot write '{}'", (dir / "sweep.csv").string()));
  index << "index,label,seed,dir,status,agv_5g_rank_corr,agv_mean_weight_5G,agv_mean_weight_WiFi,agv_mean_weight_LiFi\n";
  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::string status = "ok", corr, w5, ww, wl;
    if (!r.error.empty() || !write_errors[i].empty()) {
      ++failures;
      status = "failed";
      err << fmt::format("point {} ({}) failed: {}\n", i, points[i].label(),
                         r.error.empty() ? write_errors[i] : r.error);
    } else if (!r.trace->epochs.empty()) {
      const auto s = metrics::summarize(metrics::capture(r.config, *r.trace));
      corr = s.agv_5g_sinr_weight_rank_corr ? fmt::format("{:.6g}", *s.agv_5g_sinr_weight_rank_corr) : "";
      w5 = fmt::format("{:.6g}", s.agv_mean_weight_pct[Wat::FiveG]);
      ww = fmt::format("{:.6g}", s.agv_mean_weight_pct[Wat::WiFi]);
      wl = fmt::format("{:.6g}", s.agv_mean_weight_pct[Wat::LiFi]);
    }
    index << fmt::format("{},{},{},{},{},{},{},{},{}\n", i, points[i].label(), r.config.seed, dirs[i], status, corr,
                         w5, ww, wl);
  }
  if (!o.quiet) out << fmt::format("{} point(s), {} failed; index at {}\n", results.size(), failures,
                                   (dir / "sweep.csv").string());
  return failures == 0 ? kOk : kRuntimeError;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const fs::path path = resolve_config(o.config);
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    err << fmt::format("{}: {}\n", path.string(), e.what());
    return kConfigError;
  }
  std::vector<std::string> v;
  auto cfg = config::parse_config(j, path.parent_path(), v);
  auto sv = sim::config_violations(cfg);
  v.insert(v.end(), sv.begin(), sv.end());
  if (j.contains("sweep")) config::sweep_grid_from_json(j["sweep"], v);
  if (!v.empty()) {
    err << fmt::format("{}: {} problem(s)\n", path.string(), v.size());
    for (const auto& s : v) err << "  " << s << '\n';
    return kConfigError;
  }
  out << fmt::format("{}: ok (config hash {})\n", path.string(), config::config_hash(cfg));
  return kOk;
}

int cmd_summarize(const Options& o, std::ostream& out) {
  const auto run = metrics::load_run(o.run_dir);
  out << metrics::format_summary(metrics::summarize(run));
  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", o.out, ec.message()));
    write_plots(run, o.out);
  }
  return kOk;
}

int cmd_gen_traffic(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = load(o);
  std::vector<int> ids;
  for (const auto& u : cfg.layout.static_users) ids.push_back(u.user_id);
  const auto lib = sim::library_for(cfg);
  const traffic::ArrivalConfig ac{cfg.lambda_per_s, cfg.duration_s, derive_seed(cfg.seed, "requests")};
  const auto stream = traffic::generate_requests(ac, lib, ids, traffic::TrafficType::eMBB);
  const fs::path path(o.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  traffic::write_requests_csv(stream, path);
  log(o, err, fmt::format("wrote {} request(s) to {}", stream.size(), path.string()));
  if (!o.quiet) out << stream.size() << '\n';
  return kOk;
}

}  // namespace

fs::path resolve_config(const std::string& value) {
  const fs::path p(value);
  if (fs::exists(p) || p.has_parent_path() || p.has_extension()) return p;
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("ATSSS_CONFIG_DIR")) dirs.emplace_back(env);
  std::error_code ec;
  if (const auto exe = fs::read_symlink("/proc/self/exe", ec); !ec)
    dirs.push_back(exe.parent_path().parent_path() / "share" / "atsss" / "configs");
#ifdef ATSSS_DEFAULT_CONFIG_DIR
  dirs.emplace_back(ATSSS_DEFAULT_CONFIG_DIR);
#endif
  for (const auto& d : dirs) {
    const auto candidate = d / (value + ".json");
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-access traffic steering simulator for 5G, Wi-Fi and LiFi", "atsss"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Simulate one configuration and write a run directory");
  run->add_option("--config", o.config, "Config file or shipped config name (paper-lb, paper-sd)")->required();
  run->add_option("--out", o.out, "Output directory")->required();
  run->add_option("--seed", o.seed, "Override the config seed");
  run->add_flag("-q,--quiet", o.quiet, "Only report errors");

  auto* sweep = app.add_subcommand("sweep", "Run every point of a parameter grid");
  sweep->add_option("--config", o.config, "Config file or shipped config name")->required();
  sweep->add_option("--out", o.out, "Output directory (one sub-directory per point)")->required();
  sweep->add_option("--seed", o.seed, "Override the base seed");
  sweep->add_option("--threads", o.threads, "Points run concurrently")->check(CLI::PositiveNumber);
  sweep->add_option("--normalized-threshold", o.thresholds, "Threshold grid, overrides the config's")
      ->delimiter(',');
  sweep->add_flag("-q,--quiet", o.quiet, "Only report errors");

  auto* validate = app.add_subcommand("validate-config", "Check a config and report every problem");
  validate->add_option("--config", o.config, "Config file or shipped config name")->required();
  validate->add_flag("-q,--quiet", o.quiet, "Only report errors");

  auto* summarize = app.add_subcommand("summarize", "Summarize a run directory");
  summarize->add_option("run_dir", o.run_dir, "Run directory written by 'run'")->required();
  summarize->add_option("--out", o.out, "Also write plot data files here");
  summarize->add_flag("-q,--quiet", o.quiet, "Only report errors");

  auto* gen = app.add_subcommand("gen-traffic", "Write the request stream a config would generate");
  gen->add_option("--config", o.config, "Config file or shipped config name")->required();
  gen->add_option("--out", o.out, "Output CSV file")->required();
  gen->add_option("--seed", o.seed, "Override the config seed");
  gen->add_flag("-q,--quiet", o.quiet, "Only report errors");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(o, out, err);
    if (*sweep) return cmd_sweep(o, resolve_config(o.config), out, err);
    if (*validate) return cmd_validate(o, out, err);
    if (*summarize) return cmd_summarize(o, out);
    if (*gen) return cmd_gen_traffic(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error:\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace atsss::cli
