// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   atsss_acceptance --work-dir DIR [--update-golden]
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/rational.hpp>
#include <CLI11.hpp>
#include <fmt/format.h>

#include <atsss/config.hpp>
#include <atsss/metrics_io.hpp>
#include <atsss/rng.hpp>
#include <atsss/sim_engine.hpp>
#include <atsss/steering.hpp>
#include <atsss/traffic.hpp>

#include "oracles.hpp"
#include "table1_data.hpp"

using namespace atsss;
using steering::SteeringMode;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir{ATSSS_TEST_CONFIG_DIR};
const fs::path kGoldenDir{ATSSS_GOLDEN_DIR};
constexpr const char* kGoldenFile = "paper-lb_seed42.sha256";

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- 1 ----------------------------------------------------------------------

Outcome utility_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> uw(1e-3, 5.0), um(0.5, 150.0), frac(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double w = uw(gen), m = um(gen);
    const double x = frac(gen) * m;
    const double ref = oracle::utility(x, w, m);
    const double got = steering::param_utility(x, w, m);
    const double rel = ref == 0.0 ? std::abs(got) : std::abs(got - ref) / ref;
    worst = std::max(worst, rel);
  }
  o.check(worst <= 1e-12, fmt::format("max relative error {:.3g} > 1e-12", worst));
  for (double m : {1.0, 40.0, 100.0})
    for (double w : {1e-6, 0.2, 1.0, 5.0}) {
      o.check(steering::param_utility(0.0, w, m) == 0.0, "x = 0 gives 0");
      o.check(steering::param_utility(-7.5, w, m) == 0.0, "x < 0 gives 0");
      o.check(steering::param_utility(m, w, m) == 1.0, "x = x_max gives 1");
      o.check(steering::param_utility(m * 1.5, w, m) == 1.0, "x > x_max gives 1");
    }
  const double s = seconds_since(t0);
  o.check(s < 1.0, fmt::format("runtime {:.2f} s >= 1 s", s));
  o.note(fmt::format("1000 triples, max rel err {:.2e}, {:.3f} s", worst, s));
  return o;
}

// --- 2 ----------------------------------------------------------------------

Outcome property_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> sinr(-15, 50), buf(0, 110), del(0, 130), q(0.0, 1.0), wt(1e-3, 3.0),
      mx(1.0, 120.0);
  std::bernoulli_distribution no_cov(0.05), composite(0.2);
  std::int64_t lb_sum_bad = 0, inel_weighted = 0, inel_selected = 0, sd_mismatch = 0;
  for (int i = 0; i < 100'000; ++i) {
    const auto mode = i % 2 ? SteeringMode::SplitDuplicate : SteeringMode::LoadBalancing;
    const auto gate = composite(gen) ? steering::ThresholdGate::Composite : steering::ThresholdGate::Parameters;
    const auto p = steering::make_policy(mode, {wt(gen), wt(gen), wt(gen)}, q(gen), {mx(gen), mx(gen), mx(gen)}, gate);
    PerWat<steering::TelemetrySample> s;
    for (Wat w : kAllWats) {
      s[w] = steering::TelemetrySample{w, 1, -80.0, sinr(gen), buf(gen), del(gen), 0.0};
      if (no_cov(gen)) {
        s[w].cell_id = 0;
        s[w].sinr_db = -std::numeric_limits<double>::infinity();
      }
    }
    const auto d = steering::decide_user(s, p, i);
    double sum = 0.0;
    bool any_positive = false;
    for (Wat w : kAllWats) {
      const bool eligible = d.breakdowns[w].eligible;
      if (d.lb_weights[w] < 0.0) ++lb_sum_bad;
      if (!eligible && d.lb_weights[w] != 0.0) ++inel_weighted;
      if (!eligible && d.sd_selection[w]) ++inel_selected;
      if (mode == SteeringMode::SplitDuplicate && d.sd_selection[w] != (d.breakdowns[w].overall > 0.0)) ++sd_mismatch;
      any_positive |= d.breakdowns[w].overall > 0.0;
      sum += d.lb_weights[w];
    }
    if (mode == SteeringMode::LoadBalancing && any_positive && std::abs(sum - 100.0) > 0.5) ++lb_sum_bad;
  }
  o.check(lb_sum_bad == 0, fmt::format("{} LB draws with negative weights or sum off 100", lb_sum_bad));
  o.check(inel_weighted == 0, fmt::format("{} ineligible WATs weighted", inel_weighted));
  o.check(inel_selected == 0, fmt::format("{} ineligible WATs selected", inel_selected));
  o.check(sd_mismatch == 0, fmt::format("{} SD selections disagree with sign of utility", sd_mismatch));
  const double s = seconds_since(t0);
  o.check(s < 10.0, fmt::format("runtime {:.2f} s >= 10 s", s));
  o.note(fmt::format("1e5 draws, {:.3f} s", s));
  return o;
}

// --- 3 ----------------------------------------------------------------------

Outcome table1_regression() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = config::load_config(kConfigDir / "table1.json");
  const auto& rows = testdata::table1();
  auto decide = [&](int i, bool sd) {
    const auto& p = cfg.policies.at(sd ? traffic::TrafficType::URLLC : traffic::TrafficType::eMBB);
    return steering::decide_user(testdata::samples(rows[static_cast<std::size_t>(i)], sd), p, 0);
  };
  const auto lb1 = decide(0, false), lb2 = decide(1, false), lb3 = decide(2, false);
  const auto sd1 = decide(0, true), sd2 = decide(1, true), sd3 = decide(2, true);
  auto W = [](const steering::SteeringDecision& d, Wat w) { return d.lb_weights[w]; };
  auto triple = [&](const steering::SteeringDecision& d) {
    return fmt::format("{:.1f}/{:.1f}/{:.1f}", W(d, Wat::FiveG), W(d, Wat::WiFi), W(d, Wat::LiFi));
  };

  o.check(W(lb1, Wat::FiveG) > W(lb1, Wat::LiFi) && W(lb1, Wat::LiFi) > W(lb1, Wat::WiFi) && W(lb1, Wat::WiFi) > 0,
          "instance 1 LB ordering 5G > LiFi > WiFi > 0 (" + triple(lb1) + ")");
  o.check(W(lb2, Wat::WiFi) == 0.0, "instance 2 LB WiFi weight 0 (" + triple(lb2) + ")");
  o.check(std::abs(W(lb2, Wat::FiveG) - 50) <= 2 && std::abs(W(lb2, Wat::LiFi) - 50) <= 2,
          "instance 2 LB 5G/LiFi 50/50 +-2 (" + triple(lb2) + ")");
  o.check(sd2.sd_selection == PerWat<bool>{{false, true, false}}, "instance 2 SD selects WiFi only");
  o.check(sd1.sd_selection == PerWat<bool>{{true, true, true}}, "instance 1 SD selects all three");
  o.check(W(lb3, Wat::WiFi) > W(lb3, Wat::FiveG) && W(lb3, Wat::WiFi) > W(lb3, Wat::LiFi),
          "instance 3 LB WiFi has the largest weight (" + triple(lb3) + ")");
  o.check(sd3.sd_selection == PerWat<bool>{{false, true, true}}, "instance 3 SD selects WiFi and LiFi only");

  double stretch = 0.0;
  for (int i : {0, 2})
    for (Wat w : kAllWats)
      stretch = std::max(stretch, std::abs(W(i == 0 ? lb1 : lb3, w) - rows[static_cast<std::size_t>(i)].lb_weights[w]));
  o.note(fmt::format("LB weights {} | {} | {}; stretch max deviation {:.1f} pts ({})", triple(lb1), triple(lb2),
                     triple(lb3), stretch, stretch <= 10.0 ? "within 10" : "outside 10"));
  const double s = seconds_since(t0);
  o.check(s < 1.0, fmt::format("runtime {:.2f} s >= 1 s", s));
  return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome zipf() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto pmf = traffic::zipf_pmf(5, 1.0);
  boost::rational<long long> h(0);
  for (long long f = 1; f <= 5; ++f) h += boost::rational<long long>(1, f);
  o.check(h == boost::rational<long long>(137, 60), "harmonic number H5 = 137/60");
  double worst = 0.0;
  for (long long f = 1; f <= 5; ++f) {
    const auto exact = boost::rational<long long>(60, 137) / f;
    const double ref = boost::rational_cast<double>(exact);
    worst = std::max(worst, std::abs(pmf[static_cast<std::size_t>(f - 1)] - ref));
  }
  o.check(worst <= 1e-12, fmt::format("pmf error {:.3g} > 1e-12", worst));

  traffic::ContentLibrary lib;
  lib.popularity = pmf;
  lib.cdf.resize(pmf.size());
  double c = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) lib.cdf[i] = c += pmf[i];
  lib.cdf.back() = 1.0;
  lib.sizes_bytes.assign(pmf.size(), 1);
  Rng rng(derive_seed(42, "acceptance-zipf"));
  constexpr std::int64_t n = 100'000;
  std::vector<std::int64_t> counts(pmf.size(), 0);
  for (std::int64_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(traffic::sample_file(lib, rng) - 1)];
  double chi2 = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const double e = static_cast<double>(n) * pmf[i];
    chi2 += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
  }
  const double crit = boost::math::quantile(boost::math::complement(boost::math::chi_squared(4.0), 0.001));
  o.check(chi2 < crit, fmt::format("chi-square {:.2f} >= critical {:.2f}", chi2, crit));
  const double s = seconds_since(t0);
  o.check(s < 5.0, fmt::format("runtime {:.2f} s >= 5 s", s));
  o.note(fmt::format("pmf err {:.1e}, chi2 {:.2f} < {:.2f} (df 4, alpha 0.001)", worst, chi2, crit));
  return o;
}

// --- 5 ----------------------------------------------------------------------

Outcome poisson() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr double lambda = 2.0, horizon = 10'000.0;
  const auto lib = traffic::make_library({}, 42);
  const std::vector<int> users{1};
  const auto reqs = traffic::generate_requests({lambda, horizon, derive_seed(42, "acceptance-poisson")}, lib, users);
  const double n = static_cast<double>(reqs.size());
  const double tol = 3.0 * std::sqrt(lambda * horizon);
  o.check(std::abs(n - lambda * horizon) <= tol, fmt::format("count {} outside 20000 +- {:.0f}", n, tol));
  double prev = 0.0, sum_gap = 0.0;
  std::vector<double> windows(static_cast<std::size_t>(horizon), 0.0);
  for (const auto& r : reqs) {
    sum_gap += r.arrival_time_s - prev;
    prev = r.arrival_time_s;
    ++windows[std::min(windows.size() - 1, static_cast<std::size_t>(r.arrival_time_s))];
  }
  const double mean_gap = sum_gap / n;
  o.check(std::abs(mean_gap - 0.5) <= 0.01, fmt::format("mean inter-arrival {:.4f} not within 2% of 0.5", mean_gap));
  double m = 0, v = 0;
  for (double w : windows) m += w;
  m /= static_cast<double>(windows.size());
  for (double w : windows) v += (w - m) * (w - m);
  v /= static_cast<double>(windows.size() - 1);
  const double ratio = m / v;
  o.check(ratio >= 0.9 && ratio <= 1.1, fmt::format("window mean/variance {:.3f} outside [0.9, 1.1]", ratio));
  const double s = seconds_since(t0);
  o.check(s < 5.0, fmt::format("runtime {:.2f} s >= 5 s", s));
  o.note(fmt::format("{} events, mean gap {:.4f} s, mean/var {:.3f}", reqs.size(), mean_gap, ratio));
  return o;
}

// --- runs shared by 6-9 -------------------------------------------------------

struct Run {
  sim::SimConfig cfg;
  sim::SimTrace trace;
  fs::path dir;
  double seconds = 0.0;
};

Run simulate(const std::string& name, const fs::path& dir) {
  Run r;
  r.cfg = config::load_config(kConfigDir / (name + ".json"));
  const auto t0 = std::chrono::steady_clock::now();
  r.trace = sim::run(r.cfg);
  metrics::write_run(metrics::capture(r.cfg, r.trace), dir);
  r.seconds = seconds_since(t0);
  r.dir = dir;
  return r;
}

Outcome determinism(const Run& a, const Run& b, bool update_golden) {
  Outcome o;
  const auto ta = read_file(a.dir / "trace.csv");
  const auto tb = read_file(b.dir / "trace.csv");
  o.check(!ta.empty(), "trace written");
  o.check(ta == tb, "traces of two seed-42 runs are byte-identical");
  o.check(a.trace.epochs.size() == 600 && a.cfg.layout.static_users.size() == 100, "600 epochs, 100 static users");
  const auto hash = config::sha256_hex(ta);
  const fs::path golden = kGoldenDir / kGoldenFile;
  if (update_golden) {
    fs::create_directories(kGoldenDir);
    std::ofstream(golden) << hash << '\n';
    o.note("golden updated");
  }
  std::string expected;
  std::ifstream(golden) >> expected;
  o.check(!expected.empty(), "golden hash present at " + golden.string());
  o.check(expected.empty() || hash == expected, fmt::format("trace hash {} != golden {}", hash, expected));
  o.check(a.seconds < 60.0 && b.seconds < 60.0, fmt::format("wall clock {:.1f} s / {:.1f} s", a.seconds, b.seconds));
  o.note(fmt::format("sha256 {}..., {:.1f} s per run", hash.substr(0, 12), a.seconds));
  return o;
}

Outcome sinr_weight_relation(const Run& a) {
  Outcome o;
  const auto s = metrics::summarize(metrics::load_run(a.dir));
  const auto corr = s.agv_5g_sinr_weight_rank_corr;
  o.check(corr.has_value() && *corr > 0.5,
          fmt::format("rank correlation {} <= 0.5", corr ? fmt::format("{:.4f}", *corr) : "undefined"));
  o.check(s.agv_5g_good_sinr_zero_weight_epochs >= 1, "at least one epoch with 5G SINR > 0 dB and weight 0");
  o.note(fmt::format("rank corr {:.4f}, {} epochs with SINR > 0 dB and zero 5G weight", corr.value_or(NAN),
                     s.agv_5g_good_sinr_zero_weight_epochs));
  return o;
}

Outcome conservation(const std::vector<const Run*>& runs) {
  Outcome o;
  std::int64_t epochs = 0;
  for (const auto* r : runs) {
    for (const auto& e : r->trace.epochs) {
      ++epochs;
      if (!e.totals.balanced())
        o.check(false, fmt::format("{} t={}: enqueued {} != served {} + dropped {} + flushed {} + queued {}",
                                   r->cfg.name, e.timestamp_s, e.totals.enqueued, e.totals.served, e.totals.dropped,
                                   e.totals.flushed, e.totals.queued));
    }
    const auto& t = r->trace.summary.totals;
    o.check(t.balanced(), r->cfg.name + " final totals balance");
    const auto stored = metrics::load_run(r->dir).totals;
    o.check(stored == t, r->cfg.name + " stored totals match the run");
    o.note(fmt::format("{}: in {} = served {} + dropped {} + flushed {} + queued {}", r->cfg.name, t.enqueued,
                       t.served, t.dropped, t.flushed, t.queued));
  }
  o.note(fmt::format("{} epoch checkpoints", epochs));
  return o;
}

Outcome consistency(const std::vector<const Run*>& runs) {
  Outcome o;
  for (const auto* r : runs) {
    // In memory: the engine's own telemetry.
    std::int64_t mismatches = 0, decisions = 0;
    for (const auto& e : r->trace.epochs)
      for (const auto& u : e.users) {
        ++decisions;
        const auto again =
            steering::decide_user(u.telemetry, sim::policy_for(r->cfg, sim::traffic_type_of(r->cfg, u.user_id)),
                                  u.user_id);
        if (!(again == u.decision)) ++mismatches;
      }
    o.check(mismatches == 0, fmt::format("{}: {} in-memory decisions differ", r->cfg.name, mismatches));

    // Offline: telemetry read back from trace.csv only.
    const auto rows = metrics::read_trace(r->dir / "trace.csv");
    sim::SimTrace offline = r->trace;
    std::size_t k = 0;
    bool shape_ok = rows.size() == decisions * kWatCount;
    for (auto& e : offline.epochs)
      for (auto& u : e.users) {
        if (!shape_ok) break;
        PerWat<steering::TelemetrySample> s;
        for (Wat w : kAllWats) s[w] = metrics::sample_of(rows[k++]);
        u.telemetry = s;
        u.decision = steering::decide_user(s, sim::policy_for(r->cfg, sim::traffic_type_of(r->cfg, u.user_id)),
                                           u.user_id);
      }
    o.check(shape_ok, r->cfg.name + ": trace has one row per user, WAT and epoch");
    if (shape_ok) {
      const auto recomputed = metrics::to_rows(offline);
      std::int64_t diff = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) diff += !(recomputed[i] == rows[i]);
      o.check(diff == 0, fmt::format("{}: {} trace rows differ after offline recompute", r->cfg.name, diff));
    }
    o.note(fmt::format("{}: {} decisions", r->cfg.name, decisions));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atsss acceptance suite"};
  std::string work_dir = (fs::temp_directory_path() / "atsss_acceptance").string();
  bool update_golden = false;
  app.add_option("--work-dir", work_dir, "Scratch directory for run outputs");
  app.add_flag("--update-golden", update_golden, "Rewrite the stored golden trace hash");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::cout << fmt::format("[{}] {}. {}: {}", o.pass ? "PASS" : "FAIL", id, name, detail) << std::endl;
  };

  report(1, "utility oracle", utility_oracle);
  report(2, "steering property suite", property_suite);
  report(3, "factory instance regressions", table1_regression);
  report(4, "zipf popularity", zipf);
  report(5, "poisson arrivals", poisson);

  const fs::path root(work_dir);
  fs::remove_all(root);
  std::optional<Run> a, b, sd;
  std::string run_error;
  try {
    a = simulate("paper-lb", root / "paper-lb-a");
    b = simulate("paper-lb", root / "paper-lb-b");
    sd = simulate("paper-sd", root / "paper-sd");
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto need_runs = [&]() {
    if (!run_error.empty()) throw std::runtime_error("simulation failed: " + run_error);
  };
  report(6, "determinism and golden trace", [&] {
    need_runs();
    return determinism(*a, *b, update_golden);
  });
  report(7, "SINR vs 5G weight on the AGV", [&] {
    need_runs();
    return sinr_weight_relation(*a);
  });
  report(8, "byte conservation", [&] {
    need_runs();
    return conservation({&*a, &*sd});
  });
  report(9, "offline decision recompute", [&] {
    need_runs();
    return consistency({&*a, &*sd});
  });

  std::cout << fmt::format("{} of 9 criteria passed", 9 - failed) << std::endl;
  return failed == 0 ? 0 : 1;
}
