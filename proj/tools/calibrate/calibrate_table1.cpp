// SPDX-License-Identifier: Apache-2.0
//
// Fits per-WAT normalization maxima and thresholds so the steering decisions
// on the three measured factory instances reproduce the measured outcomes.
// Prints the "policies" block for configs/table1.json.
//
//   atsss_calibrate_table1 [--seed N] [--generations N] [--restarts N]
#include <cmath>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <atsss/config.hpp>
#include <atsss/steering.hpp>

#include "table1_data.hpp"

using namespace atsss;
using namespace atsss::steering;

namespace {

/// Search coordinates, all in log space.
struct Range {
  double lo;
  double hi;
};

using Params = std::vector<double>;

SteeringDecision decide(const SteeringPolicy& p, int instance, bool sd) {
  return decide_user(testdata::samples(testdata::table1()[static_cast<std::size_t>(instance)], sd), p, 0);
}

double hinge(double x) { return x > 0.0 ? x : 0.0; }

// LB: per-WAT maxima (sinr, buffer, delay) x 3, then shared t_buffer, t_delay.
const std::vector<Range> kLbRanges = [] {
  std::vector<Range> r;
  for (int w = 0; w < 3; ++w) {
    r.push_back({std::log(1.0), std::log(60.0)});
    r.push_back({std::log(5.0), std::log(2000.0)});
    r.push_back({std::log(10.0), std::log(1e6)});
  }
  r.push_back({std::log(10.0), std::log(101.0)});
  r.push_back({std::log(101.0), std::log(5000.0)});
  return r;
}();

/// Rounds to 3 significant digits so the config stays readable.
double tidy(double v) {
  if (v == 0.0) return 0.0;
  const double scale = std::pow(10.0, 2 - std::floor(std::log10(std::abs(v))));
  return std::round(v * scale) / scale;
}

SteeringPolicy lb_policy(const Params& x) {
  SteeringPolicy p;
  p.mode = SteeringMode::LoadBalancing;
  p.weights = {1.0, 0.7, 0.2};
  for (Wat w : kAllWats) {
    const std::size_t k = 3 * index(w);
    p.maxima[w] = {std::exp(x[k]), std::exp(x[k + 1]), std::exp(x[k + 2])};
    p.thresholds[w] = {0.0, std::exp(x[9]), std::exp(x[10])};
  }
  return p;
}

double lb_loss(const Params& x) {
  const auto p = lb_policy(x);
  const auto da = decide(p, 0, false), db = decide(p, 1, false), dc = decide(p, 2, false);
  const auto &a = da.lb_weights, &b = db.lb_weights, &c = dc.lb_weights;
  auto U = [](const SteeringDecision& d, Wat w) { return d.breakdowns[w].overall; };
  constexpr double m = 1.0;     // ordering margin, percentage points
  constexpr double eps = 0.01;  // utility margin
  // Utility terms keep a gradient where every weight is zero.
  double pen = 0.0;
  for (Wat w : kAllWats) pen += 100.0 * hinge(eps - U(da, w));
  pen += 100.0 * (hinge(eps - U(db, Wat::FiveG)) + hinge(eps - U(db, Wat::LiFi)) + hinge(U(db, Wat::WiFi) + eps));
  pen += 100.0 * (hinge(eps - U(dc, Wat::WiFi)));
  pen += hinge(m - (a[Wat::FiveG] - a[Wat::LiFi])) + hinge(m - (a[Wat::LiFi] - a[Wat::WiFi])) +
         hinge(m - a[Wat::WiFi]);
  pen += 10.0 * b[Wat::WiFi] + hinge(std::abs(b[Wat::FiveG] - 50.0) - 1.0);
  pen += hinge(m - (c[Wat::WiFi] - c[Wat::FiveG])) + hinge(m - (c[Wat::WiFi] - c[Wat::LiFi]));
  double fit = 0.0;
  for (Wat w : kAllWats) {
    fit += std::pow(a[w] - testdata::table1()[0].lb_weights[w], 2);
    fit += std::pow(c[w] - testdata::table1()[2].lb_weights[w], 2);
  }
  return 1000.0 * pen + fit / 100.0;
}

// SD: shared maxima (sinr, buffer, delay), then t_buffer, t_delay.
const std::vector<Range> kSdRanges{{std::log(1.0), std::log(60.0)},   {std::log(5.0), std::log(2000.0)},
                                   {std::log(5.0), std::log(5000.0)}, {std::log(10.0), std::log(200.0)},
                                   {std::log(5.0), std::log(200.0)}};

SteeringPolicy sd_policy(const Params& x) {
  SteeringPolicy p;
  p.mode = SteeringMode::SplitDuplicate;
  p.weights = {0.5, 0.2, 1.0};
  p.maxima = PerWat<NormalizationMaxima>::filled({std::exp(x[0]), std::exp(x[1]), std::exp(x[2])});
  p.thresholds = PerWat<ParamThresholds>::filled({0.0, std::exp(x[3]), std::exp(x[4])});
  return p;
}

double sd_loss(const Params& x) {
  const auto p = sd_policy(x);
  constexpr double eps = 0.02;  // utility margin on both sides of zero
  double pen = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto d = decide(p, i, true);
    for (Wat w : kAllWats) {
      const double u = d.breakdowns[w].overall;
      const bool want = testdata::table1()[static_cast<std::size_t>(i)].sd_selection[w];
      pen += want ? hinge(eps - u) : (d.breakdowns[w].eligible ? hinge(u + eps) : 0.0);
    }
  }
  return pen;
}

Params tidy(Params x) {
  for (auto& v : x) v = std::log(tidy(std::exp(v)));
  return x;
}

Params refine(Params best, const std::vector<Range>& ranges, double (*loss)(const Params&)) {
  double best_loss = loss(best);
  for (double step = 0.5; step > 1e-4; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t k = 0; k < best.size(); ++k)
        for (double dir : {-1.0, 1.0}) {
          Params y = best;
          y[k] = std::clamp(y[k] + dir * step, ranges[k].lo, ranges[k].hi);
          const double l = loss(y);
          if (l < best_loss) {
            best_loss = l;
            best = y;
            improved = true;
          }
        }
    }
  }
  return best;
}

/// Differential evolution (rand/1/bin) followed by coordinate refinement and
/// rounding. Each restart keeps its result if the rounded parameters score best.
Params search(const std::vector<Range>& ranges, double (*loss)(const Params&), std::mt19937_64& gen,
              int generations, int restarts) {
  constexpr std::size_t kPop = 60;
  constexpr double kF = 0.7, kCr = 0.9;
  const std::size_t dim = ranges.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, kPop - 1), pick_dim(0, dim - 1);

  Params best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<Params> pop(kPop, Params(dim));
    std::vector<double> cost(kPop);
    for (std::size_t i = 0; i < kPop; ++i) {
      for (std::size_t k = 0; k < dim; ++k) pop[i][k] = ranges[k].lo + u(gen) * (ranges[k].hi - ranges[k].lo);
      cost[i] = loss(pop[i]);
    }
    for (int g = 0; g < generations; ++g)
      for (std::size_t i = 0; i < kPop; ++i) {
        std::size_t a, b, c;
        do a = pick(gen); while (a == i);
        do b = pick(gen); while (b == i || b == a);
        do c = pick(gen); while (c == i || c == a || c == b);
        Params trial = pop[i];
        const std::size_t forced = pick_dim(gen);
        for (std::size_t k = 0; k < dim; ++k)
          if (k == forced || u(gen) < kCr)
            trial[k] = std::clamp(pop[a][k] + kF * (pop[b][k] - pop[c][k]), ranges[k].lo, ranges[k].hi);
        const double l = loss(trial);
        if (l <= cost[i]) {
          pop[i] = std::move(trial);
          cost[i] = l;
        }
      }
    const auto winner = std::min_element(cost.begin(), cost.end()) - cost.begin();
    const auto cand = tidy(refine(pop[static_cast<std::size_t>(winner)], ranges, loss));
    const double l = loss(cand);
    if (l < best_loss) {
      best_loss = l;
      best = cand;
    }
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrates the factory-instance steering policies"};
  std::uint64_t seed = 1;
  int generations = 1500;
  int restarts = 4;
  app.add_option("--seed", seed, "Search seed");
  app.add_option("--generations", generations, "Differential evolution generations")->check(CLI::PositiveNumber);
  app.add_option("--restarts", restarts, "Independent evolution runs")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 gen(seed);
  const auto lb_x = search(kLbRanges, lb_loss, gen, generations, restarts);
  const auto sd_x = search(kSdRanges, sd_loss, gen, generations, restarts);
  std::cerr << fmt::format("loss LB {:.4g}, SD {:.4g}\n", lb_loss(lb_x), sd_loss(sd_x));
  const auto lb = lb_policy(lb_x);
  const auto sd = sd_policy(sd_x);

  for (int i = 0; i < 3; ++i) {
    const auto a = decide(lb, i, false);
    const auto b = decide(sd, i, true);
    std::cerr << fmt::format("instance {}: LB {:.1f}/{:.1f}/{:.1f}  SD {}{}{}\n", i + 1, a.lb_weights[Wat::FiveG],
                             a.lb_weights[Wat::WiFi], a.lb_weights[Wat::LiFi], b.sd_selection[Wat::FiveG] ? "5G " : "",
                             b.sd_selection[Wat::WiFi] ? "WiFi " : "", b.sd_selection[Wat::LiFi] ? "LiFi" : "");
  }
  auto strip = [](nlohmann::json j) {
    j.erase("composite_threshold");
    for (auto& group : {"maxima", "thresholds"})
      for (auto& wat : j[group])
        for (auto& v : wat) v = std::stod(fmt::format("{:.3g}", v.get<double>()));
    return j;
  };
  const nlohmann::json out{{"eMBB", strip(config::policy_to_json(lb))}, {"URLLC", strip(config::policy_to_json(sd))}};
  std::cout << out.dump(2) << '\n';
  return 0;
}
