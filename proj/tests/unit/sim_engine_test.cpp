// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include <atsss/config.hpp>
#include <atsss/error.hpp>
#include <atsss/metrics_io.hpp>
#include <atsss/sim_engine.hpp>

using namespace atsss;
using namespace atsss::sim;

namespace {

SimConfig shipped(const std::string& name, double duration_s) {
  auto cfg = config::load_config(std::string(ATSSS_TEST_CONFIG_DIR) + "/" + name + ".json");
  cfg.duration_s = duration_s;
  return cfg;
}

std::string text(const SimTrace& t) { return metrics::trace_text(metrics::to_rows(t)); }

}  // namespace

TEST(Run, Deterministic) {
  const auto cfg = shipped("paper-lb", 30);
  const auto a = run(cfg);
  const auto b = run(cfg);
  EXPECT_EQ(text(a), text(b));
  EXPECT_EQ(a.flows, b.flows);
  EXPECT_EQ(a.summary.totals, b.summary.totals);
}

TEST(Run, SeedMatters) {
  auto cfg = shipped("paper-lb", 30);
  const auto a = run(cfg);
  cfg.seed = 7;
  EXPECT_NE(text(a), text(run(cfg)));
}

TEST(Run, ZeroDurationGivesEmptyTrace) {
  const auto t = run(shipped("paper-lb", 0));
  EXPECT_TRUE(t.epochs.empty());
  EXPECT_EQ(t.summary.epochs, 0);
  EXPECT_TRUE(t.summary.totals.balanced());
  EXPECT_EQ(t.summary.seed, 42u);
}

TEST(Run, InvalidConfigRejectedBeforeStepping) {
  auto cfg = shipped("paper-lb", 10);
  cfg.dt_s = 0.3;
  cfg.delay_cap_ms = -1;
  try {
    run(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.violations().size(), 2u);
  }
  cfg = shipped("paper-lb", 10);
  cfg.policies.erase(traffic::TrafficType::eMBB);
  EXPECT_THROW(run(cfg), ConfigError);
}

TEST(Run, EpochRecordsAreWellFormed) {
  const auto cfg = shipped("paper-lb", 40);
  const auto t = run(cfg);
  ASSERT_EQ(t.epochs.size(), 40u);
  const std::size_t users = cfg.layout.static_users.size() + 1;
  for (std::size_t m = 0; m < t.epochs.size(); ++m) {
    const auto& e = t.epochs[m];
    EXPECT_DOUBLE_EQ(e.timestamp_s, static_cast<double>(m) * cfg.decision_epoch_s);
    ASSERT_EQ(e.users.size(), users);
    EXPECT_EQ(e.users.front().user_id, kAgvUserId);
    EXPECT_EQ(e.node_buffer_pct.size(), cfg.layout.nodes.size());
    EXPECT_TRUE(e.totals.balanced());
    for (double b : e.node_buffer_pct) {
      EXPECT_GE(b, 0.0);
      EXPECT_LE(b, 100.0);
    }
    for (const auto& u : e.users) {
      if (u.decision.mode != steering::SteeringMode::LoadBalancing || u.decision.degenerate) continue;
      double sum = 0;
      for (double w : u.decision.lb_weights) sum += w;
      EXPECT_NEAR(sum, 100.0, 0.5);
    }
  }
  EXPECT_TRUE(t.summary.totals.balanced());
  EXPECT_GE(t.summary.totals.enqueued, t.epochs.back().totals.enqueued);  // steps after the last epoch count too
}

TEST(Run, DecisionsRecomputeFromTelemetry) {
  for (const char* name : {"paper-lb", "paper-sd", "table1"}) {
    const auto cfg = shipped(name, 20);
    const auto t = run(cfg);
    for (const auto& e : t.epochs)
      for (const auto& u : e.users) {
        const auto again = steering::decide_user(u.telemetry, policy_for(cfg, u.traffic_type), u.user_id);
        ASSERT_EQ(again, u.decision) << name << " t=" << e.timestamp_s << " user " << u.user_id;
      }
  }
}

TEST(Run, AgvModeFollowsTrafficType) {
  const auto lb = run(shipped("paper-lb", 5));
  const auto sd = run(shipped("paper-sd", 5));
  EXPECT_EQ(lb.epochs[0].users[0].decision.mode, steering::SteeringMode::LoadBalancing);
  EXPECT_EQ(sd.epochs[0].users[0].decision.mode, steering::SteeringMode::SplitDuplicate);
  EXPECT_EQ(sd.epochs[0].users[1].decision.mode, steering::SteeringMode::LoadBalancing);
}

TEST(Run, AgvOnlyWithoutBackground) {
  auto cfg = shipped("paper-lb", 30);
  cfg.layout.static_users.clear();
  cfg.requests = traffic::RequestStream{};
  const auto t = run(cfg);
  ASSERT_EQ(t.epochs.size(), 30u);
  EXPECT_EQ(t.epochs[0].users.size(), 1u);
  EXPECT_EQ(t.summary.requests, 0);
  EXPECT_GT(t.epochs.back().users[0].delivered_bytes, 0);
}

TEST(Run, ReplayedRequestsAreUsed) {
  auto cfg = shipped("paper-lb", 10);
  cfg.requests = traffic::RequestStream{};
  EXPECT_EQ(run(cfg).summary.requests, 0);
}

TEST(Sweep, EmptyGrid) {
  EXPECT_TRUE(SweepGrid{}.points().empty());
  EXPECT_TRUE(sweep(shipped("paper-lb", 5), SweepGrid{}).empty());
}

TEST(Sweep, SinglePointEqualsRun) {
  const auto base = shipped("paper-lb", 15);
  SweepGrid grid;
  grid.normalized_thresholds = {0.4};
  const auto res = sweep(base, grid);
  ASSERT_EQ(res.size(), 1u);
  ASSERT_TRUE(res[0].trace) << res[0].error;
  const auto cfg = sweep_point_config(base, grid, grid.points()[0], 0);
  EXPECT_EQ(res[0].config, cfg);
  EXPECT_NE(cfg.seed, base.seed);
  EXPECT_EQ(text(*res[0].trace), text(run(cfg)));
}

TEST(Sweep, ThreadsDoNotChangeResults) {
  const auto base = shipped("paper-lb", 10);
  SweepGrid grid;
  grid.normalized_thresholds = {0.2, 0.5, 0.8};
  grid.weight_sets = {{1, 0.7, 0.2}, {1, 1, 1}};
  std::vector<std::size_t> seen;
  const auto serial = sweep(base, grid, 1);
  const auto parallel = sweep(base, grid, 4, [&](const SweepResult& r) { seen.push_back(r.index); });
  ASSERT_EQ(serial.size(), 6u);
  ASSERT_EQ(parallel.size(), 6u);
  EXPECT_EQ(seen.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(serial[i].index, i);
    EXPECT_EQ(serial[i].point.label(), parallel[i].point.label());
    ASSERT_TRUE(serial[i].trace && parallel[i].trace);
    EXPECT_EQ(text(*serial[i].trace), text(*parallel[i].trace));
  }
}

TEST(Sweep, FailuresAreCapturedPerPoint) {
  const auto base = shipped("paper-lb", 5);
  SweepGrid grid;
  grid.normalized_thresholds = {0.5, -0.5};
  const auto res = sweep(base, grid, 2);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_TRUE(res[0].trace);
  EXPECT_FALSE(res[1].trace);
  EXPECT_FALSE(res[1].error.empty());
}

TEST(Sweep, RaisingBufferThresholdNeverShrinksEligibility) {
  const auto t = run(shipped("paper-lb", 20));
  const auto policy = policy_for(shipped("paper-lb", 0), traffic::TrafficType::eMBB);
  for (const auto& e : t.epochs)
    for (const auto& u : e.users)
      for (Wat w : kAllWats) {
        auto th = policy.thresholds[w];
        bool prev = steering::eligibility(u.telemetry[w], th);
        for (double tb : {10.0, 30.0, 60.0, 90.0, 100.0, 101.0}) {
          if (tb < th.buffer_pct) continue;
          th.buffer_pct = tb;
          const bool now = steering::eligibility(u.telemetry[w], th);
          EXPECT_TRUE(!prev || now);
          prev = now;
        }
      }
}
