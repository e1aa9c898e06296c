// Copyright 2026 The Shimguard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "shimguard/wormsim.h"

namespace shimguard {
namespace {

// Closed-form stage arithmetic for the staged compromise.
double oracle_total(const StageTimings& t, std::size_t nodes) {
  const double host = t.exploit_send + t.download + t.restart_sleep + t.hop_overhead / 2;
  const double controller = host + t.hop_overhead / 2;
  if (nodes == 1) return controller;
  return controller + t.controller_restore + t.download + t.restart_sleep +
         t.hop_overhead / 2;
}

TEST(Worm, ControllerShellAtTwentyOneSeconds) {
  const WormTimeline tl = simulate({1, 0}, {});
  EXPECT_EQ(tl.shell_time(1), 21.0);
  EXPECT_EQ(tl.shell_time(0), 18.0);
  EXPECT_EQ(tl.total_compromise_time, 21.0);
}

TEST(Worm, HundredNodesUnderHundredSeconds) {
  const WormTimeline tl = simulate({100, 0}, {});
  EXPECT_LE(tl.total_compromise_time, 100.0);
  EXPECT_EQ(tl.total_compromise_time, 99.0);
  for (std::size_t n = 0; n <= 100; ++n) ASSERT_TRUE(tl.shell_time(n).has_value());
}

TEST(Worm, ZeroTimings) {
  StageTimings t{0, 0, 0, 0, 0, 0};
  const WormTimeline tl = simulate({5, 2}, t);
  EXPECT_EQ(tl.total_compromise_time, 0.0);
  // Staged order: host shell, controller shell, fan-out, remaining hosts.
  std::vector<std::pair<std::size_t, WormEvent>> order;
  for (const auto& e : tl.events) order.emplace_back(e.node, e.event);
  auto pos = [&](std::size_t node, WormEvent ev) {
    return std::find(order.begin(), order.end(), std::make_pair(node, ev)) - order.begin();
  };
  EXPECT_LT(pos(2, WormEvent::kShellObtained), pos(5, WormEvent::kShellObtained));
  EXPECT_LT(pos(5, WormEvent::kShellObtained), pos(5, WormEvent::kFanoutStarted));
  for (std::size_t n : {0u, 1u, 3u, 4u}) {
    EXPECT_LT(pos(5, WormEvent::kFanoutStarted), pos(n, WormEvent::kShellObtained));
  }
}

TEST(Worm, TimelineInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> sec(0.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    StageTimings t{sec(rng), sec(rng), sec(rng), sec(rng), sec(rng), sec(rng)};
    const std::size_t n = 1 + rng() % 40;
    const WormTimeline tl = simulate({n, rng() % n}, t);
    for (std::size_t k = 1; k < tl.events.size(); ++k) {
      ASSERT_LE(tl.events[k - 1].time_s, tl.events[k].time_s);
    }
    std::vector<int> shells(n + 1, 0);
    double latest = 0.0;
    for (const auto& e : tl.events) {
      if (e.event == WormEvent::kShellObtained) {
        ++shells[e.node];
        latest = std::max(latest, e.time_s);
      }
    }
    for (int c : shells) ASSERT_EQ(c, 1);
    ASSERT_EQ(tl.total_compromise_time, latest);
    ASSERT_DOUBLE_EQ(tl.total_compromise_time, oracle_total(t, n));
    ASSERT_EQ(tl, simulate({n, tl.events[0].node}, t));
  }
}

TEST(Worm, MonotoneInEveryTiming) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> sec(0.0, 30.0);
  const std::pair<const char*, double StageTimings::*> fields[] = {
      {"exploit_send", &StageTimings::exploit_send},
      {"download", &StageTimings::download},
      {"restart_sleep", &StageTimings::restart_sleep},
      {"hop_overhead", &StageTimings::hop_overhead},
      {"controller_restore", &StageTimings::controller_restore},
      {"dos_outage", &StageTimings::dos_outage}};
  for (int i = 0; i < 300; ++i) {
    StageTimings t{sec(rng), sec(rng), sec(rng), sec(rng), sec(rng), sec(rng)};
    const std::size_t n = 1 + rng() % 5;
    const double base = simulate({n, 0}, t).total_compromise_time;
    for (const auto& [name, field] : fields) {
      StageTimings bumped = t;
      bumped.set(name, t.*field + sec(rng));
      ASSERT_GE(simulate({n, 0}, bumped).total_compromise_time, base) << name;
    }
  }
}

TEST(Worm, FanoutIndependentOfNodeCount) {
  const double two = simulate({2, 0}, {}).total_compromise_time;
  for (std::size_t n : {3u, 10u, 100u, 1000u}) {
    EXPECT_EQ(simulate({n, n - 1}, {}).total_compromise_time, two);
  }
}

TEST(Worm, CsvShape) {
  const std::string csv = timeline_csv(simulate({1, 0}, {}));
  EXPECT_EQ(csv.rfind("time_s,node,event\n0,compute-0,ExploitSent\n", 0), 0u);
  EXPECT_NE(csv.find("21,controller,ShellObtained\n"), std::string::npos);
  EXPECT_NE(csv.find("\ntotal_compromise_time_s=21\n"), std::string::npos);
}

TEST(Worm, Validation) {
  EXPECT_THROW(simulate({0, 0}, {}), std::invalid_argument);
  EXPECT_THROW(simulate({3, 3}, {}), std::invalid_argument);
  StageTimings t;
  EXPECT_THROW(t.set("download", -1), std::invalid_argument);
  EXPECT_THROW(t.set("warp", 1), std::invalid_argument);
}

TEST(Dos, SingleAttack) {
  const auto out = simulate_dos({1, 0}, {}, 1);
  ASSERT_EQ(out[0].intervals.size(), 1u);
  EXPECT_EQ(out[0].intervals[0], (OutageInterval{0, 4.5}));
  EXPECT_EQ(out[0].total_s, 4.5);
}

TEST(Dos, BackToBackRepeatsMerge) {
  const auto two = simulate_dos({1, 0}, {}, std::vector<double>{0.0, 4.5});
  ASSERT_EQ(two[0].intervals.size(), 1u);
  EXPECT_EQ(two[0].total_s, 9.0);
  for (std::size_t k = 1; k <= 50; ++k) {
    const auto r = simulate_dos({1, 0}, {}, k);
    ASSERT_EQ(r[0].intervals.size(), 1u);
    ASSERT_DOUBLE_EQ(r[0].total_s, 4.5 * static_cast<double>(k));
  }
}

TEST(Dos, OverlappingRepeatsMerge) {
  const auto r = simulate_dos({1, 0}, {}, std::vector<double>{2.0, 0.0});
  ASSERT_EQ(r[0].intervals.size(), 1u);
  EXPECT_EQ(r[0].intervals[0], (OutageInterval{0, 6.5}));
}

TEST(Dos, OnlyTheTargetedHostIsDown) {
  const auto r = simulate_dos({4, 2}, {}, std::vector<double>{0.0, 10.0});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[2].intervals.size(), 2u);
  EXPECT_EQ(r[2].total_s, 9.0);
  for (std::size_t n : {0u, 1u, 3u}) EXPECT_TRUE(r[n].intervals.empty());
}

TEST(Dos, MergeMatchesCoverageOracle) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    std::vector<OutageInterval> ivs;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) {
      const double s = static_cast<double>(rng() % 40);
      ivs.push_back({s, s + static_cast<double>(1 + rng() % 6)});
    }
    // Unit-grid coverage count works because every endpoint is an integer.
    std::vector<bool> cover(60, false);
    for (const auto& iv : ivs) {
      for (int x = static_cast<int>(iv.start_s); x < static_cast<int>(iv.end_s); ++x) {
        cover[x] = true;
      }
    }
    const auto merged = merge_intervals(ivs);
    double total = 0;
    for (std::size_t k = 0; k < merged.size(); ++k) {
      total += merged[k].length();
      if (k) {
        ASSERT_GT(merged[k].start_s, merged[k - 1].end_s);
      }
    }
    ASSERT_EQ(total, static_cast<double>(std::count(cover.begin(), cover.end(), true)));
  }
}

}  // namespace
}  // namespace shimguard
