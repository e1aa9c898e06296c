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

#include "shimguard/bench.h"

namespace shimguard {
namespace {

BenchConfig small(PathMode mode) {
  BenchConfig c = BenchConfig::ci_scaled(mode);
  c.duration_s = 0.2;
  c.latency_count = 2500;
  c.warmup_drop = 500;
  return c;
}

TEST(Summarize, KnownSamples) {
  const SampleStats s = summarize({5, 1, 4, 2, 3});
  EXPECT_EQ(s.median, 3.0);
  EXPECT_EQ(s.p95, 5.0);
  EXPECT_DOUBLE_EQ(s.variance, 2.0);
  const SampleStats even = summarize({4, 1, 3, 2});
  EXPECT_EQ(even.median, 2.5);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  EXPECT_EQ(summarize(hundred).p95, 95.0);
  EXPECT_EQ(summarize({}).median, 0.0);
}

TEST(Bench, LatencyWarmupLeavesOneSample) {
  BenchConfig c = small(PathMode::kAllFastPath);
  c.packet_sizes = {44};
  c.latency_count = 501;
  c.warmup_drop = 500;
  SwitchState s(bench_rules());
  const BenchResult r = run_latency(c, s);
  ASSERT_EQ(r.latency.size(), 1u);
  EXPECT_EQ(r.latency[0].size_b, 44u);
  EXPECT_EQ(r.latency[0].samples, 1u);
}

TEST(Bench, ZeroRateYieldsNoRecords) {
  BenchConfig c = small(PathMode::kAllSlowPath);
  c.rates_pps = {0};
  SwitchState s(bench_rules());
  EXPECT_TRUE(run_throughput(c, s).rates.empty());
}

TEST(Bench, SlowPathUpcallsEveryPacket) {
  BenchConfig c = small(PathMode::kAllSlowPath);
  c.rates_pps = {10000};
  c.duration_s = 1.0;
  SwitchState s(bench_rules());
  const BenchResult r = run_throughput(c, s);
  ASSERT_EQ(r.rates.size(), 1u);
  EXPECT_EQ(r.rates[0].offered, 10000u);
  EXPECT_EQ(s.stats().slow_path_upcalls, r.rates[0].offered - r.rates[0].shortfall -
                                             (r.rates[0].dropped - s.stats().drops));
  EXPECT_EQ(s.stats().slow_path_upcalls, 10000u);
  EXPECT_EQ(s.stats().fast_path_hits, 0u);
}

TEST(Bench, FastPathNeverUpcalls) {
  BenchConfig c = small(PathMode::kAllFastPath);
  c.rates_pps = {50000};
  SwitchState s(bench_rules());
  const BenchResult r = run_throughput(c, s);
  EXPECT_EQ(s.stats().slow_path_upcalls, 0u);
  EXPECT_EQ(r.rates[0].loss_fraction, 0.0);
}

TEST(Bench, RateRecordsConserve) {
  for (PathMode m : {PathMode::kAllSlowPath, PathMode::kAllFastPath}) {
    BenchConfig c = small(m);
    SwitchState s(bench_rules());
    const BenchResult r = run_throughput(c, s);
    ASSERT_EQ(r.rates.size(), 10u);
    for (const RateRecord& rec : r.rates) {
      EXPECT_EQ(rec.offered, rec.forwarded + rec.dropped + rec.shortfall);
      EXPECT_LE(rec.forwarded_pps, static_cast<double>(rec.offered_pps));
      EXPECT_GE(rec.loss_fraction, 0.0);
      EXPECT_LE(rec.loss_fraction, 1.0);
    }
  }
}

TEST(Bench, FastPathIsNoWorseThanSlowPath) {
  SwitchState s(bench_rules());
  const BenchConfig slow_cfg = small(PathMode::kAllSlowPath);
  const BenchConfig fast_cfg = small(PathMode::kAllFastPath);
  const BenchResult slow_lat = run_latency(slow_cfg, s);
  const BenchResult fast_lat = run_latency(fast_cfg, s);
  ASSERT_EQ(slow_lat.latency.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_LE(fast_lat.latency[i].median_us, slow_lat.latency[i].median_us)
        << fast_lat.latency[i].size_b;
  }
  const BenchResult slow_tp = run_throughput(slow_cfg, s);
  const BenchResult fast_tp = run_throughput(fast_cfg, s);
  for (std::size_t i = 0; i < slow_tp.rates.size(); ++i) {
    EXPECT_LE(fast_tp.rates[i].loss_fraction, slow_tp.rates[i].loss_fraction);
  }
}

TEST(Bench, CsvSchema) {
  BenchResult r;
  r.mode = PathMode::kAllSlowPath;
  r.rates.push_back({10000, 50000, 49000, 1000, 0, 9800.0, 0.02, false});
  r.latency.push_back({44, 10000, 1.5, 2.25, 0.125});
  EXPECT_EQ(throughput_csv(r),
            "mode,rate_pps,offered,forwarded,loss_fraction\n"
            "slow,10000,50000,49000,0.020000\n");
  EXPECT_EQ(latency_csv(r),
            "mode,size_b,median_us,p95_us,variance_us2\n"
            "slow,44,1.5000,2.2500,0.125000\n");
}

TEST(Bench, ConfigValidation) {
  BenchConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.rates_pps.front(), 10000u);
  EXPECT_EQ(c.rates_pps.back(), 100000u);
  EXPECT_EQ(c.duration_s, 120.0);
  EXPECT_EQ(BenchConfig::ci_scaled(PathMode::kAllFastPath).duration_s, 5.0);
  c.warmup_drop = c.latency_count;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = BenchConfig{};
  c.rates_pps = {20000, 10000};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = BenchConfig{};
  c.packet_sizes = {41};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace shimguard
