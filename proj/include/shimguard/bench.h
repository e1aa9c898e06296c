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

// Slow-path vs fast-path measurement of this switch's own pipeline:
// a pps sweep of 60-octet UDP frames for throughput/loss, and a packet-size
// sweep for per-packet forwarding latency.
//
// Throughput replay is single-threaded. Arrivals follow the offered rate on a
// virtual schedule; each packet's service time is measured on the real
// clock around process(), and a bounded ingress queue (a NIC ring) decides
// loss. Nothing is sent on a network.

#ifndef SHIMGUARD_BENCH_H_
#define SHIMGUARD_BENCH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shimguard/extract.h"
#include "shimguard/flowtable.h"

namespace shimguard {

enum class PathMode { kAllSlowPath, kAllFastPath };

std::string_view to_string(PathMode mode);  // "slow" / "fast"
std::optional<PathMode> path_mode_from_string(std::string_view name);

struct BenchConfig {
  PathMode path_mode = PathMode::kAllFastPath;
  std::vector<std::uint64_t> rates_pps = {10000, 20000, 30000, 40000, 50000,
                                          60000, 70000, 80000, 90000, 100000};
  double duration_s = 120.0;
  std::vector<std::size_t> packet_sizes = {44, 512, 1500, 2048, 9000};
  std::size_t latency_count = 10500;
  std::size_t warmup_drop = 500;
  double interval_ms = 100.0;

  std::size_t throughput_frame_size = 60;
  std::size_t queue_capacity = 1024;
  std::uint64_t seed = 1;
  ParserProfile profile;

  // 5 s per rate and back-to-back latency probes.
  static BenchConfig ci_scaled(PathMode mode);
  void validate() const;
};

struct RateRecord {
  std::uint64_t offered_pps = 0;
  std::uint64_t offered = 0;
  std::uint64_t forwarded = 0;
  std::uint64_t dropped = 0;    // ring overflow plus switch drops
  std::uint64_t shortfall = 0;  // packets the generator could not produce
  double forwarded_pps = 0.0;
  double loss_fraction = 0.0;   // of the packets that reached the switch
  bool rate_unachievable = false;
};

struct LatencyRecord {
  std::size_t size_b = 0;
  std::size_t samples = 0;
  double median_us = 0.0;
  double p95_us = 0.0;
  double variance_us2 = 0.0;
};

struct BenchResult {
  PathMode mode = PathMode::kAllFastPath;
  std::vector<RateRecord> rates;
  std::vector<LatencyRecord> latency;
  std::vector<std::string> warnings;  // e.g. RateUnachievable(120000)
};

// Rule table used by both modes: one allow rule the fast-path flow matches,
// a block of ACL drops, and a low-priority catch-all output.
std::vector<Rule> bench_rules();
UdpFlow bench_fast_flow();

// Prepares `state` for the mode: slow path disables the megaflow cache,
// fast path enables it and installs the fast flow's entry.
void prepare_state(const BenchConfig& config, SwitchState& state);

BenchResult run_throughput(const BenchConfig& config, SwitchState& state);
BenchResult run_latency(const BenchConfig& config, SwitchState& state);

struct SampleStats {
  double median = 0.0;
  double p95 = 0.0;
  double variance = 0.0;
};
// Median of the two middle values for even counts, nearest-rank p95,
// population variance. Empty input gives zeros.
SampleStats summarize(std::vector<double> samples);

std::string throughput_csv(const BenchResult& result, bool header = true);
std::string latency_csv(const BenchResult& result, bool header = true);

}  // namespace shimguard

#endif  // SHIMGUARD_BENCH_H_
