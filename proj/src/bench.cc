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

#include "shimguard/bench.h"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>
#include <thread>

namespace shimguard {
namespace {

using Clock = std::chrono::steady_clock;

constexpr PortId kIngressPort = 1;
constexpr PortId kEgressPort = 2;
constexpr std::uint16_t kFastFlowPort = 5001;
constexpr std::size_t kSlowPoolSize = 4096;

double micros(Clock::duration d) {
  return std::chrono::duration<double, std::micro>(d).count();
}

UdpFlow random_flow(std::mt19937_64& rng) {
  UdpFlow f;
  const std::uint64_t mac = rng();
  for (std::size_t i = 0; i < 6; ++i) {
    f.src_mac[i] = static_cast<std::uint8_t>(mac >> (8 * i));
  }
  f.src_mac[0] &= 0xFE;  // unicast
  f.src_ip = static_cast<std::uint32_t>(rng());
  f.dst_ip = static_cast<std::uint32_t>(rng());
  f.src_port = static_cast<std::uint16_t>(rng());
  f.dst_port = static_cast<std::uint16_t>(rng());
  return f;
}

// Pre-built replay pool plus the measured cost of producing one frame.
struct FramePool {
  std::vector<RawFrame> frames;
  double cost_s = 0.0;
};

FramePool make_pool(PathMode mode, std::size_t frame_size, std::size_t count,
                    std::mt19937_64& rng) {
  FramePool pool;
  const auto t0 = Clock::now();
  if (mode == PathMode::kAllFastPath) {
    pool.frames.push_back(build_udp_frame(bench_fast_flow(), frame_size));
  } else {
    pool.frames.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      pool.frames.push_back(build_udp_frame(random_flow(rng), frame_size));
    }
  }
  pool.cost_s = std::chrono::duration<double>(Clock::now() - t0).count() /
                static_cast<double>(pool.frames.size());
  return pool;
}

}  // namespace

std::string_view to_string(PathMode mode) {
  return mode == PathMode::kAllSlowPath ? "slow" : "fast";
}

std::optional<PathMode> path_mode_from_string(std::string_view name) {
  if (name == "slow") return PathMode::kAllSlowPath;
  if (name == "fast") return PathMode::kAllFastPath;
  return std::nullopt;
}

BenchConfig BenchConfig::ci_scaled(PathMode mode) {
  BenchConfig c;
  c.path_mode = mode;
  c.duration_s = 5.0;
  c.interval_ms = 0.0;
  return c;
}

void BenchConfig::validate() const {
  if (warmup_drop >= latency_count) {
    throw std::invalid_argument("warmup_drop must be below latency_count");
  }
  if (!std::is_sorted(rates_pps.begin(), rates_pps.end())) {
    throw std::invalid_argument("rates must be ascending");
  }
  if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(interval_ms >= 0.0)) throw std::invalid_argument("interval must be >= 0");
  if (queue_capacity == 0) throw std::invalid_argument("queue capacity must be positive");
  for (std::size_t s : packet_sizes) {
    if (s < kUdpFrameOverhead) {
      throw std::invalid_argument(fmt::format(
          "packet size {} below the {}-octet UDP minimum", s, kUdpFrameOverhead));
    }
  }
}

UdpFlow bench_fast_flow() {
  UdpFlow f;
  f.dst_port = kFastFlowPort;
  return f;
}

std::vector<Rule> bench_rules() {
  std::vector<Rule> rules;
  Rule allow;
  allow.priority = 100;
  allow.match = {{FlowField::kIpProto, kIpProtoUdp}, {FlowField::kL4Dst, kFastFlowPort}};
  allow.actions = {action::Output{kEgressPort}};
  rules.push_back(allow);
  // Blocklisted sources in 192.168.66.0/28.
  for (std::uint32_t i = 0; i < 16; ++i) {
    Rule deny;
    deny.priority = 50;
    deny.match = {{FlowField::kEthType, kEthTypeIpv4},
                  {FlowField::kIpSrc, 0xC0A84200u + i}};
    deny.actions = {action::Drop{}};
    rules.push_back(deny);
  }
  Rule fallback;
  fallback.priority = 1;
  fallback.actions = {action::Output{kEgressPort}};
  rules.push_back(fallback);
  return rules;
}

void prepare_state(const BenchConfig& config, SwitchState& state) {
  state.set_megaflow_enabled(config.path_mode == PathMode::kAllFastPath);
  state.flush_caches();
  if (config.path_mode == PathMode::kAllFastPath) {
    state.process(build_udp_frame(bench_fast_flow(), config.throughput_frame_size),
                  kIngressPort, config.profile);
  }
  state.reset_stats();
}

BenchResult run_throughput(const BenchConfig& config, SwitchState& state) {
  config.validate();
  BenchResult result;
  result.mode = config.path_mode;
  std::mt19937_64 rng(config.seed);

  for (std::uint64_t rate : config.rates_pps) {
    if (rate == 0) continue;
    prepare_state(config, state);
    const FramePool pool =
        make_pool(config.path_mode, config.throughput_frame_size, kSlowPoolSize, rng);

    RateRecord rec;
    rec.offered_pps = rate;
    rec.offered = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(rate) * config.duration_s));
    const double max_gen_pps = pool.cost_s > 0.0 ? 1.0 / pool.cost_s : 1e300;
    double send_pps = static_cast<double>(rate);
    if (max_gen_pps < send_pps) {
      rec.rate_unachievable = true;
      send_pps = max_gen_pps;
      const auto producible =
          static_cast<std::uint64_t>(std::floor(max_gen_pps * config.duration_s));
      rec.shortfall = rec.offered - std::min(rec.offered, producible);
      result.warnings.push_back(fmt::format("RateUnachievable({})", rate));
    }
    const std::uint64_t sent = rec.offered - rec.shortfall;

    // Departure times (virtual seconds) of packets still in the ring.
    std::deque<double> in_flight;
    double last_departure = 0.0;
    for (std::uint64_t i = 0; i < sent; ++i) {
      const double arrival = static_cast<double>(i) / send_pps;
      while (!in_flight.empty() && in_flight.front() <= arrival) in_flight.pop_front();
      if (in_flight.size() >= config.queue_capacity) {
        ++rec.dropped;
        continue;
      }
      const RawFrame& frame = pool.frames[i % pool.frames.size()];
      const auto t0 = Clock::now();
      const ProcessResult r = state.process(frame, kIngressPort, config.profile);
      const double service =
          std::chrono::duration<double>(Clock::now() - t0).count();
      last_departure = std::max(arrival, last_departure) + service;
      in_flight.push_back(last_departure);
      if (r.disposition.kind == Disposition::Kind::kForwarded) {
        ++rec.forwarded;
      } else {
        ++rec.dropped;
      }
    }
    rec.forwarded_pps = static_cast<double>(rec.forwarded) / config.duration_s;
    rec.loss_fraction =
        sent == 0 ? 0.0
                  : static_cast<double>(sent - rec.forwarded) / static_cast<double>(sent);
    result.rates.push_back(rec);
  }
  return result;
}

SampleStats summarize(std::vector<double> samples) {
  SampleStats s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  s.median = n % 2 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = samples[std::max<std::size_t>(rank, 1) - 1];
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  for (double v : samples) s.variance += (v - mean) * (v - mean);
  s.variance /= static_cast<double>(n);
  return s;
}

BenchResult run_latency(const BenchConfig& config, SwitchState& state) {
  config.validate();
  BenchResult result;
  result.mode = config.path_mode;
  std::mt19937_64 rng(config.seed);
  const auto interval = std::chrono::duration<double, std::milli>(config.interval_ms);

  for (std::size_t size : config.packet_sizes) {
    prepare_state(config, state);
    const RawFrame fast = build_udp_frame(bench_fast_flow(), size);
    if (config.path_mode == PathMode::kAllFastPath) {
      state.process(fast, kIngressPort, config.profile);
    }
    std::vector<double> samples;
    samples.reserve(config.latency_count - config.warmup_drop);
    for (std::size_t i = 0; i < config.latency_count; ++i) {
      const RawFrame frame = config.path_mode == PathMode::kAllFastPath
                                 ? fast
                                 : build_udp_frame(random_flow(rng), size);
      if (config.interval_ms > 0) std::this_thread::sleep_for(interval);
      const auto t0 = Clock::now();
      state.process(frame, kIngressPort, config.profile);
      const auto t1 = Clock::now();
      if (i >= config.warmup_drop) samples.push_back(micros(t1 - t0));
    }
    const SampleStats st = summarize(samples);
    result.latency.push_back({size, samples.size(), st.median, st.p95, st.variance});
  }
  return result;
}

std::string throughput_csv(const BenchResult& result, bool header) {
  std::string out = header ? "mode,rate_pps,offered,forwarded,loss_fraction\n" : "";
  for (const RateRecord& r : result.rates) {
    out += fmt::format("{},{},{},{},{:.6f}\n", to_string(result.mode), r.offered_pps,
                       r.offered, r.forwarded, r.loss_fraction);
  }
  return out;
}

std::string latency_csv(const BenchResult& result, bool header) {
  std::string out = header ? "mode,size_b,median_us,p95_us,variance_us2\n" : "";
  for (const LatencyRecord& r : result.latency) {
    out += fmt::format("{},{},{:.4f},{:.4f},{:.6f}\n", to_string(result.mode), r.size_b,
                       r.median_us, r.p95_us, r.variance_us2);
  }
  return out;
}

}  // namespace shimguard
