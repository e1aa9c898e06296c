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

// Discrete-event model of a worm that spreads through a cloud's virtual
// switches: guest VM -> its compute host -> the controller -> every other
// compute host at once over the always-up control channels. Also models
// the outage windows of repeated crash attacks.

#ifndef SHIMGUARD_WORMSIM_H_
#define SHIMGUARD_WORMSIM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shimguard {

struct Topology {
  std::size_t compute_nodes = 1;
  std::size_t attacker_vm_host = 0;

  // Compute nodes are 0..compute_nodes-1; the controller comes after them.
  std::size_t controller() const { return compute_nodes; }
  void validate() const;
};

// All values in seconds.
struct StageTimings {
  double exploit_send = 0.0;
  double download = 3.0;
  double restart_sleep = 12.0;
  double hop_overhead = 6.0;  // split evenly between the first two hops
  double controller_restore = 60.0;
  double dos_outage = 4.5;

  // Time for one compute node to go from receiving the exploit to a root
  // shell with the patched switch installed.
  double compute_hop() const { return download + restart_sleep + hop_overhead / 2; }
  void validate() const;
  // Sets a field by name ("download", "restart_sleep", ...). Throws
  // std::invalid_argument for unknown names or negative values.
  void set(std::string_view name, double seconds);
};

enum class WormEvent {
  kExploitSent,
  kShellObtained,
  kPatchedSwitchInstalled,
  kRestored,
  kFanoutStarted,
};

std::string_view to_string(WormEvent e);

struct TimelineEntry {
  double time_s = 0.0;
  std::size_t node = 0;
  WormEvent event = WormEvent::kExploitSent;

  friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

struct WormTimeline {
  std::size_t compute_nodes = 0;
  std::vector<TimelineEntry> events;  // nondecreasing in time
  double total_compromise_time = 0.0;

  std::optional<double> shell_time(std::size_t node) const;
  std::string node_name(std::size_t node) const;

  friend bool operator==(const WormTimeline&, const WormTimeline&) = default;
};

WormTimeline simulate(const Topology& topology, const StageTimings& timings);

// `time_s,node,event` rows followed by `total_compromise_time_s=<value>`.
std::string timeline_csv(const WormTimeline& timeline);

struct OutageInterval {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }
  friend bool operator==(const OutageInterval&, const OutageInterval&) = default;
};

struct NodeOutage {
  std::size_t node = 0;
  std::vector<OutageInterval> intervals;  // merged, sorted
  double total_s = 0.0;
};

// Outage of the attacker's host when it is crashed at each of `attack_times`.
// Each attack opens a dos_outage-long window; overlapping or touching windows
// merge.
std::vector<NodeOutage> simulate_dos(const Topology& topology,
                                     const StageTimings& timings,
                                     std::vector<double> attack_times);

// `repeats` attacks, each launched the moment the switch comes back.
std::vector<NodeOutage> simulate_dos(const Topology& topology,
                                     const StageTimings& timings,
                                     std::size_t repeats);

std::vector<OutageInterval> merge_intervals(std::vector<OutageInterval> intervals);

}  // namespace shimguard

#endif  // SHIMGUARD_WORMSIM_H_
