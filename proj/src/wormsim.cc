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

#include "shimguard/wormsim.h"

#include <fmt/format.h>

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace shimguard {

void Topology::validate() const {
  if (compute_nodes < 1) throw std::invalid_argument("need at least one compute node");
  if (attacker_vm_host >= compute_nodes) {
    throw std::invalid_argument(fmt::format(
        "attacker host {} outside 0..{}", attacker_vm_host, compute_nodes - 1));
  }
}

void StageTimings::validate() const {
  for (double v : {exploit_send, download, restart_sleep, hop_overhead,
                   controller_restore, dos_outage}) {
    if (!(v >= 0.0)) throw std::invalid_argument("stage timings must be >= 0");
  }
}

void StageTimings::set(std::string_view name, double seconds) {
  if (!(seconds >= 0.0)) {
    throw std::invalid_argument(fmt::format("timing {} must be >= 0", name));
  }
  if (name == "exploit_send") {
    exploit_send = seconds;
  } else if (name == "download") {
    download = seconds;
  } else if (name == "restart_sleep") {
    restart_sleep = seconds;
  } else if (name == "hop_overhead") {
    hop_overhead = seconds;
  } else if (name == "controller_restore") {
    controller_restore = seconds;
  } else if (name == "dos_outage") {
    dos_outage = seconds;
  } else {
    throw std::invalid_argument(fmt::format("unknown timing '{}'", name));
  }
}

std::string_view to_string(WormEvent e) {
  switch (e) {
    case WormEvent::kExploitSent:
      return "ExploitSent";
    case WormEvent::kShellObtained:
      return "ShellObtained";
    case WormEvent::kPatchedSwitchInstalled:
      return "PatchedSwitchInstalled";
    case WormEvent::kRestored:
      return "Restored";
    case WormEvent::kFanoutStarted:
      return "FanoutStarted";
  }
  return "?";
}

std::optional<double> WormTimeline::shell_time(std::size_t node) const {
  for (const TimelineEntry& e : events) {
    if (e.node == node && e.event == WormEvent::kShellObtained) return e.time_s;
  }
  return std::nullopt;
}

std::string WormTimeline::node_name(std::size_t node) const {
  if (node == compute_nodes) return "controller";
  return fmt::format("compute-{}", node);
}

namespace {

struct Scheduled {
  double time;
  std::uint64_t seq;  // FIFO among equal times
  std::size_t node;
  WormEvent event;

  bool operator>(const Scheduled& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

class EventQueue {
 public:
  void at(double t, std::size_t node, WormEvent e) { q_.push({t, seq_++, node, e}); }
  bool empty() const { return q_.empty(); }
  Scheduled pop() {
    Scheduled s = q_.top();
    q_.pop();
    return s;
  }

 private:
  std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>> q_;
  std::uint64_t seq_ = 0;
};

}  // namespace

WormTimeline simulate(const Topology& topology, const StageTimings& t) {
  topology.validate();
  t.validate();

  WormTimeline tl;
  tl.compute_nodes = topology.compute_nodes;
  const std::size_t controller = topology.controller();
  const std::size_t patient_zero = topology.attacker_vm_host;
  std::vector<bool> owned(topology.compute_nodes + 1, false);

  EventQueue q;
  // Step 1: the guest VM sends the malicious frame to its own host's switch.
  q.at(t.exploit_send, patient_zero, WormEvent::kExploitSent);

  while (!q.empty()) {
    const Scheduled s = q.pop();
    tl.events.push_back({s.time, s.node, s.event});
    switch (s.event) {
      case WormEvent::kExploitSent:
        if (s.node == controller) {
          // Step 2: the host's patched switch relays the payload upstream.
          q.at(s.time + t.hop_overhead / 2, controller, WormEvent::kShellObtained);
        } else {
          q.at(s.time + t.compute_hop(), s.node, WormEvent::kShellObtained);
        }
        break;
      case WormEvent::kShellObtained:
        owned[s.node] = true;
        if (s.node == controller) {
          // Step 3: wait for the controller's network services to return.
          q.at(s.time + t.controller_restore, controller, WormEvent::kRestored);
        } else {
          q.at(s.time, s.node, WormEvent::kPatchedSwitchInstalled);
        }
        break;
      case WormEvent::kPatchedSwitchInstalled:
        if (s.node == patient_zero && !owned[controller]) {
          q.at(s.time, controller, WormEvent::kExploitSent);
        }
        break;
      case WormEvent::kRestored:
        q.at(s.time, controller, WormEvent::kFanoutStarted);
        break;
      case WormEvent::kFanoutStarted:
        // Step 4: every remaining host is reachable from the controller.
        for (std::size_t n = 0; n < topology.compute_nodes; ++n) {
          if (!owned[n]) q.at(s.time, n, WormEvent::kExploitSent);
        }
        break;
    }
  }

  for (const TimelineEntry& e : tl.events) {
    if (e.event == WormEvent::kShellObtained) {
      tl.total_compromise_time = std::max(tl.total_compromise_time, e.time_s);
    }
  }
  return tl;
}

std::string timeline_csv(const WormTimeline& timeline) {
  std::string out = "time_s,node,event\n";
  for (const TimelineEntry& e : timeline.events) {
    out += fmt::format("{},{},{}\n", e.time_s, timeline.node_name(e.node),
                       to_string(e.event));
  }
  out += fmt::format("total_compromise_time_s={}\n", timeline.total_compromise_time);
  return out;
}

std::vector<OutageInterval> merge_intervals(std::vector<OutageInterval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const OutageInterval& a, const OutageInterval& b) {
              return a.start_s < b.start_s;
            });
  std::vector<OutageInterval> merged;
  for (const OutageInterval& iv : intervals) {
    if (!merged.empty() && iv.start_s <= merged.back().end_s) {
      merged.back().end_s = std::max(merged.back().end_s, iv.end_s);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

std::vector<NodeOutage> simulate_dos(const Topology& topology,
                                     const StageTimings& timings,
                                     std::vector<double> attack_times) {
  topology.validate();
  timings.validate();
  if (attack_times.empty()) throw std::invalid_argument("need at least one attack");
  std::vector<OutageInterval> raw;
  raw.reserve(attack_times.size());
  for (double at : attack_times) raw.push_back({at, at + timings.dos_outage});

  std::vector<NodeOutage> out(topology.compute_nodes);
  for (std::size_t n = 0; n < out.size(); ++n) out[n].node = n;
  NodeOutage& victim = out[topology.attacker_vm_host];
  victim.intervals = merge_intervals(std::move(raw));
  for (const OutageInterval& iv : victim.intervals) victim.total_s += iv.length();
  return out;
}

std::vector<NodeOutage> simulate_dos(const Topology& topology,
                                     const StageTimings& timings,
                                     std::size_t repeats) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  std::vector<double> times(repeats);
  for (std::size_t i = 0; i < repeats; ++i) {
    times[i] = static_cast<double>(i) * timings.dos_outage;
  }
  return simulate_dos(topology, timings, std::move(times));
}

}  // namespace shimguard
