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

// The switch's match and action stages. Packets first try the fast path
// (an exact-match microflow cache in front of a wildcard megaflow cache);
// misses are handed to the slow path, which scans the rule table and
// installs a megaflow covering every field the scan consulted.

#ifndef SHIMGUARD_FLOWTABLE_H_
#define SHIMGUARD_FLOWTABLE_H_

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shimguard/extract.h"
#include "shimguard/flow_key.h"
#include "shimguard/rules.h"

namespace shimguard {

// A FlowKey projected onto a field mask. Fields outside the mask are zero
// and not present; fields inside it record presence and value.
struct MaskedKey {
  FieldMask mask;
  FieldMask present;
  std::array<std::uint64_t, kFlowFieldCount> values{};

  static MaskedKey from(const FlowKey& key, const FieldMask& mask);
  std::string to_string() const;

  friend bool operator==(const MaskedKey&, const MaskedKey&) = default;
};

struct MaskedKeyHash {
  std::size_t operator()(const MaskedKey& k) const noexcept;
};

struct MegaflowEntry {
  std::uint64_t id = 0;
  MaskedKey masked_key;
  std::vector<Action> actions;
  std::optional<std::size_t> rule_index;  // nullopt: table miss
  std::uint64_t hits = 0;

  const FieldMask& mask() const { return masked_key.mask; }
};

struct Disposition {
  enum class Kind { kForwarded, kDropped, kSentToController };

  Kind kind = Kind::kDropped;
  std::vector<PortId> ports;

  friend bool operator==(const Disposition&, const Disposition&) = default;
};

std::string to_string(const Disposition& d);

struct ActionOutcome {
  Disposition disposition;
  FlowKey key;
  std::size_t pop_mpls_noops = 0;
};

// Runs an action list against a key. An explicit drop wins over outputs,
// outputs win over a controller punt, and an empty list drops.
ActionOutcome apply_actions(FlowKey key, std::span<const Action> actions);

enum class MissAction { kDrop, kToController };

struct SwitchOptions {
  std::size_t microflow_capacity = 4096;
  MissAction miss_action = MissAction::kDrop;
  bool megaflow_enabled = true;
};

struct SwitchStats {
  std::uint64_t packets = 0;
  std::uint64_t forwards = 0;
  std::uint64_t drops = 0;
  std::uint64_t to_controller = 0;
  std::uint64_t slow_path_upcalls = 0;
  std::uint64_t fast_path_hits = 0;
  std::uint64_t microflow_hits = 0;
  std::uint64_t megaflow_hits = 0;
  std::uint64_t parse_drops = 0;
  std::uint64_t no_match = 0;
  std::uint64_t pop_mpls_noops = 0;

  friend bool operator==(const SwitchStats&, const SwitchStats&) = default;
};

enum class PathTaken { kParseDrop, kMicroflow, kMegaflow, kSlowPath };

struct ProcessResult {
  Disposition disposition;
  PathTaken path = PathTaken::kSlowPath;
  ExtractionResult extraction;
};

// Match/action state of one switch. Not thread-safe: process() needs
// exclusive access.
class SwitchState {
 public:
  explicit SwitchState(std::vector<Rule> rules = {}, SwitchOptions options = {});

  ProcessResult process(const RawFrame& frame, PortId in_port,
                        const ParserProfile& profile);

  // Replacing the rule table flushes both caches.
  void set_rules(std::vector<Rule> rules);
  // Disabling the megaflow cache empties both caches and sends every packet
  // through the slow path.
  void set_megaflow_enabled(bool enabled);
  void flush_caches();

  const std::vector<Rule>& rules() const { return rules_; }
  const SwitchOptions& options() const { return options_; }
  bool megaflow_enabled() const { return options_.megaflow_enabled; }
  const SwitchStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

  std::size_t microflow_size() const { return microflow_index_.size(); }
  std::size_t megaflow_count() const { return megaflows_.size(); }
  // Install order.
  std::vector<const MegaflowEntry*> megaflows() const;
  // Ids referenced by microflow entries, most recently used first.
  std::vector<std::uint64_t> microflow_targets() const;

  struct Classification {
    std::optional<std::size_t> rule_index;
    FieldMask consulted;
  };
  // Slow-path rule selection: highest priority wins, earliest rule on ties.
  // `consulted` is the union of match fields of every rule whose priority is
  // at least the winner's (all rules on a miss).
  Classification classify(const FlowKey& key) const;

 private:
  struct Subtable {
    FieldMask mask;
    std::unordered_map<MaskedKey, std::uint64_t, MaskedKeyHash> entries;
  };
  using MicroflowList = std::list<std::pair<FlowKey, std::uint64_t>>;

  MegaflowEntry* lookup_microflow(const FlowKey& key);
  MegaflowEntry* lookup_megaflow(const FlowKey& key);
  MegaflowEntry& upcall(const RawFrame& frame, const FlowKey& key,
                        PortId in_port, const ParserProfile& profile);
  std::vector<Action> actions_for(const Classification& c) const;
  void remember_microflow(const FlowKey& key, std::uint64_t id);
  Disposition finish(const FlowKey& key, std::span<const Action> actions);

  std::vector<Rule> rules_;
  std::vector<std::size_t> order_;  // rule indices by descending priority
  SwitchOptions options_;
  SwitchStats stats_;

  MicroflowList microflow_lru_;
  std::unordered_map<FlowKey, MicroflowList::iterator, FlowKeyHash>
      microflow_index_;
  std::map<std::uint64_t, MegaflowEntry> megaflows_;
  std::vector<Subtable> subtables_;
  std::uint64_t next_megaflow_id_ = 1;
  MegaflowEntry scratch_;  // slow-path result when megaflows are disabled
};

// Free-function form of SwitchState::process.
ProcessResult process(const RawFrame& frame, PortId in_port, SwitchState& state,
                      const ParserProfile& profile);

// Rules, cache entries and counters. Deterministic for a given state.
std::string dump_state(const SwitchState& state);

}  // namespace shimguard

#endif  // SHIMGUARD_FLOWTABLE_H_
