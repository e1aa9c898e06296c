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

#include "shimguard/flowtable.h"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace shimguard {

MaskedKey MaskedKey::from(const FlowKey& key, const FieldMask& mask) {
  MaskedKey mk;
  mk.mask = mask;
  for (std::size_t i = 0; i < kFlowFieldCount; ++i) {
    if (!mask.test(i)) continue;
    if (const auto v = field_value(key, static_cast<FlowField>(i))) {
      mk.present.set(i);
      mk.values[i] = *v;
    }
  }
  return mk;
}

std::string MaskedKey::to_string() const {
  std::string fields;
  std::string match;
  for (std::size_t i = 0; i < kFlowFieldCount; ++i) {
    if (!mask.test(i)) continue;
    const auto f = static_cast<FlowField>(i);
    if (!fields.empty()) {
      fields += ',';
      match += ',';
    }
    fields += shimguard::to_string(f);
    match += fmt::format("{}={}", shimguard::to_string(f),
                         present.test(i) ? format_field_value(f, values[i]) : "-");
  }
  if (fields.empty()) return "mask=* match=*";
  return fmt::format("mask={} match={}", fields, match);
}

std::size_t MaskedKeyHash::operator()(const MaskedKey& k) const noexcept {
  std::size_t h = std::hash<unsigned long long>{}(k.mask.to_ullong() |
                                                  (k.present.to_ullong() << 16));
  for (std::size_t i = 0; i < kFlowFieldCount; ++i) {
    if (!k.present.test(i)) continue;
    h ^= std::hash<std::uint64_t>{}(k.values[i] + i) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  return h;
}

std::string to_string(const Disposition& d) {
  switch (d.kind) {
    case Disposition::Kind::kForwarded: {
      std::string s = "forwarded(";
      for (std::size_t i = 0; i < d.ports.size(); ++i) {
        if (i) s += ',';
        s += fmt::format("{}", d.ports[i]);
      }
      return s + ")";
    }
    case Disposition::Kind::kDropped:
      return "dropped";
    case Disposition::Kind::kSentToController:
      return "controller";
  }
  return "?";
}

ActionOutcome apply_actions(FlowKey key, std::span<const Action> actions) {
  struct Saved {
    std::optional<MplsLse> top;
    std::uint16_t ethertype;
    std::uint32_t depth;
  };
  std::vector<Saved> pushed;
  ActionOutcome out;
  bool drop = false;
  bool controller = false;

  for (const Action& a : actions) {
    if (std::holds_alternative<action::Drop>(a)) {
      drop = true;
    } else if (std::holds_alternative<action::ToController>(a)) {
      controller = true;
    } else if (const auto* o = std::get_if<action::Output>(&a)) {
      out.disposition.ports.push_back(o->port);
    } else if (const auto* push = std::get_if<action::PushMpls>(&a)) {
      pushed.push_back({key.mpls_top, key.ethertype, key.mpls_depth_seen});
      MplsLse lse = push->lse;
      lse.bottom_of_stack = !key.mpls_top.has_value();
      if (key.mpls_top) {
        lse.ttl = key.mpls_top->ttl;
      } else if (key.ip_ttl) {
        lse.ttl = *key.ip_ttl;
      }
      key.mpls_top = lse;
      key.ethertype = kEthTypeMplsUnicast;
      ++key.mpls_depth_seen;
    } else if (std::holds_alternative<action::PopMpls>(a)) {
      if (!pushed.empty()) {
        key.mpls_top = pushed.back().top;
        key.ethertype = pushed.back().ethertype;
        key.mpls_depth_seen = pushed.back().depth;
        pushed.pop_back();
      } else if (key.mpls_top) {
        // The label beneath the top one is not in the key; popping the
        // bottom label exposes an IPv4 payload.
        if (key.mpls_top->bottom_of_stack) key.ethertype = kEthTypeIpv4;
        key.mpls_top.reset();
        if (key.mpls_depth_seen) --key.mpls_depth_seen;
      } else {
        ++out.pop_mpls_noops;
      }
    }
  }

  if (drop) {
    out.disposition.kind = Disposition::Kind::kDropped;
    out.disposition.ports.clear();
  } else if (!out.disposition.ports.empty()) {
    out.disposition.kind = Disposition::Kind::kForwarded;
  } else if (controller) {
    out.disposition.kind = Disposition::Kind::kSentToController;
  } else {
    out.disposition.kind = Disposition::Kind::kDropped;
  }
  out.key = std::move(key);
  return out;
}

SwitchState::SwitchState(std::vector<Rule> rules, SwitchOptions options)
    : options_(options) {
  set_rules(std::move(rules));
}

void SwitchState::set_rules(std::vector<Rule> rules) {
  rules_ = std::move(rules);
  order_.resize(rules_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    return rules_[a].priority > rules_[b].priority;
  });
  flush_caches();
}

void SwitchState::set_megaflow_enabled(bool enabled) {
  options_.megaflow_enabled = enabled;
  if (!enabled) flush_caches();
}

void SwitchState::flush_caches() {
  microflow_lru_.clear();
  microflow_index_.clear();
  megaflows_.clear();
  subtables_.clear();
}

std::vector<const MegaflowEntry*> SwitchState::megaflows() const {
  std::vector<const MegaflowEntry*> out;
  out.reserve(megaflows_.size());
  for (const auto& [id, entry] : megaflows_) out.push_back(&entry);
  return out;
}

std::vector<std::uint64_t> SwitchState::microflow_targets() const {
  std::vector<std::uint64_t> out;
  out.reserve(microflow_lru_.size());
  for (const auto& [key, id] : microflow_lru_) out.push_back(id);
  return out;
}

SwitchState::Classification SwitchState::classify(const FlowKey& key) const {
  Classification c;
  for (std::size_t idx : order_) {
    if (rules_[idx].matches(key)) {
      c.rule_index = idx;
      break;
    }
  }
  for (std::size_t idx : order_) {
    if (c.rule_index && rules_[idx].priority < rules_[*c.rule_index].priority) {
      break;
    }
    c.consulted |= rules_[idx].fields();
  }
  return c;
}

std::vector<Action> SwitchState::actions_for(const Classification& c) const {
  if (c.rule_index) return rules_[*c.rule_index].actions;
  if (options_.miss_action == MissAction::kToController) {
    return {action::ToController{}};
  }
  return {action::Drop{}};
}

MegaflowEntry* SwitchState::lookup_microflow(const FlowKey& key) {
  const auto it = microflow_index_.find(key);
  if (it == microflow_index_.end()) return nullptr;
  microflow_lru_.splice(microflow_lru_.begin(), microflow_lru_, it->second);
  return &megaflows_.at(it->second->second);
}

MegaflowEntry* SwitchState::lookup_megaflow(const FlowKey& key) {
  for (const Subtable& st : subtables_) {
    const auto it = st.entries.find(MaskedKey::from(key, st.mask));
    if (it != st.entries.end()) return &megaflows_.at(it->second);
  }
  return nullptr;
}

void SwitchState::remember_microflow(const FlowKey& key, std::uint64_t id) {
  if (options_.microflow_capacity == 0) return;
  if (const auto it = microflow_index_.find(key); it != microflow_index_.end()) {
    it->second->second = id;
    microflow_lru_.splice(microflow_lru_.begin(), microflow_lru_, it->second);
    return;
  }
  microflow_lru_.emplace_front(key, id);
  microflow_index_.emplace(key, microflow_lru_.begin());
  if (microflow_lru_.size() > options_.microflow_capacity) {
    microflow_index_.erase(microflow_lru_.back().first);
    microflow_lru_.pop_back();
  }
}

MegaflowEntry& SwitchState::upcall(const RawFrame& frame, const FlowKey& key,
                                   PortId in_port, const ParserProfile& profile) {
  ++stats_.slow_path_upcalls;
  // The slow path gets its own copy of the packet and re-derives the flow
  // from it, as a userspace handler would.
  const RawFrame copy(frame.bytes(), frame.orig_len(), frame.ts());
  ExtractionResult again = extract(copy, in_port, profile);
  const FlowKey& slow_key = again.key == key ? again.key : key;

  const Classification c = classify(slow_key);
  MegaflowEntry entry;
  entry.id = next_megaflow_id_++;
  entry.masked_key = MaskedKey::from(slow_key, c.consulted);
  entry.actions = actions_for(c);
  entry.rule_index = c.rule_index;

  if (!options_.megaflow_enabled) {
    scratch_ = std::move(entry);
    return scratch_;
  }
  auto st = std::find_if(subtables_.begin(), subtables_.end(),
                         [&](const Subtable& s) { return s.mask == c.consulted; });
  if (st == subtables_.end()) {
    subtables_.push_back({c.consulted, {}});
    st = std::prev(subtables_.end());
  }
  st->entries.emplace(entry.masked_key, entry.id);
  const std::uint64_t id = entry.id;
  return megaflows_.emplace(id, std::move(entry)).first->second;
}

Disposition SwitchState::finish(const FlowKey& key,
                                std::span<const Action> actions) {
  ActionOutcome outcome = apply_actions(key, actions);
  stats_.pop_mpls_noops += outcome.pop_mpls_noops;
  switch (outcome.disposition.kind) {
    case Disposition::Kind::kForwarded:
      ++stats_.forwards;
      break;
    case Disposition::Kind::kDropped:
      ++stats_.drops;
      break;
    case Disposition::Kind::kSentToController:
      ++stats_.to_controller;
      break;
  }
  return std::move(outcome.disposition);
}

ProcessResult SwitchState::process(const RawFrame& frame, PortId in_port,
                                   const ParserProfile& profile) {
  ++stats_.packets;
  ProcessResult r;
  r.extraction = extract(frame, in_port, profile);
  const FlowKey& key = r.extraction.key;

  if (r.extraction.verdict == Verdict::kDrop) {
    ++stats_.parse_drops;
    ++stats_.drops;
    r.path = PathTaken::kParseDrop;
    r.disposition.kind = Disposition::Kind::kDropped;
    return r;
  }

  MegaflowEntry* entry = nullptr;
  if (options_.megaflow_enabled) {
    if ((entry = lookup_microflow(key))) {
      r.path = PathTaken::kMicroflow;
      ++stats_.microflow_hits;
    } else if ((entry = lookup_megaflow(key))) {
      r.path = PathTaken::kMegaflow;
      ++stats_.megaflow_hits;
      remember_microflow(key, entry->id);
    }
  }
  if (entry) {
    ++stats_.fast_path_hits;
  } else {
    r.path = PathTaken::kSlowPath;
    entry = &upcall(frame, key, in_port, profile);
    if (options_.megaflow_enabled) remember_microflow(key, entry->id);
  }
  ++entry->hits;
  if (!entry->rule_index) ++stats_.no_match;
  r.disposition = finish(key, entry->actions);
  return r;
}

ProcessResult process(const RawFrame& frame, PortId in_port, SwitchState& state,
                      const ParserProfile& profile) {
  return state.process(frame, in_port, profile);
}

std::string dump_state(const SwitchState& state) {
  std::string out = "# switch state\n";
  out += fmt::format("rules: {}\n", state.rules().size());
  for (const Rule& r : state.rules()) out += fmt::format("  {}\n", to_string(r));

  if (!state.megaflow_enabled()) {
    out += "caches: disabled\n";
  } else {
    out += fmt::format("caches: enabled microflow={}/{} megaflow={}\n",
                       state.microflow_size(), state.options().microflow_capacity,
                       state.megaflow_count());
    for (const MegaflowEntry* e : state.megaflows()) {
      std::string acts;
      for (std::size_t i = 0; i < e->actions.size(); ++i) {
        if (i) acts += ',';
        acts += to_string(e->actions[i]);
      }
      out += fmt::format("  megaflow id={} {} actions={} hits={}\n", e->id,
                         e->masked_key.to_string(), acts, e->hits);
    }
  }

  const SwitchStats& s = state.stats();
  out += fmt::format(
      "counters: packets={} forwards={} drops={} to_controller={} "
      "slow_path_upcalls={} fast_path_hits={} microflow_hits={} "
      "megaflow_hits={} parse_drops={} no_match={} pop_mpls_noops={}\n",
      s.packets, s.forwards, s.drops, s.to_controller, s.slow_path_upcalls,
      s.fast_path_hits, s.microflow_hits, s.megaflow_hits, s.parse_drops,
      s.no_match, s.pop_mpls_noops);
  return out;
}

}  // namespace shimguard
