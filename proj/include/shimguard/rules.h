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

// Match/action rules and their line-oriented text format:
//
//   priority=<int>, <field>=<value>[, ...], actions=<act>[,<act>...]
//
// Everything after '#' is a comment. Fields: in_port, eth_src, eth_dst,
// eth_type, mpls_label, mpls_s, ip_src, ip_dst, ip_proto, l4_src, l4_dst,
// parse_status. Actions: output:<port>, drop, controller, push_mpls:<label>,
// pop_mpls.

#ifndef SHIMGUARD_RULES_H_
#define SHIMGUARD_RULES_H_

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shimguard/flow_key.h"

namespace shimguard {

enum class FlowField : std::uint8_t {
  kInPort,
  kEthSrc,
  kEthDst,
  kEthType,
  kMplsLabel,
  kMplsS,
  kIpSrc,
  kIpDst,
  kIpProto,
  kL4Src,
  kL4Dst,
  kParseStatus,
};

inline constexpr std::size_t kFlowFieldCount = 12;
using FieldMask = std::bitset<kFlowFieldCount>;

std::string_view to_string(FlowField field);
std::optional<FlowField> flow_field_from_string(std::string_view name);

// The field's value as an integer, or nullopt when the key lacks the layer.
std::optional<std::uint64_t> field_value(const FlowKey& key, FlowField field);
std::string format_field_value(FlowField field, std::uint64_t value);

struct FieldMatch {
  FlowField field;
  std::uint64_t value;

  friend bool operator==(const FieldMatch&, const FieldMatch&) = default;
};

namespace action {
struct Output {
  PortId port;
  friend bool operator==(const Output&, const Output&) = default;
};
struct Drop {
  friend bool operator==(const Drop&, const Drop&) = default;
};
struct ToController {
  friend bool operator==(const ToController&, const ToController&) = default;
};
struct PushMpls {
  MplsLse lse;
  friend bool operator==(const PushMpls&, const PushMpls&) = default;
};
struct PopMpls {
  friend bool operator==(const PopMpls&, const PopMpls&) = default;
};
}  // namespace action

using Action = std::variant<action::Output, action::Drop, action::ToController,
                            action::PushMpls, action::PopMpls>;

std::string to_string(const Action& a);

struct Rule {
  std::int64_t priority = 0;
  std::vector<FieldMatch> match;  // at most one entry per field
  std::vector<Action> actions;
  std::size_t line = 0;           // 1-based source line, 0 if built in code

  FieldMask fields() const;
  bool matches(const FlowKey& key) const;

  friend bool operator==(const Rule&, const Rule&) = default;
};

std::string to_string(const Rule& rule);

class RuleParseError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kUnknownField, kDuplicateField };

  RuleParseError(Kind kind, std::size_t line, std::string detail);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string detail_;
};

std::vector<Rule> load_rules(std::string_view text);

}  // namespace shimguard

#endif  // SHIMGUARD_RULES_H_
