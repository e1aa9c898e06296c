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

#include "shimguard/rules.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <limits>

namespace shimguard {
namespace {

constexpr std::array<std::string_view, kFlowFieldCount> kFieldNames = {
    "in_port", "eth_src", "eth_dst",  "eth_type", "mpls_label", "mpls_s",
    "ip_src",  "ip_dst",  "ip_proto", "l4_src",   "l4_dst",     "parse_status"};

std::uint64_t field_max(FlowField f) {
  switch (f) {
    case FlowField::kInPort:
    case FlowField::kIpSrc:
    case FlowField::kIpDst:
      return 0xFFFFFFFFu;
    case FlowField::kEthSrc:
    case FlowField::kEthDst:
      return 0xFFFFFFFFFFFFull;
    case FlowField::kEthType:
    case FlowField::kL4Src:
    case FlowField::kL4Dst:
      return 0xFFFF;
    case FlowField::kMplsLabel:
      return MplsLse::kMaxLabel;
    case FlowField::kMplsS:
      return 1;
    case FlowField::kIpProto:
      return 0xFF;
    case FlowField::kParseStatus:
      return static_cast<std::uint64_t>(ParseStatus::kMalformed);
  }
  return 0;
}

std::uint64_t mac_to_u64(const MacAddress& m) {
  std::uint64_t v = 0;
  for (std::uint8_t b : m) v = (v << 8) | b;
  return v;
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const std::size_t pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
std::optional<T> parse_int(std::string_view s) {
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::uint64_t> parse_mac(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 6) return std::nullopt;
  std::uint64_t v = 0;
  for (std::string_view p : parts) {
    if (p.empty() || p.size() > 2) return std::nullopt;
    std::uint32_t b = 0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), b, 16);
    if (ec != std::errc() || ptr != p.data() + p.size()) return std::nullopt;
    v = (v << 8) | b;
  }
  return v;
}

std::optional<std::uint64_t> parse_ipv4(std::string_view s) {
  const auto parts = split(s, '.');
  if (parts.size() != 4) return std::nullopt;
  std::uint64_t v = 0;
  for (std::string_view p : parts) {
    const auto octet = parse_int<std::uint32_t>(p);
    if (!octet || *octet > 255 || p.starts_with("0x")) return std::nullopt;
    v = (v << 8) | *octet;
  }
  return v;
}

std::optional<std::uint64_t> parse_field_value(FlowField f, std::string_view s) {
  switch (f) {
    case FlowField::kEthSrc:
    case FlowField::kEthDst:
      return parse_mac(s);
    case FlowField::kIpSrc:
    case FlowField::kIpDst:
      return parse_ipv4(s);
    case FlowField::kParseStatus: {
      const auto st = parse_status_from_string(s);
      if (!st) return std::nullopt;
      return static_cast<std::uint64_t>(*st);
    }
    default: {
      const auto v = parse_int<std::uint64_t>(s);
      if (!v || *v > field_max(f)) return std::nullopt;
      return v;
    }
  }
}

std::optional<Action> parse_action(std::string_view s) {
  const std::size_t colon = s.find(':');
  const std::string_view name = trim(s.substr(0, colon));
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : trim(s.substr(colon + 1));
  const bool has_arg = colon != std::string_view::npos;
  if (name == "drop" && !has_arg) return action::Drop{};
  if (name == "controller" && !has_arg) return action::ToController{};
  if (name == "pop_mpls" && !has_arg) return action::PopMpls{};
  if (name == "output" && has_arg) {
    const auto port = parse_int<std::uint32_t>(arg);
    if (!port) return std::nullopt;
    return action::Output{*port};
  }
  if (name == "push_mpls" && has_arg) {
    const auto label = parse_int<std::uint32_t>(arg);
    if (!label || *label > MplsLse::kMaxLabel) return std::nullopt;
    MplsLse lse;
    lse.label = *label;
    lse.ttl = 64;
    return action::PushMpls{lse};
  }
  return std::nullopt;
}

Rule parse_rule_line(std::string_view line, std::size_t lineno) {
  using Kind = RuleParseError::Kind;
  Rule rule;
  rule.line = lineno;
  bool have_priority = false;
  bool have_actions = false;
  FieldMask seen;

  const auto tokens = split(line, ',');
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos) {
      throw RuleParseError(Kind::kSyntax, lineno,
                           fmt::format("expected key=value, got '{}'", tok));
    }
    const std::string_view key = trim(tok.substr(0, eq));
    const std::string_view value = trim(tok.substr(eq + 1));

    if (key == "actions") {
      // The action list runs to the end of the line.
      std::vector<std::string_view> acts{value};
      acts.insert(acts.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                  tokens.end());
      for (std::string_view a : acts) {
        const auto parsed = parse_action(a);
        if (!parsed) {
          throw RuleParseError(Kind::kSyntax, lineno,
                               fmt::format("bad action '{}'", a));
        }
        rule.actions.push_back(*parsed);
      }
      have_actions = true;
      break;
    }
    if (key == "priority") {
      if (have_priority) {
        throw RuleParseError(Kind::kDuplicateField, lineno, "priority");
      }
      const auto p = parse_int<std::int64_t>(value);
      if (!p) {
        throw RuleParseError(Kind::kSyntax, lineno,
                             fmt::format("bad priority '{}'", value));
      }
      rule.priority = *p;
      have_priority = true;
      continue;
    }
    const auto field = flow_field_from_string(key);
    if (!field) {
      throw RuleParseError(Kind::kUnknownField, lineno, std::string(key));
    }
    const auto idx = static_cast<std::size_t>(*field);
    if (seen.test(idx)) {
      throw RuleParseError(Kind::kDuplicateField, lineno, std::string(key));
    }
    seen.set(idx);
    const auto v = parse_field_value(*field, value);
    if (!v) {
      throw RuleParseError(Kind::kSyntax, lineno,
                           fmt::format("bad value '{}' for {}", value, key));
    }
    rule.match.push_back({*field, *v});
  }
  if (!have_priority) throw RuleParseError(Kind::kSyntax, lineno, "missing priority");
  if (!have_actions) throw RuleParseError(Kind::kSyntax, lineno, "missing actions");
  return rule;
}

std::string_view kind_name(RuleParseError::Kind kind) {
  switch (kind) {
    case RuleParseError::Kind::kSyntax:
      return "SyntaxError";
    case RuleParseError::Kind::kUnknownField:
      return "UnknownField";
    case RuleParseError::Kind::kDuplicateField:
      return "DuplicateField";
  }
  return "?";
}

}  // namespace

std::string_view to_string(FlowField field) {
  return kFieldNames[static_cast<std::size_t>(field)];
}

std::optional<FlowField> flow_field_from_string(std::string_view name) {
  const auto it = std::find(kFieldNames.begin(), kFieldNames.end(), name);
  if (it == kFieldNames.end()) return std::nullopt;
  return static_cast<FlowField>(it - kFieldNames.begin());
}

std::optional<std::uint64_t> field_value(const FlowKey& key, FlowField field) {
  switch (field) {
    case FlowField::kInPort:
      return key.in_port;
    case FlowField::kEthSrc:
      return mac_to_u64(key.eth_src);
    case FlowField::kEthDst:
      return mac_to_u64(key.eth_dst);
    case FlowField::kEthType:
      return key.ethertype;
    case FlowField::kMplsLabel:
      if (!key.mpls_top) return std::nullopt;
      return key.mpls_top->label;
    case FlowField::kMplsS:
      if (!key.mpls_top) return std::nullopt;
      return key.mpls_top->bottom_of_stack ? 1 : 0;
    case FlowField::kIpSrc:
      return key.ip_src;
    case FlowField::kIpDst:
      return key.ip_dst;
    case FlowField::kIpProto:
      return key.ip_proto;
    case FlowField::kL4Src:
      return key.l4_src;
    case FlowField::kL4Dst:
      return key.l4_dst;
    case FlowField::kParseStatus:
      return static_cast<std::uint64_t>(key.parse_status);
  }
  return std::nullopt;
}

std::string format_field_value(FlowField field, std::uint64_t value) {
  switch (field) {
    case FlowField::kEthSrc:
    case FlowField::kEthDst: {
      MacAddress m{};
      for (int i = 5; i >= 0; --i, value >>= 8) {
        m[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
      }
      return format_mac(m);
    }
    case FlowField::kIpSrc:
    case FlowField::kIpDst:
      return format_ipv4(static_cast<std::uint32_t>(value));
    case FlowField::kEthType:
      return fmt::format("0x{:04x}", value);
    case FlowField::kParseStatus:
      return std::string(to_string(static_cast<ParseStatus>(value)));
    default:
      return fmt::format("{}", value);
  }
}

std::string to_string(const Action& a) {
  return std::visit(
      [](const auto& act) -> std::string {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, action::Output>) {
          return fmt::format("output:{}", act.port);
        } else if constexpr (std::is_same_v<T, action::Drop>) {
          return "drop";
        } else if constexpr (std::is_same_v<T, action::ToController>) {
          return "controller";
        } else if constexpr (std::is_same_v<T, action::PushMpls>) {
          return fmt::format("push_mpls:{}", act.lse.label);
        } else {
          return "pop_mpls";
        }
      },
      a);
}

FieldMask Rule::fields() const {
  FieldMask m;
  for (const FieldMatch& fm : match) m.set(static_cast<std::size_t>(fm.field));
  return m;
}

bool Rule::matches(const FlowKey& key) const {
  return std::all_of(match.begin(), match.end(), [&key](const FieldMatch& fm) {
    const auto v = field_value(key, fm.field);
    return v && *v == fm.value;
  });
}

std::string to_string(const Rule& rule) {
  std::string s = fmt::format("priority={}", rule.priority);
  for (const FieldMatch& fm : rule.match) {
    s += fmt::format(", {}={}", to_string(fm.field),
                     format_field_value(fm.field, fm.value));
  }
  s += ", actions=";
  for (std::size_t i = 0; i < rule.actions.size(); ++i) {
    if (i) s += ',';
    s += to_string(rule.actions[i]);
  }
  return s;
}

RuleParseError::RuleParseError(Kind kind, std::size_t line, std::string detail)
    : std::runtime_error(
          fmt::format("{} at line {}: {}", kind_name(kind), line, detail)),
      kind_(kind),
      line_(line),
      detail_(std::move(detail)) {}

std::vector<Rule> load_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::size_t lineno = 0;
  while (!text.empty() || lineno == 0) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    rules.push_back(parse_rule_line(line, lineno));
  }
  return rules;
}

}  // namespace shimguard
