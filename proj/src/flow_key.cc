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

#include "shimguard/flow_key.h"

#include <fmt/format.h>

#include <cctype>

namespace shimguard {

std::string_view to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::kComplete:
      return "complete";
    case ParseStatus::kL2Only:
      return "l2_only";
    case ParseStatus::kMplsTerminated:
      return "mpls_terminated";
    case ParseStatus::kMalformed:
      return "malformed";
  }
  return "?";
}

std::optional<ParseStatus> parse_status_from_string(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(c));
  for (ParseStatus s : {ParseStatus::kComplete, ParseStatus::kL2Only,
                        ParseStatus::kMplsTerminated, ParseStatus::kMalformed}) {
    if (to_string(s) == lower) return s;
  }
  // CamelCase spellings as used in reports.
  if (lower == "l2only") return ParseStatus::kL2Only;
  if (lower == "mplsterminated") return ParseStatus::kMplsTerminated;
  return std::nullopt;
}

std::string to_string(const FlowKey& key) {
  std::string s = fmt::format("in_port={} eth_src={} eth_dst={} eth_type=0x{:04x}",
                              key.in_port, format_mac(key.eth_src),
                              format_mac(key.eth_dst), key.ethertype);
  if (key.mpls_top) {
    s += fmt::format(" mpls_label={} mpls_exp={} mpls_s={} mpls_ttl={}",
                     key.mpls_top->label, key.mpls_top->exp,
                     key.mpls_top->bottom_of_stack ? 1 : 0, key.mpls_top->ttl);
  }
  if (key.mpls_depth_seen) s += fmt::format(" mpls_depth={}", key.mpls_depth_seen);
  if (key.ip_src) s += fmt::format(" ip_src={}", format_ipv4(*key.ip_src));
  if (key.ip_dst) s += fmt::format(" ip_dst={}", format_ipv4(*key.ip_dst));
  if (key.ip_proto) s += fmt::format(" ip_proto={}", *key.ip_proto);
  if (key.ip_tos) s += fmt::format(" ip_tos={}", *key.ip_tos);
  if (key.ip_ttl) s += fmt::format(" ip_ttl={}", *key.ip_ttl);
  if (key.l4_src) s += fmt::format(" l4_src={}", *key.l4_src);
  if (key.l4_dst) s += fmt::format(" l4_dst={}", *key.l4_dst);
  s += fmt::format(" status={}", to_string(key.parse_status));
  return s;
}

namespace {

inline void mix(std::size_t& h, std::uint64_t v) {
  // splitmix64 finalizer folded into a running hash
  v += 0x9e3779b97f4a7c15ULL + h;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  h = static_cast<std::size_t>(v ^ (v >> 31));
}

template <typename T>
inline std::uint64_t opt_bits(const std::optional<T>& v) {
  return v ? (std::uint64_t{1} << 40) | std::uint64_t{*v} : 0;
}

std::uint64_t mac_bits(const MacAddress& m) {
  std::uint64_t v = 0;
  for (std::uint8_t b : m) v = (v << 8) | b;
  return v;
}

}  // namespace

std::size_t FlowKeyHash::operator()(const FlowKey& key) const noexcept {
  std::size_t h = 0;
  mix(h, key.in_port);
  mix(h, mac_bits(key.eth_src));
  mix(h, mac_bits(key.eth_dst) ^ (std::uint64_t{key.ethertype} << 48));
  mix(h, key.mpls_top ? (std::uint64_t{1} << 40) | key.mpls_top->to_word() : 0);
  mix(h, key.mpls_depth_seen);
  mix(h, opt_bits(key.ip_src));
  mix(h, opt_bits(key.ip_dst));
  mix(h, opt_bits(key.ip_proto) ^ (opt_bits(key.ip_tos) << 9) ^
             (opt_bits(key.ip_ttl) << 18));
  mix(h, opt_bits(key.l4_src) ^ (opt_bits(key.l4_dst) << 17));
  mix(h, static_cast<std::uint64_t>(key.parse_status));
  return h;
}

}  // namespace shimguard
