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

#ifndef SHIMGUARD_FLOW_KEY_H_
#define SHIMGUARD_FLOW_KEY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "shimguard/packet.h"

namespace shimguard {

using PortId = std::uint32_t;

enum class ParseStatus { kComplete, kL2Only, kMplsTerminated, kMalformed };

std::string_view to_string(ParseStatus status);
std::optional<ParseStatus> parse_status_from_string(std::string_view name);

// Canonical header fields pulled out of a frame by extract(). Optional fields
// are absent when their layer was not (validly) parsed.
struct FlowKey {
  PortId in_port = 0;
  MacAddress eth_src{};
  MacAddress eth_dst{};
  std::uint16_t ethertype = 0;
  std::optional<MplsLse> mpls_top;
  std::uint32_t mpls_depth_seen = 0;
  std::optional<std::uint32_t> ip_src;
  std::optional<std::uint32_t> ip_dst;
  std::optional<std::uint8_t> ip_proto;
  std::optional<std::uint8_t> ip_tos;
  std::optional<std::uint8_t> ip_ttl;
  std::optional<std::uint16_t> l4_src;
  std::optional<std::uint16_t> l4_dst;
  ParseStatus parse_status = ParseStatus::kMalformed;

  friend bool operator==(const FlowKey&, const FlowKey&) = default;
};

std::string to_string(const FlowKey& key);

struct FlowKeyHash {
  std::size_t operator()(const FlowKey& key) const noexcept;
};

}  // namespace shimguard

#endif  // SHIMGUARD_FLOW_KEY_H_
