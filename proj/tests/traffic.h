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

#ifndef SHIMGUARD_TESTS_TRAFFIC_H_
#define SHIMGUARD_TESTS_TRAFFIC_H_

#include <fmt/format.h>

#include <random>
#include <string>
#include <vector>

#include "shimguard/attacks.h"
#include "shimguard/flowtable.h"
#include "shimguard/rules.h"

namespace shimguard::testing {

// Reference classifier, written against the FlowKey fields directly.

inline std::optional<std::uint64_t> ref_field(const FlowKey& k, FlowField f) {
  auto mac = [](const MacAddress& m) {
    std::uint64_t v = 0;
    for (auto b : m) v = v << 8 | b;
    return v;
  };
  switch (f) {
    case FlowField::kInPort: return k.in_port;
    case FlowField::kEthSrc: return mac(k.eth_src);
    case FlowField::kEthDst: return mac(k.eth_dst);
    case FlowField::kEthType: return k.ethertype;
    case FlowField::kMplsLabel:
      return k.mpls_top ? std::optional<std::uint64_t>(k.mpls_top->label) : std::nullopt;
    case FlowField::kMplsS:
      return k.mpls_top ? std::optional<std::uint64_t>(k.mpls_top->bottom_of_stack)
                        : std::nullopt;
    case FlowField::kIpSrc: return k.ip_src;
    case FlowField::kIpDst: return k.ip_dst;
    case FlowField::kIpProto: return k.ip_proto;
    case FlowField::kL4Src: return k.l4_src;
    case FlowField::kL4Dst: return k.l4_dst;
    case FlowField::kParseStatus: return static_cast<std::uint64_t>(k.parse_status);
  }
  return std::nullopt;
}

inline const Rule* ref_winner(const std::vector<Rule>& rules, const FlowKey& k) {
  const Rule* best = nullptr;
  for (const Rule& r : rules) {
    bool ok = true;
    for (const FieldMatch& m : r.match) ok = ok && ref_field(k, m.field) == m.value;
    if (ok && (!best || r.priority > best->priority)) best = &r;
  }
  return best;
}

inline Disposition::Kind ref_kind(const std::vector<Action>& acts) {
  bool out = false, ctl = false;
  for (const Action& a : acts) {
    if (std::holds_alternative<action::Drop>(a)) return Disposition::Kind::kDropped;
    out = out || std::holds_alternative<action::Output>(a);
    ctl = ctl || std::holds_alternative<action::ToController>(a);
  }
  if (out) return Disposition::Kind::kForwarded;
  return ctl ? Disposition::Kind::kSentToController : Disposition::Kind::kDropped;
}

// Random traffic over a small value domain so rules actually hit.
class Traffic {
 public:
  explicit Traffic(std::uint64_t seed) : rng_(seed) {}

  RawFrame frame() {
    switch (rng_() % 8) {
      case 0: {
        AttackSpec s;
        s.kind = static_cast<AttackKind>(rng_() % 3);
        s.dst_port = pick_port();
        return craft(s);
      }
      case 1: {
        EthernetHeader eth{{}, {}, kEthTypeMplsUnicast};
        eth.src_mac[5] = static_cast<std::uint8_t>(rng_() % 3);
        std::vector<Layer> layers;
        const int n = 1 + static_cast<int>(rng_() % 3);
        for (int i = 0; i < n; ++i) {
          layers.push_back(MplsLse{static_cast<std::uint32_t>(16 + rng_() % 3), 0,
                                   i == n - 1, 64});
        }
        return encode_frame(eth, layers);
      }
      default: {
        UdpFlow f;
        f.src_mac[5] = static_cast<std::uint8_t>(rng_() % 3);
        f.src_ip = 0x0A000000 | static_cast<std::uint32_t>(rng_() % 4);
        f.dst_ip = 0x0A000000 | static_cast<std::uint32_t>(rng_() % 4);
        f.src_port = pick_port();
        f.dst_port = pick_port();
        return build_udp_frame(f, 60 + rng_() % 40);
      }
    }
  }

  PortId port() { return 1 + static_cast<PortId>(rng_() % 3); }

  std::string rules_text() {
    std::string text;
    const int n = 1 + static_cast<int>(rng_() % 8);
    for (int i = 0; i < n; ++i) {
      text += fmt::format("priority={}", rng_() % 6);
      std::vector<std::string> cands = {
          fmt::format("in_port={}", port()),
          fmt::format("eth_src=02:00:00:00:00:0{}", rng_() % 3),
          fmt::format("eth_type={}", rng_() & 1 ? "0x0800" : "0x8847"),
          fmt::format("mpls_label={}", 16 + rng_() % 3),
          fmt::format("mpls_s={}", rng_() % 2),
          fmt::format("ip_src=10.0.0.{}", rng_() % 4),
          fmt::format("ip_dst=10.0.0.{}", rng_() % 4),
          fmt::format("ip_proto={}", rng_() & 1 ? 17 : 6),
          fmt::format("l4_src={}", pick_port()),
          fmt::format("l4_dst={}", pick_port()),
          fmt::format("parse_status={}", rng_() & 1 ? "complete" : "malformed"),
      };
      for (const std::string& c : cands) {
        if (rng_() % 4 == 0) text += ", " + c;
      }
      const char* acts[] = {"drop", "output:1", "output:2,output:3", "controller",
                            "push_mpls:5,output:1", "pop_mpls,output:2"};
      text += fmt::format(", actions={}\n", acts[rng_() % 6]);
    }
    return text;
  }

 private:
  std::uint16_t pick_port() {
    static constexpr std::uint16_t kPorts[] = {53, 80, 8080};
    return kPorts[rng_() % 3];
  }
  std::mt19937_64 rng_;
};

}  // namespace shimguard::testing

#endif  // SHIMGUARD_TESTS_TRAFFIC_H_
