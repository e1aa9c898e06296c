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

#include "shimguard/packet.h"

#include <fmt/format.h>

#include <type_traits>

namespace shimguard {

RawFrame::RawFrame(Bytes bytes, Timestamp ts)
    : bytes_(std::move(bytes)),
      orig_len_(static_cast<std::uint32_t>(bytes_.size())),
      ts_(ts) {}

RawFrame::RawFrame(Bytes bytes, std::uint32_t orig_len, Timestamp ts)
    : bytes_(std::move(bytes)), orig_len_(orig_len), ts_(ts) {
  if (orig_len_ < bytes_.size()) {
    throw std::invalid_argument(
        fmt::format("orig_len {} below capture length {}", orig_len_,
                    bytes_.size()));
  }
}

std::string format_mac(const MacAddress& mac) {
  return fmt::format("{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", mac[0],
                     mac[1], mac[2], mac[3], mac[4], mac[5]);
}

std::string format_ipv4(std::uint32_t addr) {
  return fmt::format("{}.{}.{}.{}", addr >> 24, (addr >> 16) & 0xFF,
                     (addr >> 8) & 0xFF, addr & 0xFF);
}

std::uint32_t MplsLse::to_word() const {
  return ((label & kMaxLabel) << kLabelShift) |
         (std::uint32_t{exp & 0x7u} << kExpShift) |
         (bottom_of_stack ? kBosMask : 0u) | ttl;
}

MplsLse MplsLse::from_word(std::uint32_t word) {
  MplsLse lse;
  lse.label = word >> kLabelShift;
  lse.exp = static_cast<std::uint8_t>((word >> kExpShift) & 0x7);
  lse.bottom_of_stack = (word & kBosMask) != 0;
  lse.ttl = static_cast<std::uint8_t>(word & 0xFF);
  return lse;
}

std::array<std::uint8_t, kLseLen> MplsLse::encode() const {
  const std::uint32_t w = to_word();
  return {static_cast<std::uint8_t>(w >> 24), static_cast<std::uint8_t>(w >> 16),
          static_cast<std::uint8_t>(w >> 8), static_cast<std::uint8_t>(w)};
}

MplsLse decode_lse(std::span<const std::uint8_t, kLseLen> bytes) {
  return MplsLse::from_word(load_be32(bytes.data()));
}

void append_be16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_be32(Bytes& out, std::uint32_t v) {
  append_be16(out, static_cast<std::uint16_t>(v >> 16));
  append_be16(out, static_cast<std::uint16_t>(v));
}

void EthernetHeader::append_to(Bytes& out) const {
  out.insert(out.end(), dst_mac.begin(), dst_mac.end());
  out.insert(out.end(), src_mac.begin(), src_mac.end());
  append_be16(out, ethertype);
}

std::size_t Ipv4Header::encoded_size() const {
  return ihl > 5 ? ihl * 4u : kIpv4MinHeaderLen;
}

void Ipv4Header::append_to(Bytes& out) const {
  out.push_back(static_cast<std::uint8_t>((version << 4) | (ihl & 0x0F)));
  out.push_back(tos);
  append_be16(out, total_length);
  append_be16(out, identification);
  append_be16(out, flags_fragment);
  out.push_back(ttl);
  out.push_back(protocol);
  append_be16(out, checksum);
  append_be32(out, src_ip);
  append_be32(out, dst_ip);
  out.resize(out.size() + (encoded_size() - kIpv4MinHeaderLen), 0);
}

void UdpHeader::append_to(Bytes& out) const {
  append_be16(out, src_port);
  append_be16(out, dst_port);
  append_be16(out, length);
  append_be16(out, checksum);
}

void TcpHeader::append_to(Bytes& out) const {
  append_be16(out, src_port);
  append_be16(out, dst_port);
  append_be32(out, seq);
  append_be32(out, ack);
  out.push_back(5 << 4);  // data offset, no options
  out.push_back(flags);
  append_be16(out, window);
  append_be16(out, checksum);
  append_be16(out, 0);  // urgent pointer
}

std::size_t layer_size(const Layer& layer) {
  return std::visit(
      [](const auto& h) -> std::size_t {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, MplsLse>) {
          return kLseLen;
        } else if constexpr (std::is_same_v<T, Ipv4Header>) {
          return h.encoded_size();
        } else {
          return T::kSize;
        }
      },
      layer);
}

RawFrame encode_frame(const EthernetHeader& eth, std::span<const Layer> layers,
                      ByteView payload) {
  if (!layers.empty()) {
    const Layer& first = layers.front();
    const bool ok =
        std::holds_alternative<MplsLse>(first)
            ? is_mpls_ethertype(eth.ethertype)
            : std::holds_alternative<Ipv4Header>(first) &&
                  eth.ethertype == kEthTypeIpv4;
    if (!ok) {
      throw InconsistentLayering(fmt::format(
          "ethertype 0x{:04x} does not introduce the first layer",
          eth.ethertype));
    }
  }
  Bytes out;
  std::size_t total = EthernetHeader::kSize + payload.size();
  for (const Layer& l : layers) total += layer_size(l);
  out.reserve(total);
  eth.append_to(out);
  for (const Layer& l : layers) {
    std::visit(
        [&out](const auto& h) {
          using T = std::decay_t<decltype(h)>;
          if constexpr (std::is_same_v<T, MplsLse>) {
            const auto enc = h.encode();
            out.insert(out.end(), enc.begin(), enc.end());
          } else {
            h.append_to(out);
          }
        },
        l);
  }
  out.insert(out.end(), payload.begin(), payload.end());
  return RawFrame(std::move(out));
}

RawFrame build_udp_frame(const UdpFlow& flow, std::size_t frame_size) {
  if (frame_size < kUdpFrameOverhead || frame_size - kEthHeaderLen > 0xFFFF) {
    throw std::invalid_argument(
        fmt::format("UDP frame size {} out of range", frame_size));
  }
  EthernetHeader eth{flow.dst_mac, flow.src_mac, kEthTypeIpv4};
  Ipv4Header ip;
  ip.total_length = static_cast<std::uint16_t>(frame_size - kEthHeaderLen);
  ip.protocol = kIpProtoUdp;
  ip.src_ip = flow.src_ip;
  ip.dst_ip = flow.dst_ip;
  UdpHeader udp{flow.src_port, flow.dst_port,
                static_cast<std::uint16_t>(frame_size - kEthHeaderLen -
                                           kIpv4MinHeaderLen),
                0};
  const Layer layers[] = {ip, udp};
  const Bytes payload(frame_size - kUdpFrameOverhead, 0);
  return encode_frame(eth, layers, payload);
}

std::string to_hex(ByteView bytes) {
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) s += fmt::format("{:02x}", b);
  return s;
}

}  // namespace shimguard
