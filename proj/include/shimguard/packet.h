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

// Byte-exact header types for the frames the switch handles: Ethernet,
// MPLS label stack entries (RFC 3032), IPv4 and the first octets of
// TCP/UDP. All multi-octet fields are encoded in network byte order.

#ifndef SHIMGUARD_PACKET_H_
#define SHIMGUARD_PACKET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace shimguard {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::uint16_t kEthTypeIpv4 = 0x0800;
inline constexpr std::uint16_t kEthTypeVlan = 0x8100;
inline constexpr std::uint16_t kEthTypeMplsUnicast = 0x8847;
inline constexpr std::uint16_t kEthTypeMplsMulticast = 0x8848;

inline constexpr std::size_t kEthHeaderLen = 14;
inline constexpr std::size_t kLseLen = 4;
inline constexpr std::size_t kIpv4MinHeaderLen = 20;

inline constexpr std::uint8_t kIpProtoTcp = 6;
inline constexpr std::uint8_t kIpProtoUdp = 17;

constexpr bool is_mpls_ethertype(std::uint16_t ethertype) {
  return ethertype == kEthTypeMplsUnicast ||
         ethertype == kEthTypeMplsMulticast;
}

struct Timestamp {
  std::uint32_t sec = 0;
  std::uint32_t usec = 0;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

// An immutable captured frame. capture_len() is always bytes().size() and
// never exceeds orig_len().
class RawFrame {
 public:
  RawFrame() = default;
  explicit RawFrame(Bytes bytes, Timestamp ts = {});
  // Throws std::invalid_argument if orig_len < bytes.size().
  RawFrame(Bytes bytes, std::uint32_t orig_len, Timestamp ts);

  const Bytes& bytes() const { return bytes_; }
  ByteView view() const { return bytes_; }
  std::size_t capture_len() const { return bytes_.size(); }
  std::uint32_t orig_len() const { return orig_len_; }
  Timestamp ts() const { return ts_; }
  bool empty() const { return bytes_.empty(); }

  friend bool operator==(const RawFrame&, const RawFrame&) = default;

 private:
  Bytes bytes_;
  std::uint32_t orig_len_ = 0;
  Timestamp ts_;
};

using MacAddress = std::array<std::uint8_t, 6>;

std::string format_mac(const MacAddress& mac);
std::string format_ipv4(std::uint32_t addr);

// One 32-bit MPLS label stack entry: label(20) | exp(3) | S(1) | ttl(8).
struct MplsLse {
  static constexpr std::uint32_t kMaxLabel = 0xFFFFF;
  static constexpr int kLabelShift = 12;
  static constexpr int kExpShift = 9;
  static constexpr int kBosShift = 8;
  static constexpr std::uint32_t kBosMask = 1u << kBosShift;

  std::uint32_t label = 0;
  std::uint8_t exp = 0;
  bool bottom_of_stack = false;
  std::uint8_t ttl = 0;

  std::uint32_t to_word() const;
  static MplsLse from_word(std::uint32_t word);
  std::array<std::uint8_t, kLseLen> encode() const;

  friend bool operator==(const MplsLse&, const MplsLse&) = default;
};

MplsLse decode_lse(std::span<const std::uint8_t, kLseLen> bytes);

struct EthernetHeader {
  static constexpr std::size_t kSize = kEthHeaderLen;

  MacAddress dst_mac{};
  MacAddress src_mac{};
  std::uint16_t ethertype = 0;

  void append_to(Bytes& out) const;
  friend bool operator==(const EthernetHeader&, const EthernetHeader&) =
      default;
};

// Checksum and fragment fields are carried verbatim and never validated.
struct Ipv4Header {
  std::uint8_t version = 4;
  std::uint8_t ihl = 5;
  std::uint8_t tos = 0;
  std::uint16_t total_length = 0;
  std::uint16_t identification = 0;
  std::uint16_t flags_fragment = 0;
  std::uint8_t ttl = 64;
  std::uint8_t protocol = 0;
  std::uint16_t checksum = 0;
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;

  bool well_formed() const {
    return version == 4 && ihl >= 5 && total_length >= ihl * 4u;
  }
  // 20 octets, plus zeroed option words when ihl > 5.
  std::size_t encoded_size() const;
  void append_to(Bytes& out) const;
  friend bool operator==(const Ipv4Header&, const Ipv4Header&) = default;
};

struct UdpHeader {
  static constexpr std::size_t kSize = 8;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint16_t length = 0;
  std::uint16_t checksum = 0;

  void append_to(Bytes& out) const;
  friend bool operator==(const UdpHeader&, const UdpHeader&) = default;
};

struct TcpHeader {
  static constexpr std::size_t kSize = 20;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  std::uint8_t flags = 0;
  std::uint16_t window = 0;
  std::uint16_t checksum = 0;

  void append_to(Bytes& out) const;
  friend bool operator==(const TcpHeader&, const TcpHeader&) = default;
};

using Layer = std::variant<MplsLse, Ipv4Header, UdpHeader, TcpHeader>;

std::size_t layer_size(const Layer& layer);

class InconsistentLayering : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Concatenates the headers and payload byte-exactly. Only the first layer is
// checked against the ethertype; everything after it is taken as given.
RawFrame encode_frame(const EthernetHeader& eth, std::span<const Layer> layers,
                      ByteView payload = {});

// A plain Ethernet/IPv4/UDP frame of exactly `frame_size` octets (at least
// 42), zero payload, with consistent IPv4 total_length and UDP length.
struct UdpFlow {
  MacAddress src_mac{0x02, 0x00, 0x00, 0x00, 0x00, 0x01};
  MacAddress dst_mac{0x02, 0x00, 0x00, 0x00, 0x00, 0x02};
  std::uint32_t src_ip = 0x0A000001;  // 10.0.0.1
  std::uint32_t dst_ip = 0x0A000002;  // 10.0.0.2
  std::uint16_t src_port = 53;
  std::uint16_t dst_port = 1024;
};

inline constexpr std::size_t kUdpFrameOverhead =
    kEthHeaderLen + kIpv4MinHeaderLen + UdpHeader::kSize;

RawFrame build_udp_frame(const UdpFlow& flow, std::size_t frame_size = 60);

// Big-endian helpers shared by the parsers and builders.
inline std::uint16_t load_be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}
inline std::uint32_t load_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}
void append_be16(Bytes& out, std::uint16_t v);
void append_be32(Bytes& out, std::uint32_t v);

std::string to_hex(ByteView bytes);

}  // namespace shimguard

#endif  // SHIMGUARD_PACKET_H_
