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

// Builders for the three malformed-frame attacks, and the payload encoding
// that smuggles arbitrary 32-bit words through an unterminated label stack.

#ifndef SHIMGUARD_ATTACKS_H_
#define SHIMGUARD_ATTACKS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "shimguard/packet.h"

namespace shimguard {

enum class AttackKind { kLongShim, kShortShim, kAclBypass };

std::string_view to_string(AttackKind kind);
// Accepts "long-shim", "short-shim", "acl-bypass".
std::optional<AttackKind> attack_kind_from_string(std::string_view name);

struct AttackSpec {
  static constexpr std::size_t kDefaultFrameSize = 1514;

  AttackKind kind = AttackKind::kLongShim;
  // Long Shim: the frame holds floor((frame_size - 14) / 4) label entries.
  std::size_t frame_size = kDefaultFrameSize;
  // Long Shim: words packed into the leading label entries, zero padded to a
  // multiple of four octets.
  std::optional<Bytes> payload;
  // Short Shim: octets of the truncated label entry, 1..3.
  std::size_t fragment_len = 2;
  // ACL bypass: must be below the 20-octet header length.
  std::uint16_t total_length = 0;
  std::uint16_t src_port = 40000;
  std::uint16_t dst_port = 8080;

  MacAddress src_mac{0x02, 0x00, 0x00, 0x00, 0x0b, 0xad};
  MacAddress dst_mac{0x02, 0x00, 0x00, 0x00, 0x00, 0x01};
  std::uint32_t src_ip = 0x0A000063;  // 10.0.0.99
  std::uint32_t dst_ip = 0x0A000001;  // 10.0.0.1

  std::size_t long_shim_labels() const {
    return frame_size < kEthHeaderLen ? 0 : (frame_size - kEthHeaderLen) / kLseLen;
  }
};

class AttackError : public std::runtime_error {
 public:
  enum class Kind { kPayloadTooLarge, kPayloadViolatesConstraint, kInvalidSpec };

  AttackError(Kind kind, const std::string& what,
              std::optional<std::size_t> chunk_index = std::nullopt)
      : std::runtime_error(what), kind_(kind), chunk_index_(chunk_index) {}

  Kind kind() const { return kind_; }
  std::optional<std::size_t> chunk_index() const { return chunk_index_; }

 private:
  Kind kind_;
  std::optional<std::size_t> chunk_index_;
};

RawFrame craft(const AttackSpec& spec);

// Each 4-octet chunk becomes one label entry, bit for bit. A chunk whose
// bottom-of-stack bit is set would terminate the stack early and is rejected
// with kPayloadViolatesConstraint. `data.size()` must be a multiple of 4.
std::vector<MplsLse> encode_payload(ByteView data);
Bytes decode_payload(std::span<const MplsLse> lses);

// True when every 4-octet chunk leaves the bottom-of-stack bit clear.
bool payload_is_stack_safe(ByteView data);

}  // namespace shimguard

#endif  // SHIMGUARD_ATTACKS_H_
