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

#include "shimguard/extract.h"

#include <algorithm>
#include <random>

namespace shimguard {

std::string_view to_string(ParserMode mode) {
  switch (mode) {
    case ParserMode::kHardened:
      return "hardened";
    case ParserMode::kVuln232:
      return "v232";
    case ParserMode::kVuln240:
      return "v240";
    case ParserMode::kVuln250:
      return "v250";
  }
  return "?";
}

std::optional<ParserMode> parser_mode_from_string(std::string_view name) {
  for (ParserMode m : {ParserMode::kHardened, ParserMode::kVuln232,
                       ParserMode::kVuln240, ParserMode::kVuln250}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kStackOverflowWrite:
      return "StackOverflowWrite";
    case CorruptionKind::kShortLseOverflow:
      return "ShortLseOverflow";
    case CorruptionKind::kHeapOverread:
      return "HeapOverread";
  }
  return "?";
}

std::string_view to_string(VulnClass cls) {
  switch (cls) {
    case VulnClass::kBenign:
      return "Benign";
    case VulnClass::kLongStack232:
      return "LongStack-2.3.2";
    case VulnClass::kShortLse240:
      return "ShortLse-2.4.0";
    case VulnClass::kIpUnderflow250:
      return "IpUnderflow-2.5.0";
  }
  return "?";
}

VulnClass classify_events(std::span<const CorruptionEvent> events) {
  if (events.empty()) return VulnClass::kBenign;
  switch (events.front().kind) {
    case CorruptionKind::kStackOverflowWrite:
      return VulnClass::kLongStack232;
    case CorruptionKind::kShortLseOverflow:
      return VulnClass::kShortLse240;
    case CorruptionKind::kHeapOverread:
      return VulnClass::kIpUnderflow250;
  }
  return VulnClass::kBenign;
}

MemoryModel::MemoryModel(const ParserProfile& profile, ByteView frame)
    : frame_(frame),
      adjacent_(profile.adjacent_size, 0),
      stack_capacity_slots_(profile.label_limit) {
  if (profile.adjacent_seed) {
    std::mt19937_64 rng(*profile.adjacent_seed);
    for (std::uint8_t& b : adjacent_) b = static_cast<std::uint8_t>(rng());
  }
}

std::uint8_t MemoryModel::read(std::size_t offset) {
  if (offset < frame_.size()) return frame_[offset];
  ++oob_reads_;
  const std::size_t idx = offset - frame_.size();
  return idx < adjacent_.size() ? adjacent_[idx] : 0;
}

std::uint16_t MemoryModel::read_be16(std::size_t offset) {
  const std::uint8_t hi = read(offset);
  return static_cast<std::uint16_t>((hi << 8) | read(offset + 1));
}

std::uint32_t MemoryModel::read_be32(std::size_t offset) {
  const std::uint32_t hi = read_be16(offset);
  return (hi << 16) | read_be16(offset + 2);
}

void MemoryModel::write_stack_slot() {
  if (stack_written_slots_ >= stack_capacity_slots_) oob_writes_ += kLseLen;
  ++stack_written_slots_;
}

void MemoryModel::overflow_stack(std::size_t slots) {
  for (std::size_t i = 0; i < slots; ++i) write_stack_slot();
}

namespace {

class Extractor {
 public:
  Extractor(const RawFrame& frame, PortId in_port, const ParserProfile& profile)
      : size_(frame.capture_len()), profile_(profile), mem_(profile, frame.view()) {
    result_.key.in_port = in_port;
  }

  ExtractionResult run() {
    if (size_ < kEthHeaderLen) return malformed();
    FlowKey& key = result_.key;
    for (std::size_t i = 0; i < 6; ++i) key.eth_dst[i] = mem_.read(i);
    for (std::size_t i = 0; i < 6; ++i) key.eth_src[i] = mem_.read(6 + i);
    key.ethertype = mem_.read_be16(12);

    if (is_mpls_ethertype(key.ethertype)) {
      parse_mpls(kEthHeaderLen);
    } else if (key.ethertype == kEthTypeIpv4) {
      parse_ipv4(kEthHeaderLen);
    } else {
      key.parse_status = ParseStatus::kL2Only;
      result_.verdict = Verdict::kAccept;
    }
    return finish();
  }

 private:
  bool is(ParserMode m) const { return profile_.mode == m; }

  ExtractionResult malformed() {
    FlowKey& key = result_.key;
    key.mpls_top.reset();
    key.mpls_depth_seen = 0;
    key.ip_src.reset();
    key.ip_dst.reset();
    key.ip_proto.reset();
    key.ip_tos.reset();
    key.ip_ttl.reset();
    key.l4_src.reset();
    key.l4_dst.reset();
    key.parse_status = ParseStatus::kMalformed;
    result_.verdict = Verdict::kDrop;
    return finish();
  }

  ExtractionResult finish() {
    result_.memory = {mem_.out_of_bounds_reads(), mem_.out_of_bounds_writes(),
                      mem_.stack_written_slots()};
    return std::move(result_);
  }

  void emit(CorruptionKind kind, std::uint32_t offset, std::uint32_t bytes) {
    result_.events.push_back({kind, offset, bytes, profile_});
  }

  void parse_mpls(std::size_t off) {
    const std::size_t limit = profile_.label_limit;
    std::optional<MplsLse> top;
    std::size_t complete = 0;
    std::size_t fragment = 0;
    bool bottom = false;

    while (off < size_) {
      if (size_ - off < kLseLen) {
        fragment = size_ - off;
        break;
      }
      const MplsLse lse = MplsLse::from_word(mem_.read_be32(off));
      off += kLseLen;
      ++complete;
      if (!top) top = lse;
      // Only the first `limit` entries land in the flow key's stack buffer.
      if (complete <= limit) mem_.write_stack_slot();
      if (lse.bottom_of_stack) {
        bottom = true;
        break;
      }
    }

    if (bottom) {
      accept_mpls(*top, complete);
      return;
    }

    if (is(ParserMode::kVuln232) && complete > limit) {
      // The unterminated stack keeps being copied past the buffer end.
      const std::size_t extra = complete - limit;
      mem_.overflow_stack(extra);
      emit(CorruptionKind::kStackOverflowWrite, 0,
           static_cast<std::uint32_t>(kLseLen * extra));
      accept_mpls(*top, complete);
      result_.key.parse_status = ParseStatus::kMalformed;
      return;
    }

    if (is(ParserMode::kVuln240) && fragment > 0) {
      // A full LSE is loaded from a shorter tail: the missing octets come
      // from whatever follows the frame.
      const MplsLse blended = MplsLse::from_word(mem_.read_be32(off));
      if (!top) top = blended;
      if (complete < limit) mem_.write_stack_slot();
      emit(CorruptionKind::kShortLseOverflow, 0,
           static_cast<std::uint32_t>(kLseLen - fragment));
      accept_mpls(*top, complete + 1);
      result_.key.parse_status = ParseStatus::kMalformed;
      return;
    }

    malformed();
  }

  void accept_mpls(const MplsLse& top, std::size_t depth) {
    FlowKey& key = result_.key;
    key.mpls_top = top;
    key.mpls_depth_seen = static_cast<std::uint32_t>(
        std::min<std::size_t>(depth, profile_.label_limit));
    key.parse_status = ParseStatus::kMplsTerminated;
    result_.verdict = Verdict::kAccept;
  }

  void parse_ipv4(std::size_t off) {
    if (size_ - off < kIpv4MinHeaderLen) {
      malformed();
      return;
    }
    const std::uint8_t ver_ihl = mem_.read(off);
    const std::uint8_t version = ver_ihl >> 4;
    const std::uint8_t ihl = ver_ihl & 0x0F;
    const std::uint8_t tos = mem_.read(off + 1);
    const std::uint16_t total_length = mem_.read_be16(off + 2);
    const std::uint8_t ttl = mem_.read(off + 8);
    const std::uint8_t proto = mem_.read(off + 9);
    const std::uint32_t src = mem_.read_be32(off + 12);
    const std::uint32_t dst = mem_.read_be32(off + 16);

    const std::uint16_t header_len = static_cast<std::uint16_t>(ihl * 4);
    const bool length_underflows =
        total_length == 0 || total_length < header_len;

    if (is(ParserMode::kVuln250) && length_underflows) {
      // Unsanitized: the L4 length wraps around at 16 bits, so the L4 header
      // is parsed from beyond the claimed end of the datagram.
      const std::uint16_t l4_len =
          static_cast<std::uint16_t>(total_length - header_len);
      set_ip(tos, ttl, proto, src, dst);
      const std::size_t l4_off = off + header_len;
      if ((proto == kIpProtoTcp || proto == kIpProtoUdp) && l4_len >= 4) {
        result_.key.l4_src = mem_.read_be16(l4_off);
        result_.key.l4_dst = mem_.read_be16(l4_off + 2);
      }
      emit(CorruptionKind::kHeapOverread,
           static_cast<std::uint32_t>(header_len - total_length), 2);
      // The header still fails validation; the daemon just never acts on it.
      result_.key.parse_status = ParseStatus::kMalformed;
      result_.verdict = Verdict::kAccept;
      return;
    }

    const bool well_formed =
        version == 4 && ihl >= 5 && total_length >= header_len;
    if (!well_formed || total_length > size_ - off) {
      malformed();
      return;
    }
    set_ip(tos, ttl, proto, src, dst);
    if ((proto == kIpProtoTcp || proto == kIpProtoUdp) &&
        header_len + 4u <= total_length) {
      result_.key.l4_src = mem_.read_be16(off + header_len);
      result_.key.l4_dst = mem_.read_be16(off + header_len + 2);
    }
    result_.key.parse_status = ParseStatus::kComplete;
    result_.verdict = Verdict::kAccept;
  }

  void set_ip(std::uint8_t tos, std::uint8_t ttl, std::uint8_t proto,
              std::uint32_t src, std::uint32_t dst) {
    FlowKey& key = result_.key;
    key.ip_src = src;
    key.ip_dst = dst;
    key.ip_proto = proto;
    key.ip_tos = tos;
    key.ip_ttl = ttl;
  }

  std::size_t size_;
  const ParserProfile& profile_;
  MemoryModel mem_;
  ExtractionResult result_;
};

}  // namespace

ExtractionResult extract(const RawFrame& frame, PortId in_port,
                         const ParserProfile& profile) {
  if (frame.empty()) throw EmptyFrame();
  if (profile.label_limit < 1) {
    throw std::invalid_argument("label_limit must be at least 1");
  }
  return Extractor(frame, in_port, profile).run();
}

}  // namespace shimguard
