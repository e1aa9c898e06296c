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

// Flow extraction in two personalities. The hardened parser bounds-checks
// every access and drops malformed frames. The vulnerable profiles replay
// the parsing bugs of three historical switch releases against a simulated
// memory model: instead of corrupting anything they report a
// CorruptionEvent describing the out-of-bounds access they would have made.

#ifndef SHIMGUARD_EXTRACT_H_
#define SHIMGUARD_EXTRACT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "shimguard/flow_key.h"
#include "shimguard/packet.h"

namespace shimguard {

enum class ParserMode { kHardened, kVuln232, kVuln240, kVuln250 };

std::string_view to_string(ParserMode mode);
// Accepts "hardened", "v232", "v240", "v250".
std::optional<ParserMode> parser_mode_from_string(std::string_view name);

struct ParserProfile {
  static constexpr std::uint32_t kDefaultLabelLimit = 3;
  static constexpr std::size_t kDefaultAdjacentSize = 64;

  ParserMode mode = ParserMode::kHardened;
  // Capacity of the simulated label stack buffer, in LSE slots. Must be >= 1.
  std::uint32_t label_limit = kDefaultLabelLimit;
  // Bytes that sit past the end of the frame in the simulated heap.
  std::size_t adjacent_size = kDefaultAdjacentSize;
  // Zero-filled when unset, otherwise a deterministic pseudo-random pattern.
  std::optional<std::uint64_t> adjacent_seed;

  bool vulnerable() const { return mode != ParserMode::kHardened; }

  friend bool operator==(const ParserProfile&, const ParserProfile&) = default;
};

// Simulated parse memory: the frame, the region lying beyond it, and the
// fixed-capacity label stack buffer. Every access outside the frame or past
// the stack capacity is counted.
class MemoryModel {
 public:
  MemoryModel(const ParserProfile& profile, ByteView frame);

  std::size_t frame_size() const { return frame_.size(); }
  // Returns the frame octet at `offset`, or the adjacent-region octet when
  // the offset lies past the frame (zero past the adjacent region).
  std::uint8_t read(std::size_t offset);
  std::uint16_t read_be16(std::size_t offset);
  std::uint32_t read_be32(std::size_t offset);

  void write_stack_slot();
  void overflow_stack(std::size_t slots);

  std::size_t stack_capacity_slots() const { return stack_capacity_slots_; }
  std::size_t stack_written_slots() const { return stack_written_slots_; }
  std::size_t out_of_bounds_reads() const { return oob_reads_; }
  std::size_t out_of_bounds_writes() const { return oob_writes_; }
  const Bytes& adjacent_region() const { return adjacent_; }

 private:
  ByteView frame_;
  Bytes adjacent_;
  std::size_t stack_capacity_slots_;
  std::size_t stack_written_slots_ = 0;
  std::size_t oob_reads_ = 0;
  std::size_t oob_writes_ = 0;
};

enum class CorruptionKind { kStackOverflowWrite, kShortLseOverflow, kHeapOverread };

std::string_view to_string(CorruptionKind kind);

struct CorruptionEvent {
  CorruptionKind kind = CorruptionKind::kStackOverflowWrite;
  // Octets between the end of the valid region and the first bad access.
  std::uint32_t offset = 0;
  std::uint32_t byte_count = 1;
  ParserProfile profile;

  friend bool operator==(const CorruptionEvent&, const CorruptionEvent&) =
      default;
};

enum class Verdict { kAccept, kDrop };

struct MemoryAccounting {
  std::size_t out_of_bounds_reads = 0;
  std::size_t out_of_bounds_writes = 0;
  std::size_t stack_written_slots = 0;

  friend bool operator==(const MemoryAccounting&, const MemoryAccounting&) =
      default;
};

struct ExtractionResult {
  FlowKey key;
  std::vector<CorruptionEvent> events;
  Verdict verdict = Verdict::kDrop;
  MemoryAccounting memory;
};

class EmptyFrame : public std::invalid_argument {
 public:
  EmptyFrame() : std::invalid_argument("cannot extract an empty frame") {}
};

ExtractionResult extract(const RawFrame& frame, PortId in_port,
                         const ParserProfile& profile);

enum class VulnClass { kBenign, kLongStack232, kShortLse240, kIpUnderflow250 };

inline constexpr VulnClass kAllVulnClasses[] = {
    VulnClass::kLongStack232, VulnClass::kShortLse240,
    VulnClass::kIpUnderflow250};

// "LongStack-2.3.2", "ShortLse-2.4.0", "IpUnderflow-2.5.0" or "Benign".
std::string_view to_string(VulnClass cls);

// Class of the first event; Benign when there are none.
VulnClass classify_events(std::span<const CorruptionEvent> events);

}  // namespace shimguard

#endif  // SHIMGUARD_EXTRACT_H_
