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

// Classic libpcap container, little-endian, Ethernet link type.

#ifndef SHIMGUARD_PCAP_H_
#define SHIMGUARD_PCAP_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "shimguard/packet.h"

namespace shimguard {

inline constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapSnaplen = 65535;
inline constexpr std::uint32_t kPcapLinktypeEthernet = 1;
inline constexpr std::size_t kPcapGlobalHeaderLen = 24;
inline constexpr std::size_t kPcapRecordHeaderLen = 16;

class PcapError : public std::runtime_error {
 public:
  enum class Kind { kBadMagic, kTruncatedRecord, kIoFailure };

  PcapError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

void write_pcap(std::ostream& out, std::span<const RawFrame> frames);
std::vector<RawFrame> read_pcap(std::istream& in);

void write_pcap(const std::filesystem::path& path,
                std::span<const RawFrame> frames);
std::vector<RawFrame> read_pcap(const std::filesystem::path& path);

}  // namespace shimguard

#endif  // SHIMGUARD_PCAP_H_
