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

#include "shimguard/pcap.h"

#include <fmt/format.h>

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace shimguard {
namespace {

void put_le16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_le32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                     static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(b, 4);
}

std::uint32_t get_le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

// Reads exactly n octets; returns the count actually read.
std::size_t read_some(std::istream& in, std::uint8_t* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

void write_pcap(std::ostream& out, std::span<const RawFrame> frames) {
  put_le32(out, kPcapMagic);
  put_le16(out, 2);
  put_le16(out, 4);
  put_le32(out, 0);  // thiszone
  put_le32(out, 0);  // sigfigs
  put_le32(out, kPcapSnaplen);
  put_le32(out, kPcapLinktypeEthernet);
  for (const RawFrame& f : frames) {
    put_le32(out, f.ts().sec);
    put_le32(out, f.ts().usec);
    put_le32(out, static_cast<std::uint32_t>(f.capture_len()));
    put_le32(out, f.orig_len());
    out.write(reinterpret_cast<const char*>(f.bytes().data()),
              static_cast<std::streamsize>(f.capture_len()));
  }
  if (!out) throw PcapError(PcapError::Kind::kIoFailure, "pcap write failed");
}

std::vector<RawFrame> read_pcap(std::istream& in) {
  std::array<std::uint8_t, kPcapGlobalHeaderLen> global{};
  const std::size_t got = read_some(in, global.data(), global.size());
  if (got < 4 || get_le32(global.data()) != kPcapMagic) {
    throw PcapError(PcapError::Kind::kBadMagic, "not a little-endian pcap");
  }
  if (got < global.size()) {
    throw PcapError(PcapError::Kind::kTruncatedRecord,
                    "truncated pcap global header");
  }

  std::vector<RawFrame> frames;
  std::array<std::uint8_t, kPcapRecordHeaderLen> rec{};
  for (;;) {
    const std::size_t n = read_some(in, rec.data(), rec.size());
    if (n == 0) break;
    if (n < rec.size()) {
      throw PcapError(PcapError::Kind::kTruncatedRecord,
                      fmt::format("record {} header truncated", frames.size()));
    }
    const Timestamp ts{get_le32(rec.data()), get_le32(rec.data() + 4)};
    const std::uint32_t incl = get_le32(rec.data() + 8);
    const std::uint32_t orig = get_le32(rec.data() + 12);
    if (incl > kPcapSnaplen || orig < incl) {
      throw PcapError(PcapError::Kind::kTruncatedRecord,
                      fmt::format("record {} has bad lengths incl={} orig={}",
                                  frames.size(), incl, orig));
    }
    Bytes data(incl);
    if (read_some(in, data.data(), incl) < incl) {
      throw PcapError(PcapError::Kind::kTruncatedRecord,
                      fmt::format("record {} body truncated", frames.size()));
    }
    frames.emplace_back(std::move(data), orig, ts);
  }
  return frames;
}

void write_pcap(const std::filesystem::path& path,
                std::span<const RawFrame> frames) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw PcapError(PcapError::Kind::kIoFailure,
                    fmt::format("cannot open {} for writing", path.string()));
  }
  write_pcap(out, frames);
}

std::vector<RawFrame> read_pcap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw PcapError(PcapError::Kind::kIoFailure,
                    fmt::format("cannot open {}", path.string()));
  }
  return read_pcap(in);
}

}  // namespace shimguard
