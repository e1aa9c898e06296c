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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.h"
#include "shimguard/attacks.h"
#include "shimguard/packet.h"
#include "shimguard/pcap.h"

namespace shimguard {
namespace {

using testing::lse_word;

TEST(MplsLse, DecodesBottomOfStackExample) {
  const std::array<std::uint8_t, 4> b = {0x00, 0x00, 0x11, 0x40};
  const MplsLse lse = decode_lse(b);
  EXPECT_EQ(lse.label, 0x00001u);
  EXPECT_EQ(lse.exp, 0);
  EXPECT_TRUE(lse.bottom_of_stack);
  EXPECT_EQ(lse.ttl, 0x40);
}

TEST(MplsLse, DecodesNonBottomExample) {
  const std::array<std::uint8_t, 4> b = {0x00, 0x00, 0x10, 0x40};
  const MplsLse lse = decode_lse(b);
  EXPECT_EQ(lse.label, 0x00001u);
  EXPECT_FALSE(lse.bottom_of_stack);
  EXPECT_EQ(lse.ttl, 0x40);
}

TEST(MplsLse, FieldsMatchShiftOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t label = rng() & 0xFFFFF;
    const unsigned exp = rng() & 7, s = rng() & 1, ttl = rng() & 0xFF;
    MplsLse lse{label, static_cast<std::uint8_t>(exp), s == 1,
                static_cast<std::uint8_t>(ttl)};
    EXPECT_EQ(lse.to_word(), lse_word(label, exp, s, ttl));
  }
}

TEST(MplsLse, ByteRoundTripOverRandomWords) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 200000; ++i) {
    const std::uint32_t w = static_cast<std::uint32_t>(rng());
    const std::array<std::uint8_t, 4> b = {
        static_cast<std::uint8_t>(w >> 24), static_cast<std::uint8_t>(w >> 16),
        static_cast<std::uint8_t>(w >> 8), static_cast<std::uint8_t>(w)};
    ASSERT_EQ(decode_lse(b).encode(), b) << std::hex << w;
  }
}

TEST(MplsLse, CornerPatternsRoundTrip) {
  // Each nibble of the 4-bit selector turns one octet all-ones.
  for (unsigned sel = 0; sel < 16; ++sel) {
    std::array<std::uint8_t, 4> b{};
    for (int k = 0; k < 4; ++k) b[k] = (sel >> k) & 1 ? 0xFF : 0x00;
    EXPECT_EQ(decode_lse(b).encode(), b);
    for (int k = 0; k < 4; ++k) b[k] = (sel >> k) & 1 ? 0x80 : 0x01;
    EXPECT_EQ(decode_lse(b).encode(), b);
  }
}

TEST(EncodeFrame, Ipv4HeaderOnlyIs34Octets) {
  EthernetHeader eth{{}, {}, kEthTypeIpv4};
  Ipv4Header ip;
  ip.total_length = 20;
  const Layer layers[] = {ip};
  const RawFrame f = encode_frame(eth, layers);
  EXPECT_EQ(f.capture_len(), 34u);
  EXPECT_EQ(f.orig_len(), 34u);
}

TEST(EncodeFrame, SingleLseIs18Octets) {
  EthernetHeader eth{{}, {}, kEthTypeMplsUnicast};
  const Layer layers[] = {MplsLse{16, 0, true, 64}};
  const RawFrame f = encode_frame(eth, layers);
  ASSERT_EQ(f.capture_len(), 18u);
  EXPECT_EQ(load_be32(f.bytes().data() + 14), lse_word(16, 0, 1, 64));
}

TEST(EncodeFrame, FullLabelStackIs1514Octets) {
  EthernetHeader eth{{}, {}, kEthTypeMplsUnicast};
  std::vector<Layer> layers(375, MplsLse{16, 0, false, 64});
  EXPECT_EQ(encode_frame(eth, layers).capture_len(), 1514u);
}

TEST(EncodeFrame, MatchesHandAssembledUdpFrame) {
  std::vector<std::uint8_t> want = testing::eth(0x0800);
  testing::ipv4(want, 5, 28, 17);
  testing::put16(want, 53);
  testing::put16(want, 1024);
  testing::put16(want, 8);
  testing::put16(want, 0);

  EthernetHeader eth{{0x02, 0, 0, 0, 0, 0x02}, {0x02, 0, 0, 0, 0, 0x01}, kEthTypeIpv4};
  Ipv4Header ip;
  ip.total_length = 28;
  ip.protocol = 17;
  ip.src_ip = 0x0A000001;
  ip.dst_ip = 0x0A000002;
  const Layer layers[] = {ip, UdpHeader{53, 1024, 8, 0}};
  EXPECT_EQ(encode_frame(eth, layers).bytes(), want);
}

TEST(EncodeFrame, LengthIsHeaderSumPlusPayload) {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<Layer> layers;
    std::size_t want = kEthHeaderLen;
    const int lses = static_cast<int>(rng() % 5);
    for (int k = 0; k < lses; ++k) {
      layers.push_back(MplsLse{static_cast<std::uint32_t>(k), 0, k == lses - 1, 1});
      want += 4;
    }
    Ipv4Header ip;
    ip.ihl = static_cast<std::uint8_t>(5 + rng() % 3);
    layers.push_back(ip);
    want += ip.ihl * 4u;
    if (rng() & 1) {
      layers.push_back(TcpHeader{});
      want += 20;
    } else {
      layers.push_back(UdpHeader{});
      want += 8;
    }
    const Bytes payload(rng() % 64, 0xAB);
    want += payload.size();
    EthernetHeader eth{{}, {}, lses ? kEthTypeMplsUnicast : kEthTypeIpv4};
    EXPECT_EQ(encode_frame(eth, layers, payload).capture_len(), want);
  }
}

TEST(EncodeFrame, RejectsContradictoryEthertype) {
  EthernetHeader eth{{}, {}, kEthTypeIpv4};
  const Layer mpls[] = {MplsLse{}};
  EXPECT_THROW(encode_frame(eth, mpls), InconsistentLayering);
  eth.ethertype = kEthTypeMplsUnicast;
  const Layer ip[] = {Ipv4Header{}};
  EXPECT_THROW(encode_frame(eth, ip), InconsistentLayering);
}

TEST(Ipv4Header, WellFormedPredicate) {
  Ipv4Header h;
  h.total_length = 20;
  EXPECT_TRUE(h.well_formed());
  h.total_length = 19;
  EXPECT_FALSE(h.well_formed());
  h.total_length = 0;
  EXPECT_FALSE(h.well_formed());
  h.total_length = 24;
  h.ihl = 6;
  EXPECT_TRUE(h.well_formed());
  h.ihl = 4;
  EXPECT_FALSE(h.well_formed());
  h.ihl = 5;
  h.version = 6;
  EXPECT_FALSE(h.well_formed());
}

TEST(RawFrame, RejectsOrigLenBelowCapture) {
  EXPECT_THROW(RawFrame(Bytes(10), 9, {}), std::invalid_argument);
  const RawFrame f(Bytes(10), 20, {});
  EXPECT_EQ(f.capture_len(), 10u);
  EXPECT_EQ(f.orig_len(), 20u);
}

std::string pcap_bytes(std::span<const RawFrame> frames) {
  std::ostringstream out;
  write_pcap(out, frames);
  return out.str();
}

TEST(Pcap, EmptyListIsGlobalHeaderOnly) {
  const std::string s = pcap_bytes({});
  ASSERT_EQ(s.size(), 24u);
  const std::string want("\xd4\xc3\xb2\xa1\x02\x00\x04\x00"
                         "\x00\x00\x00\x00\x00\x00\x00\x00"
                         "\xff\xff\x00\x00\x01\x00\x00\x00",
                         24);
  EXPECT_EQ(s, want);
}

TEST(Pcap, OneSixtyOctetFrameIs100Octets) {
  const RawFrame f = build_udp_frame(UdpFlow{}, 60);
  EXPECT_EQ(pcap_bytes(std::span(&f, 1)).size(), 100u);
}

TEST(Pcap, RecordHeaderLayout) {
  const RawFrame f(Bytes(5, 0xEE), 9, Timestamp{7, 8});
  const std::string s = pcap_bytes(std::span(&f, 1));
  ASSERT_EQ(s.size(), 24u + 16u + 5u);
  const std::string rec("\x07\x00\x00\x00\x08\x00\x00\x00"
                        "\x05\x00\x00\x00\x09\x00\x00\x00",
                        16);
  EXPECT_EQ(s.substr(24, 16), rec);
}

TEST(Pcap, RoundTripsCraftedCorpus) {
  std::vector<RawFrame> frames;
  for (AttackKind k : {AttackKind::kLongShim, AttackKind::kShortShim, AttackKind::kAclBypass}) {
    AttackSpec spec;
    spec.kind = k;
    frames.push_back(craft(spec));
  }
  frames.push_back(build_udp_frame(UdpFlow{}, 9000));
  frames.push_back(RawFrame(Bytes{1, 2, 3}, 1500, Timestamp{123, 999999}));
  std::istringstream in(pcap_bytes(frames));
  EXPECT_EQ(read_pcap(in), frames);
}

TEST(Pcap, RoundTripsThroughFile) {
  AttackSpec spec;
  const std::vector<RawFrame> frames = {craft(spec)};
  const auto path = std::filesystem::temp_directory_path() / "shimguard_pcap_test.pcap";
  write_pcap(path, frames);
  EXPECT_EQ(std::filesystem::file_size(path), 24u + 16u + 1514u);
  EXPECT_EQ(read_pcap(path), frames);
  std::filesystem::remove(path);
}

TEST(Pcap, RoundTripsRandomFrames) {
  std::mt19937_64 rng(99);
  std::vector<RawFrame> frames;
  for (int i = 0; i < 300; ++i) {
    Bytes b(rng() % 200);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    frames.emplace_back(std::move(b), Timestamp{static_cast<std::uint32_t>(rng()),
                                                static_cast<std::uint32_t>(rng() % 1000000)});
  }
  std::istringstream in(pcap_bytes(frames));
  EXPECT_EQ(read_pcap(in), frames);
}

PcapError::Kind read_error(const std::string& data) {
  std::istringstream in(data);
  try {
    read_pcap(in);
  } catch (const PcapError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return PcapError::Kind::kIoFailure;
}

TEST(Pcap, ErrorKinds) {
  const RawFrame f = build_udp_frame(UdpFlow{}, 60);
  std::string good = pcap_bytes(std::span(&f, 1));

  std::string bad_magic = good;
  bad_magic[0] = 0x00;
  EXPECT_EQ(read_error(bad_magic), PcapError::Kind::kBadMagic);
  EXPECT_EQ(read_error(good.substr(0, 90)), PcapError::Kind::kTruncatedRecord);
  EXPECT_EQ(read_error(good.substr(0, 30)), PcapError::Kind::kTruncatedRecord);
  EXPECT_EQ(read_error(good.substr(0, 10)), PcapError::Kind::kTruncatedRecord);

  try {
    read_pcap(std::filesystem::path("/nonexistent/dir/x.pcap"));
    ADD_FAILURE();
  } catch (const PcapError& e) {
    EXPECT_EQ(e.kind(), PcapError::Kind::kIoFailure);
  }
}

}  // namespace
}  // namespace shimguard
