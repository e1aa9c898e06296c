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

#include "shimguard/attacks.h"
#include "shimguard/fuzz.h"

namespace shimguard {
namespace {

std::vector<ParserProfile> all_profiles() {
  std::vector<ParserProfile> ps;
  for (ParserMode m : {ParserMode::kHardened, ParserMode::kVuln232, ParserMode::kVuln240,
                       ParserMode::kVuln250}) {
    ParserProfile p;
    p.mode = m;
    ps.push_back(p);
  }
  return ps;
}

RawFrame crafted(AttackKind k) {
  AttackSpec s;
  s.kind = k;
  return craft(s);
}

TEST(DiffFuzz, SeedAloneYieldsLongStackExemplar) {
  const std::vector<RawFrame> corpus = {crafted(AttackKind::kLongShim)};
  MutationBudget b;
  b.iterations = 0;
  const FuzzReport r = diff_fuzz(corpus, b, all_profiles());
  EXPECT_EQ(r.frames_tested, 1u);
  ASSERT_EQ(r.exemplars.count(VulnClass::kLongStack232), 1u);
  EXPECT_EQ(r.exemplars.size(), 1u);
  const Exemplar& e = r.exemplars.at(VulnClass::kLongStack232);
  EXPECT_EQ(e.source_len, 1514u);
  // Smallest frame still carrying more than three unterminated labels.
  EXPECT_EQ(e.frame.capture_len(), 14u + 4u * 4u);
  EXPECT_TRUE(r.clean());
}

TEST(DiffFuzz, BitflipOnUdpNeverBlamesHardened) {
  const std::vector<RawFrame> corpus = {build_udp_frame(UdpFlow{})};
  MutationBudget b;
  b.iterations = 10000;
  b.seed = 5;
  b.strategies = {Strategy::kBitflip};
  const FuzzReport r = diff_fuzz(corpus, b, all_profiles());
  EXPECT_EQ(r.hardened_events, 0u);
  EXPECT_EQ(r.equivalence_violations, 0u);
  EXPECT_EQ(r.frames_tested, 10001u);
}

TEST(DiffFuzz, LengthTruncateFindsIpUnderflow) {
  const std::vector<RawFrame> corpus = {build_udp_frame(UdpFlow{})};
  MutationBudget b;
  b.iterations = 2000;
  b.seed = 11;
  b.strategies = {Strategy::kLengthTruncate};
  const FuzzReport r = diff_fuzz(corpus, b, all_profiles());
  EXPECT_GE(r.class_counts.at(VulnClass::kIpUnderflow250), 1u);
  ASSERT_EQ(r.exemplars.count(VulnClass::kIpUnderflow250), 1u);
  EXPECT_TRUE(r.clean());
}

TEST(DiffFuzz, ExemplarsKeepTheirClass) {
  const std::vector<RawFrame> corpus = {crafted(AttackKind::kLongShim),
                                        crafted(AttackKind::kShortShim),
                                        crafted(AttackKind::kAclBypass),
                                        build_udp_frame(UdpFlow{})};
  MutationBudget b;
  b.iterations = 5000;
  b.seed = 3;
  const FuzzReport r = diff_fuzz(corpus, b, all_profiles());
  ASSERT_EQ(r.exemplars.size(), 3u);
  for (const auto& [cls, e] : r.exemplars) {
    const auto res = extract(e.frame, 1, e.profile);
    EXPECT_EQ(classify_events(res.events), cls);
    EXPECT_LE(e.frame.capture_len(), e.source_len);
    // No single octet can be trimmed from either end.
    for (const RawFrame& shorter :
         {RawFrame(Bytes(e.frame.bytes().begin(), e.frame.bytes().end() - 1)),
          RawFrame(Bytes(e.frame.bytes().begin() + 1, e.frame.bytes().end()))}) {
      if (shorter.empty()) continue;
      EXPECT_NE(classify_events(extract(shorter, 1, e.profile).events), cls);
    }
  }
}

TEST(DiffFuzz, DeterministicAndWorkerIndependent) {
  const std::vector<RawFrame> corpus = {crafted(AttackKind::kLongShim),
                                        crafted(AttackKind::kAclBypass),
                                        build_udp_frame(UdpFlow{})};
  MutationBudget b;
  b.iterations = 6000;
  b.seed = 77;
  const std::string one = format_report(diff_fuzz(corpus, b, all_profiles()));
  EXPECT_EQ(one, format_report(diff_fuzz(corpus, b, all_profiles())));
  for (unsigned w : {2u, 3u}) {
    EXPECT_EQ(one, format_report(diff_fuzz(corpus, b, all_profiles(),
                                           {.workers = w, .batch_size = 500})));
  }
}

TEST(DiffFuzz, ReportShape) {
  const std::vector<RawFrame> corpus = {crafted(AttackKind::kShortShim)};
  MutationBudget b;
  b.iterations = 10;
  const std::string text = format_report(diff_fuzz(corpus, b, all_profiles()));
  EXPECT_EQ(text.rfind("# shimguard differential fuzz report\n", 0), 0u);
  EXPECT_NE(text.find("\nclass ShortLse-2.4.0 count="), std::string::npos);
  EXPECT_NE(text.find("/dev/tcp/<IP>/8080"), std::string::npos);
  EXPECT_NE(text.find("\nresult=clean\n"), std::string::npos);
}

TEST(DiffFuzz, RequiresHardenedAndAVulnerableProfile) {
  const std::vector<RawFrame> corpus = {build_udp_frame(UdpFlow{})};
  auto ps = all_profiles();
  EXPECT_THROW(diff_fuzz(corpus, {}, std::span(ps).subspan(0, 1)), std::invalid_argument);
  EXPECT_THROW(diff_fuzz(corpus, {}, std::span(ps).subspan(1)), std::invalid_argument);
  EXPECT_NO_THROW(diff_fuzz(corpus, {}, std::span(ps).subspan(0, 2)));
}

TEST(Minimize, TrimsToTriggerCore) {
  ParserProfile p;
  p.mode = ParserMode::kVuln250;
  Bytes b = crafted(AttackKind::kAclBypass).bytes();
  b.insert(b.end(), 100, 0xEE);
  const RawFrame m = minimize(RawFrame(b), VulnClass::kIpUnderflow250, p);
  EXPECT_EQ(m.capture_len(), 34u);
  EXPECT_EQ(classify_events(extract(m, 1, p).events), VulnClass::kIpUnderflow250);
}

}  // namespace
}  // namespace shimguard
