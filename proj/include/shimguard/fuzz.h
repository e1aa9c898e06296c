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

// Differential fuzzing: every frame (seeds first, then mutants) is
// extracted under the hardened parser and each vulnerable profile. Findings
// are bucketed by vulnerability class and one minimized exemplar is kept per
// class. Any key divergence on a frame where no profile reported corruption
// is an equivalence violation.

#ifndef SHIMGUARD_FUZZ_H_
#define SHIMGUARD_FUZZ_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "shimguard/extract.h"
#include "shimguard/mutate.h"

namespace shimguard {

struct Exemplar {
  VulnClass cls = VulnClass::kBenign;
  ParserProfile profile;
  RawFrame frame;           // minimized
  std::size_t source_len = 0;
};

struct EquivalenceViolation {
  RawFrame frame;
  ParserMode mode = ParserMode::kHardened;
  FlowKey hardened_key;
  FlowKey other_key;
};

struct FuzzReport {
  static constexpr std::size_t kMaxViolationExamples = 8;

  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
  std::size_t corpus_size = 0;
  std::vector<ParserProfile> profiles;

  std::uint64_t frames_tested = 0;
  std::uint64_t hardened_events = 0;
  std::uint64_t equivalence_violations = 0;
  std::map<VulnClass, std::uint64_t> class_counts;
  std::map<VulnClass, Exemplar> exemplars;
  std::vector<EquivalenceViolation> violation_examples;

  bool clean() const { return hardened_events == 0 && equivalence_violations == 0; }
};

struct FuzzOptions {
  unsigned workers = 1;
  std::size_t batch_size = 4096;
};

// `profiles` must contain the hardened profile and at least one vulnerable
// one; throws std::invalid_argument otherwise.
FuzzReport diff_fuzz(std::span<const RawFrame> corpus, const MutationBudget& budget,
                     std::span<const ParserProfile> profiles,
                     const FuzzOptions& options = {});

// Greedy truncation, one octet at a time: first from the end, then from the
// front, as long as `profile` still reports `cls`.
RawFrame minimize(const RawFrame& frame, VulnClass cls, const ParserProfile& profile);

// Line-oriented summary. Byte-identical for identical inputs.
std::string format_report(const FuzzReport& report);

}  // namespace shimguard

#endif  // SHIMGUARD_FUZZ_H_
