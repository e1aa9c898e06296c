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

// Deterministic mutation engine. The stream of mutants is a pure function
// of the corpus and the budget.

#ifndef SHIMGUARD_MUTATE_H_
#define SHIMGUARD_MUTATE_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "shimguard/packet.h"

namespace shimguard {

enum class Strategy { kBitflip, kByteflip, kLengthTruncate, kFieldSplice, kLseDuplicate };

inline constexpr Strategy kAllStrategies[] = {
    Strategy::kBitflip, Strategy::kByteflip, Strategy::kLengthTruncate,
    Strategy::kFieldSplice, Strategy::kLseDuplicate};

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view name);

struct MutationBudget {
  std::uint64_t iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t max_len = 9018;
  std::vector<Strategy> strategies{std::begin(kAllStrategies),
                                   std::end(kAllStrategies)};
};

using MutationRng = std::mt19937_64;

// One application of `strategy`. `donor` feeds field-splice. Strategies that
// do not apply to the frame (lse-duplicate on a non-MPLS frame, truncating a
// 1-octet frame) fall back to byteflip. Never returns an empty frame.
RawFrame apply_strategy(const RawFrame& frame, Strategy strategy,
                        MutationRng& rng, const RawFrame* donor = nullptr);

class Mutator {
 public:
  // Throws std::invalid_argument on an empty corpus or strategy set.
  Mutator(std::vector<RawFrame> corpus, MutationBudget budget);

  bool done() const { return emitted_ >= budget_.iterations; }
  std::uint64_t emitted() const { return emitted_; }
  RawFrame next();

 private:
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  std::vector<RawFrame> corpus_;
  MutationBudget budget_;
  MutationRng rng_;
  std::vector<std::size_t> bit_cursor_;
  std::uint64_t emitted_ = 0;
};

std::vector<RawFrame> mutate(std::span<const RawFrame> corpus,
                             const MutationBudget& budget);

}  // namespace shimguard

#endif  // SHIMGUARD_MUTATE_H_
