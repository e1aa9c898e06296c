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

#include "shimguard/mutate.h"

#include <algorithm>
#include <stdexcept>

namespace shimguard {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kBitflip:
      return "bitflip";
    case Strategy::kByteflip:
      return "byteflip";
    case Strategy::kLengthTruncate:
      return "length-truncate";
    case Strategy::kFieldSplice:
      return "field-splice";
    case Strategy::kLseDuplicate:
      return "lse-duplicate";
  }
  return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

std::size_t below(MutationRng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

Bytes byteflip(Bytes b, MutationRng& rng) {
  const std::size_t pos = below(rng, b.size());
  b[pos] ^= static_cast<std::uint8_t>(1 + below(rng, 255));
  return b;
}

Bytes length_truncate(Bytes b, MutationRng& rng) {
  const bool ipv4 = b.size() >= kEthHeaderLen + 4 &&
                    load_be16(b.data() + 12) == kEthTypeIpv4;
  if (ipv4 && below(rng, 2) == 0) {
    // Shrink the IPv4 total_length field instead of the frame.
    const std::uint16_t tl = load_be16(b.data() + kEthHeaderLen + 2);
    const auto shrunk = static_cast<std::uint16_t>(below(rng, std::size_t{tl} + 1));
    b[kEthHeaderLen + 2] = static_cast<std::uint8_t>(shrunk >> 8);
    b[kEthHeaderLen + 3] = static_cast<std::uint8_t>(shrunk);
    return b;
  }
  if (b.size() < 2) return byteflip(std::move(b), rng);
  b.resize(1 + below(rng, b.size() - 1));
  return b;
}

Bytes field_splice(const Bytes& a, const Bytes& donor, MutationRng& rng) {
  const std::size_t cut = below(rng, std::min(a.size(), donor.size()) + 1);
  Bytes out(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
  out.insert(out.end(), donor.begin() + static_cast<std::ptrdiff_t>(cut),
             donor.end());
  if (out.empty()) out = a;
  return out;
}

Bytes lse_duplicate(Bytes b, MutationRng& rng) {
  const bool mpls = b.size() >= kEthHeaderLen + kLseLen &&
                    is_mpls_ethertype(load_be16(b.data() + 12));
  if (!mpls) return byteflip(std::move(b), rng);
  const std::size_t labels = (b.size() - kEthHeaderLen) / kLseLen;
  const std::size_t at = kEthHeaderLen + below(rng, labels) * kLseLen;
  const Bytes copy(b.begin() + static_cast<std::ptrdiff_t>(at),
                   b.begin() + static_cast<std::ptrdiff_t>(at + kLseLen));
  b.insert(b.begin() + static_cast<std::ptrdiff_t>(at), copy.begin(), copy.end());
  return b;
}

}  // namespace

RawFrame apply_strategy(const RawFrame& frame, Strategy strategy,
                        MutationRng& rng, const RawFrame* donor) {
  if (frame.empty()) throw std::invalid_argument("cannot mutate an empty frame");
  Bytes b = frame.bytes();
  switch (strategy) {
    case Strategy::kBitflip: {
      const std::size_t bit = below(rng, b.size() * 8);
      b[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
      break;
    }
    case Strategy::kByteflip:
      b = byteflip(std::move(b), rng);
      break;
    case Strategy::kLengthTruncate:
      b = length_truncate(std::move(b), rng);
      break;
    case Strategy::kFieldSplice:
      b = field_splice(b, donor ? donor->bytes() : frame.bytes(), rng);
      break;
    case Strategy::kLseDuplicate:
      b = lse_duplicate(std::move(b), rng);
      break;
  }
  return RawFrame(std::move(b), frame.ts());
}

Mutator::Mutator(std::vector<RawFrame> corpus, MutationBudget budget)
    : corpus_(std::move(corpus)),
      budget_(std::move(budget)),
      rng_(budget_.seed),
      bit_cursor_(corpus_.size(), 0) {
  if (corpus_.empty()) throw std::invalid_argument("mutation corpus is empty");
  if (budget_.strategies.empty()) {
    throw std::invalid_argument("no mutation strategies selected");
  }
  std::sort(budget_.strategies.begin(), budget_.strategies.end());
  budget_.strategies.erase(
      std::unique(budget_.strategies.begin(), budget_.strategies.end()),
      budget_.strategies.end());
  if (budget_.max_len == 0) throw std::invalid_argument("max_len must be positive");
  for (const RawFrame& f : corpus_) {
    if (f.empty()) throw std::invalid_argument("corpus contains an empty frame");
  }
}

RawFrame Mutator::next() {
  const Strategy s = budget_.strategies[below(budget_.strategies.size())];
  const std::size_t idx = below(corpus_.size());
  const RawFrame& parent = corpus_[idx];
  RawFrame child;

  if (s == Strategy::kBitflip && bit_cursor_[idx] < parent.capture_len() * 8) {
    // Walk every bit of a seed once before flipping at random.
    const std::size_t bit = bit_cursor_[idx]++;
    Bytes b = parent.bytes();
    b[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    child = RawFrame(std::move(b), parent.ts());
  } else {
    const RawFrame& donor = corpus_[below(corpus_.size())];
    child = apply_strategy(parent, s, rng_, &donor);
  }

  if (child.capture_len() > budget_.max_len) {
    Bytes b = child.bytes();
    b.resize(budget_.max_len);
    child = RawFrame(std::move(b), child.ts());
  }
  ++emitted_;
  return child;
}

std::vector<RawFrame> mutate(std::span<const RawFrame> corpus,
                             const MutationBudget& budget) {
  Mutator m({corpus.begin(), corpus.end()}, budget);
  std::vector<RawFrame> out;
  out.reserve(budget.iterations);
  while (!m.done()) out.push_back(m.next());
  return out;
}

}  // namespace shimguard
