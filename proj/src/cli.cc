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

#include "shimguard/cli.h"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shimguard/attacks.h"
#include "shimguard/bench.h"
#include "shimguard/extract.h"
#include "shimguard/flowtable.h"
#include "shimguard/fuzz.h"
#include "shimguard/pcap.h"
#include "shimguard/rules.h"
#include "shimguard/wormsim.h"

namespace shimguard {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& s, std::string_view what) {
  std::vector<T> out;
  for (const std::string& item : split_list(s)) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("bad {} entry '{}'", what, item));
    }
  }
  if (out.empty()) throw UsageError(fmt::format("empty {} list", what));
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot open {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw UsageError(fmt::format("cannot write {}", path));
}

ParserProfile profile_from(const std::string& name, std::uint32_t label_limit) {
  const auto mode = parser_mode_from_string(name);
  if (!mode) throw UsageError(fmt::format("unknown profile '{}'", name));
  if (label_limit < 1) throw UsageError("--label-limit must be at least 1");
  ParserProfile p;
  p.mode = *mode;
  p.label_limit = label_limit;
  return p;
}

const std::vector<std::string> kProfileNames = {"hardened", "v232", "v240", "v250"};

// craft ---------------------------------------------------------------------

struct CraftArgs {
  std::string kind;
  std::size_t size = AttackSpec::kDefaultFrameSize;
  std::uint16_t total_length = 0;
  std::uint16_t dport = 8080;
  std::size_t fragment_len = 2;
  std::string payload;
  std::string out;
};

int run_craft(const CraftArgs& a, std::ostream& out) {
  AttackSpec spec;
  spec.kind = *attack_kind_from_string(a.kind);
  spec.frame_size = a.size;
  spec.total_length = a.total_length;
  spec.dst_port = a.dport;
  spec.fragment_len = a.fragment_len;
  if (!a.payload.empty()) {
    const std::string data = read_text(a.payload);
    spec.payload = Bytes(data.begin(), data.end());
  }
  const RawFrame frame = craft(spec);
  write_pcap(std::filesystem::path(a.out), std::span<const RawFrame>(&frame, 1));
  out << fmt::format("wrote 1 {} frame ({} octets) to {}\n", a.kind,
                     frame.capture_len(), a.out);
  return kExitOk;
}

// extract -------------------------------------------------------------------

struct ExtractArgs {
  std::string in;
  std::string profile = "hardened";
  std::uint32_t label_limit = ParserProfile::kDefaultLabelLimit;
  PortId in_port = 1;
};

int run_extract(const ExtractArgs& a, std::ostream& out) {
  const ParserProfile profile = profile_from(a.profile, a.label_limit);
  const auto frames = read_pcap(std::filesystem::path(a.in));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].empty()) {
      out << fmt::format("frame {} len=0 skipped (empty)\n", i);
      continue;
    }
    const ExtractionResult r = extract(frames[i], a.in_port, profile);
    out << fmt::format("frame {} len={} verdict={} class={}\n", i,
                       frames[i].capture_len(),
                       r.verdict == Verdict::kAccept ? "accept" : "drop",
                       to_string(classify_events(r.events)));
    out << "  key: " << to_string(r.key) << "\n";
    for (const CorruptionEvent& e : r.events) {
      out << fmt::format("  event {} offset={} byte_count={} profile={}\n",
                         to_string(e.kind), e.offset, e.byte_count,
                         to_string(e.profile.mode));
    }
  }
  return kExitOk;
}

// pipeline ------------------------------------------------------------------

struct PipelineArgs {
  std::string in;
  std::string rules;
  std::string profile = "hardened";
  std::uint32_t label_limit = ParserProfile::kDefaultLabelLimit;
  bool no_megaflow = false;
  std::string miss = "drop";
  PortId in_port = 1;
};

std::string_view path_name(PathTaken p) {
  switch (p) {
    case PathTaken::kParseDrop:
      return "parse-drop";
    case PathTaken::kMicroflow:
      return "microflow";
    case PathTaken::kMegaflow:
      return "megaflow";
    case PathTaken::kSlowPath:
      return "slow";
  }
  return "?";
}

int run_pipeline(const PipelineArgs& a, std::ostream& out) {
  const ParserProfile profile = profile_from(a.profile, a.label_limit);
  SwitchOptions opts;
  opts.megaflow_enabled = !a.no_megaflow;
  opts.miss_action = a.miss == "controller" ? MissAction::kToController : MissAction::kDrop;
  SwitchState state(load_rules(read_text(a.rules)), opts);
  const auto frames = read_pcap(std::filesystem::path(a.in));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].empty()) {
      out << fmt::format("frame {}: skipped (empty)\n", i);
      continue;
    }
    const ProcessResult r = state.process(frames[i], a.in_port, profile);
    out << fmt::format("frame {}: {} path={} class={}\n", i, to_string(r.disposition),
                       path_name(r.path), to_string(classify_events(r.extraction.events)));
  }
  out << dump_state(state);
  return kExitOk;
}

// fuzz ----------------------------------------------------------------------

struct FuzzArgs {
  std::string corpus;
  std::uint64_t iters = 1000;
  std::uint64_t seed = 0;
  std::string profiles = "hardened,v232,v240,v250";
  std::string strategies;
  std::size_t max_len = MutationBudget{}.max_len;
  std::uint32_t label_limit = ParserProfile::kDefaultLabelLimit;
  unsigned workers = 1;
  std::string out_report;
  std::string out_exemplars;
};

int run_fuzz(const FuzzArgs& a, std::ostream& out) {
  std::vector<ParserProfile> profiles;
  for (const std::string& name : split_list(a.profiles)) {
    profiles.push_back(profile_from(name, a.label_limit));
  }
  MutationBudget budget;
  budget.iterations = a.iters;
  budget.seed = a.seed;
  budget.max_len = a.max_len;
  if (!a.strategies.empty()) {
    budget.strategies.clear();
    for (const std::string& s : split_list(a.strategies)) {
      const auto st = strategy_from_string(s);
      if (!st) throw UsageError(fmt::format("unknown strategy '{}'", s));
      budget.strategies.push_back(*st);
    }
  }
  std::vector<RawFrame> corpus;
  for (RawFrame& f : read_pcap(std::filesystem::path(a.corpus))) {
    if (!f.empty()) corpus.push_back(std::move(f));
  }
  if (corpus.empty()) throw UsageError("corpus has no non-empty frames");

  FuzzReport report;
  try {
    report = diff_fuzz(corpus, budget, profiles, {.workers = a.workers});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string text = format_report(report);
  if (a.out_report.empty()) {
    out << text;
  } else {
    write_text(a.out_report, text);
    out << fmt::format("report written to {} ({})\n", a.out_report,
                       report.clean() ? "clean" : "FINDINGS");
  }
  if (!a.out_exemplars.empty()) {
    std::vector<RawFrame> ex;
    for (const auto& [cls, e] : report.exemplars) ex.push_back(e.frame);
    write_pcap(std::filesystem::path(a.out_exemplars), ex);
  }
  return report.clean() ? kExitOk : kExitFindings;
}

// wormsim -------------------------------------------------------------------

struct WormArgs {
  std::size_t nodes = 1;
  std::size_t attacker_host = 0;
  std::vector<std::string> timings;
  bool dos = false;
  std::size_t repeats = 1;
  std::string csv;
};

int run_wormsim(const WormArgs& a, std::ostream& out) {
  Topology topo{a.nodes, a.attacker_host};
  StageTimings t;
  for (const std::string& kv : a.timings) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw UsageError(fmt::format("--timing expects k=v, got '{}'", kv));
    }
    try {
      std::size_t used = 0;
      const std::string value = kv.substr(eq + 1);
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      t.set(kv.substr(0, eq), v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(fmt::format("bad --timing '{}': {}", kv, e.what()));
    }
  }
  try {
    topo.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::string text;
  if (a.dos) {
    if (a.repeats < 1) throw UsageError("--repeats must be at least 1");
    const auto outages = simulate_dos(topo, t, a.repeats);
    text = "node,start_s,end_s\n";
    double total = 0.0;
    for (const NodeOutage& n : outages) {
      for (const OutageInterval& iv : n.intervals) {
        text += fmt::format("compute-{},{},{}\n", n.node, iv.start_s, iv.end_s);
      }
      total += n.total_s;
    }
    text += fmt::format("total_outage_s={}\n", total);
  } else {
    text = timeline_csv(simulate(topo, t));
  }
  if (a.csv.empty()) {
    out << text;
  } else {
    write_text(a.csv, text);
    // Keep the summary line on stdout.
    out << text.substr(text.rfind('\n', text.size() - 2) + 1);
  }
  return kExitOk;
}

// bench ---------------------------------------------------------------------

struct BenchArgs {
  std::string mode;
  std::string rates;
  double duration = 5.0;
  std::string sizes;
  std::string csv;
  std::string latency_csv;
  std::size_t latency_count = BenchConfig{}.latency_count;
  std::size_t warmup_drop = BenchConfig{}.warmup_drop;
  double interval_ms = 0.0;
  bool full_scale = false;
  std::string what = "both";
  std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& a, std::ostream& out) {
  BenchConfig cfg = BenchConfig::ci_scaled(*path_mode_from_string(a.mode));
  cfg.duration_s = a.duration;
  cfg.interval_ms = a.interval_ms;
  if (a.full_scale) {
    const BenchConfig full;
    cfg.duration_s = full.duration_s;
    cfg.interval_ms = full.interval_ms;
  }
  if (!a.rates.empty()) cfg.rates_pps = parse_number_list<std::uint64_t>(a.rates, "rate");
  if (!a.sizes.empty()) cfg.packet_sizes = parse_number_list<std::size_t>(a.sizes, "size");
  cfg.latency_count = a.latency_count;
  cfg.warmup_drop = a.warmup_drop;
  cfg.seed = a.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  SwitchState state(bench_rules());
  if (a.what != "latency") {
    const BenchResult r = run_throughput(cfg, state);
    const std::string csv = throughput_csv(r);
    if (a.csv.empty()) {
      out << csv;
    } else {
      write_text(a.csv, csv);
    }
    for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
  }
  if (a.what != "throughput") {
    const std::string csv = latency_csv(run_latency(cfg, state));
    if (a.latency_csv.empty()) {
      out << csv;
    } else {
      write_text(a.latency_csv, csv);
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"shimguard: virtual-switch parser hardening and attack-modeling toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  CraftArgs craft_args;
  auto* craft_cmd = app.add_subcommand("craft", "Write a malformed attack frame to a pcap");
  craft_cmd->add_option("--kind", craft_args.kind, "Attack frame kind")
      ->required()
      ->check(CLI::IsMember({"long-shim", "short-shim", "acl-bypass"}));
  craft_cmd->add_option("--size", craft_args.size, "Long Shim frame size in octets")
      ->capture_default_str();
  craft_cmd->add_option("--total-length", craft_args.total_length,
                        "ACL bypass IPv4 total_length (below 20)")
      ->capture_default_str();
  craft_cmd->add_option("--dport", craft_args.dport, "ACL bypass destination port")
      ->capture_default_str();
  craft_cmd->add_option("--fragment-len", craft_args.fragment_len,
                        "Short Shim trailing fragment octets (1-3)")
      ->capture_default_str();
  craft_cmd->add_option("--payload", craft_args.payload,
                        "File whose bytes are packed into the Long Shim labels")
      ->check(CLI::ExistingFile);
  craft_cmd->add_option("--out", craft_args.out, "Output pcap")->required();

  ExtractArgs extract_args;
  auto* extract_cmd = app.add_subcommand("extract", "Extract flow keys and corruption events");
  extract_cmd->add_option("--in", extract_args.in, "Input pcap")->required();
  extract_cmd->add_option("--profile", extract_args.profile, "Parser profile")
      ->check(CLI::IsMember(kProfileNames))
      ->capture_default_str();
  extract_cmd->add_option("--label-limit", extract_args.label_limit,
                          "Label stack buffer capacity")
      ->capture_default_str();
  extract_cmd->add_option("--in-port", extract_args.in_port, "Ingress port")
      ->capture_default_str();

  PipelineArgs pipe_args;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run frames through the switch");
  pipe_cmd->add_option("--in", pipe_args.in, "Input pcap")->required();
  pipe_cmd->add_option("--rules", pipe_args.rules, "Rule file")->required();
  pipe_cmd->add_option("--profile", pipe_args.profile, "Parser profile")
      ->check(CLI::IsMember(kProfileNames))
      ->capture_default_str();
  pipe_cmd->add_option("--label-limit", pipe_args.label_limit,
                       "Label stack buffer capacity")
      ->capture_default_str();
  pipe_cmd->add_flag("--no-megaflow", pipe_args.no_megaflow,
                     "Disable the flow caches (every packet takes the slow path)");
  pipe_cmd->add_option("--miss", pipe_args.miss, "Action on table miss")
      ->check(CLI::IsMember({"drop", "controller"}))
      ->capture_default_str();
  pipe_cmd->add_option("--in-port", pipe_args.in_port, "Ingress port")
      ->capture_default_str();

  FuzzArgs fuzz_args;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Differential mutation fuzzing");
  fuzz_cmd->add_option("--corpus", fuzz_args.corpus, "Seed pcap")->required();
  fuzz_cmd->add_option("--iters", fuzz_args.iters, "Mutations to run")->capture_default_str();
  fuzz_cmd->add_option("--seed", fuzz_args.seed, "RNG seed")
      ->envname("SHIMGUARD_SEED")
      ->capture_default_str();
  fuzz_cmd->add_option("--profiles", fuzz_args.profiles,
                       "Comma-separated profiles (hardened plus vulnerable ones)")
      ->capture_default_str();
  fuzz_cmd->add_option("--strategies", fuzz_args.strategies,
                       "Comma-separated mutation strategies (default: all)");
  fuzz_cmd->add_option("--max-len", fuzz_args.max_len, "Maximum mutant length")
      ->capture_default_str();
  fuzz_cmd->add_option("--label-limit", fuzz_args.label_limit,
                       "Label stack buffer capacity")
      ->capture_default_str();
  fuzz_cmd->add_option("--workers", fuzz_args.workers, "Evaluation threads")
      ->capture_default_str();
  fuzz_cmd->add_option("--out-report", fuzz_args.out_report, "Write the report here");
  fuzz_cmd->add_option("--out-exemplars", fuzz_args.out_exemplars,
                       "Write minimized exemplars to this pcap");

  WormArgs worm_args;
  auto* worm_cmd = app.add_subcommand("wormsim", "Simulate worm propagation or DoS outage");
  worm_cmd->add_option("--nodes", worm_args.nodes, "Compute nodes")->capture_default_str();
  worm_cmd->add_option("--attacker-host", worm_args.attacker_host,
                       "Compute node hosting the attacker VM")
      ->capture_default_str();
  worm_cmd->add_option("--timing", worm_args.timings,
                       "Stage timing override k=v (exploit_send, download, "
                       "restart_sleep, hop_overhead, controller_restore, dos_outage)");
  worm_cmd->add_flag("--dos", worm_args.dos, "Model repeated crash attacks instead");
  worm_cmd->add_option("--repeats", worm_args.repeats, "Back-to-back attacks")
      ->capture_default_str();
  worm_cmd->add_option("--csv", worm_args.csv, "Write the CSV here");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Slow/fast path throughput and latency");
  bench_cmd->add_option("--mode", bench_args.mode, "Path mode")
      ->required()
      ->check(CLI::IsMember({"slow", "fast"}));
  bench_cmd->add_option("--rates", bench_args.rates, "Comma-separated offered rates (pps)");
  bench_cmd->add_option("--duration", bench_args.duration, "Seconds per rate")
      ->capture_default_str();
  bench_cmd->add_option("--sizes", bench_args.sizes, "Comma-separated latency frame sizes");
  bench_cmd->add_option("--csv", bench_args.csv, "Write the throughput CSV here");
  bench_cmd->add_option("--latency-csv", bench_args.latency_csv,
                        "Write the latency CSV here");
  bench_cmd->add_option("--latency-count", bench_args.latency_count,
                        "Latency probes per size")
      ->capture_default_str();
  bench_cmd->add_option("--warmup-drop", bench_args.warmup_drop,
                        "Leading probes discarded per size")
      ->capture_default_str();
  bench_cmd->add_option("--interval-ms", bench_args.interval_ms,
                        "Gap between latency probes")
      ->capture_default_str();
  bench_cmd->add_flag("--full-scale", bench_args.full_scale,
                      "120 s per rate and 100 ms probe spacing");
  bench_cmd->add_option("--what", bench_args.what, "Which measurement")
      ->check(CLI::IsMember({"throughput", "latency", "both"}))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "RNG seed for random frames")
      ->envname("SHIMGUARD_SEED")
      ->capture_default_str();

  std::vector<const char*> argv{"shimguard"};
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*craft_cmd) return run_craft(craft_args, out);
    if (*extract_cmd) return run_extract(extract_args, out);
    if (*pipe_cmd) return run_pipeline(pipe_args, out);
    if (*fuzz_cmd) return run_fuzz(fuzz_args, out);
    if (*worm_cmd) return run_wormsim(worm_args, out);
    if (*bench_cmd) return run_bench(bench_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RuleParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PcapError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const AttackError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace shimguard
