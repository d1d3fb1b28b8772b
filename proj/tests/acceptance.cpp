// Copyright 2026 The cachesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cachesim/cache.hpp"
#include "cachesim/cli.hpp"
#include "cachesim/config.hpp"
#include "cachesim/hierarchy.hpp"
#include "cachesim/numfmt.hpp"
#include "cachesim/report.hpp"
#include "cachesim/sweep.hpp"
#include "cachesim/timing.hpp"
#include "cachesim/trace.hpp"
#include "oracles.hpp"

using namespace cachesim;

namespace {

using Seconds = std::chrono::duration<double>;

// Collects failures for one criterion; only the first few are kept.
struct Verdict {
  std::vector<std::string> failures;
  std::uint64_t checks = 0;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

Clock zero_clock() {
  return [] { return 0.0; };
}

std::uint64_t lru_direct(const std::vector<std::uint64_t>& blocks, std::uint64_t nsets,
                         std::uint64_t bsize, std::uint64_t assoc, ReplacementPolicy p,
                         std::uint64_t seed = 1) {
  Cache c({"c", nsets, bsize, assoc, p}, seed);
  for (auto b : blocks) c.access(b * bsize, AccessKind::Read);
  return c.stats().misses;
}

// Random data traces with a working set sized against the cache under test,
// mixing uniform, looping and strided references.
std::vector<TraceRecord> property_trace(std::mt19937_64& rng, std::size_t count,
                                        std::uint64_t capacity) {
  const std::uint64_t range = std::max<std::uint64_t>(64, capacity >> 2 << (rng() % 5));
  std::vector<TraceRecord> t;
  t.reserve(count);
  const auto shape = rng() % 3;
  std::uint64_t cursor = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t addr;
    if (shape == 0) {
      addr = rng() % range;
    } else if (shape == 1) {
      addr = cursor % range;
      cursor += 4 + 4 * (rng() % 8);
    } else {
      addr = rng() % 4 == 0 ? rng() % (4 * range) : (cursor += 64) % range;
    }
    if (rng() % 4 == 0)
      t.push_back(Store{addr, 4});
    else
      t.push_back(Load{addr, 4});
  }
  return t;
}

std::vector<TraceRecord> random_program(std::mt19937_64& rng, std::size_t n) {
  std::vector<TraceRecord> t;
  std::uint64_t pc = 0x400000;
  const char* regions[] = {"main", "f", "g", "h"};
  for (std::size_t i = 0; i < n; ++i) {
    const auto roll = rng() % 100;
    if (roll < 50) {
      t.push_back(Inst{pc, static_cast<std::uint32_t>(1 + rng() % 4)});
      pc = rng() % 10 == 0 ? 0x400000 + (rng() % 8192) * 4 : pc + 4;
    } else if (roll < 70) {
      t.push_back(Load{0x10000000 + rng() % 65536, static_cast<std::uint32_t>(1 << (rng() % 4))});
    } else if (roll < 85) {
      t.push_back(Store{0x10000000 + rng() % 65536, static_cast<std::uint32_t>(1 + rng() % 8)});
    } else if (roll < 94) {
      t.push_back(Branch{rng() % 2 == 0});
    } else if (roll < 96) {
      t.push_back(Syscall{});
    } else {
      t.push_back(Region{regions[rng() % 4]});
    }
  }
  return t;
}

std::string spec_error(std::string_view text) {
  try {
    parse_cache_spec(text);
  } catch (const ConfigError& e) {
    return std::string(to_string(e.kind()));
  }
  return "accepted";
}

// Config fidelity.
Verdict criterion_config() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  for (const char* s : {"dl1:256:32:1:l", "ul2:1024:64:4:l", "il1:256:32:1:l", "itlb:16:4096:4:l",
                        "dtlb:32:4096:4:l", "dl1:4096:32:1:l", "dtlb:128:4096:32:r",
                        "il1:128:64:1:l"}) {
    try {
      v.expect(parse_cache_spec(s).to_string() == s, fmt::format("{} does not round-trip", s));
    } catch (const ConfigError& e) {
      v.expect(false, fmt::format("{} rejected: {}", s, e.what()));
    }
  }
  const std::pair<const char*, ConfigErrorKind> bad[] = {
      {"dl1:100:32:1:l", ConfigErrorKind::NonPowerOfTwo},
      {"dl1:256:48:1:l", ConfigErrorKind::NonPowerOfTwo},
      {"dl1:256:32:3:l", ConfigErrorKind::NonPowerOfTwo},
      {"dl1:256:32:1", ConfigErrorKind::WrongFieldCount},
      {"dl1:256:32:1:l:x", ConfigErrorKind::WrongFieldCount},
      {"dl1:256:32:1:x", ConfigErrorKind::UnknownPolicy},
      {"dl1:abc:32:1:l", ConfigErrorKind::NonNumeric},
      {":256:32:1:l", ConfigErrorKind::InvalidName},
  };
  for (const auto& [text, kind] : bad) {
    const std::string got = spec_error(text);
    v.expect(got == to_string(kind), fmt::format("{} gave {}, want {}", text, got, to_string(kind)));
  }
  const std::pair<std::vector<std::string>, ConfigErrorKind> bad_flags[] = {
      {{"-cache:dl1", "il1"}, ConfigErrorKind::InvalidUnification},
      {{"-cache:il2", "dl1"}, ConfigErrorKind::InvalidUnification},
      {{"-cache:dl3", "x:1:1:1:l"}, ConfigErrorKind::UnknownFlag},
      {{"-cache:dl1"}, ConfigErrorKind::MissingValue},
  };
  for (const auto& [args, kind] : bad_flags) {
    std::string got = "accepted";
    try {
      parse_hierarchy_args(args);
    } catch (const ConfigError& e) {
      got = to_string(e.kind());
    }
    v.expect(got == to_string(kind), fmt::format("{} gave {}", args[0], got));
  }
  const double took = Seconds(std::chrono::steady_clock::now() - start).count();
  v.expect(took < 1.0, fmt::format("took {:.3f} s", took));
  return v;
}

// Timing arithmetic anchored on the published VEX summary.
Verdict criterion_timing() {
  Verdict v;
  TimingSpec t;
  t.icache_penalty = 45;
  t.miss_penalty = 36;
  auto side_run = [&](EventKind kind, std::uint64_t misses) {
    std::vector<MemEvent> events;
    AccountSummary s;
    s.insn_count = s.op_count = 100 * misses + 1;
    const Side side = kind == EventKind::IMiss ? Side::Instruction : Side::Data;
    for (std::uint64_t i = 0; i < misses; ++i) events.push_back({kind, side, 100 * i, 32, 0});
    SideStats& stats = kind == EventKind::IMiss ? s.imem : s.dmem;
    stats = {misses, 0, misses};
    s.region_names = {"main"};
    s.region_insts = {s.insn_count};
    s.region_imem = {s.imem};
    s.region_dmem = {s.dmem};
    return account(events, t, s);
  };
  const CycleReport i = side_run(EventKind::IMiss, 120);
  const CycleReport d = side_run(EventKind::DMiss, 40);
  v.expect(i.imem.stall_miss == 5400, fmt::format("I stall_miss {}", i.imem.stall_miss));
  v.expect(d.dmem.stall_miss == 1440, fmt::format("D stall_miss {}", d.dmem.stall_miss));

  CycleReport c;
  c.execution_cycles = 1488;
  c.stall_cycles = 7263;
  c.total_cycles = c.execution_cycles + c.stall_cycles;
  c.executed_operations = 1689;
  c.branch = {334, 243, 91, 243};
  c.imem = {1250, 1130, 120, 5580, 5400, 180};
  c.dmem = {687, 647, 40, 1440, 1440, 0};
  c.bus_busy_cycles = 6840;
  const std::string text = render_vex_summary(c);
  auto has = [&](const std::string& s) { return text.find(s) != std::string::npos; };
  v.expect(has("Total Cycles:                8751"), "Total Cycles line");
  v.expect(has("Execution Cycles:            1488 ( 17.00%)"), "Execution Cycles line");
  v.expect(has("Stall Cycles:                7263 ( 83.00%)"), "Stall Cycles line");
  v.expect(has("  Hits (Hit Rate):            1130 ( 90.40%)"), "I hit rate line");
  v.expect(has("  Hits (Hit Rate):            647 ( 94.18%)"), "D hit rate line");
  const ReportRates r = rates(c);
  v.expect(r.imem.hit_rate == "90.40%", "I hit rate");
  v.expect(r.dmem.hit_rate == "94.18%", "D hit rate");
  v.expect(c.check_identities(), "identities");
  return v;
}

// Rate formatting anchored on the published sim-cache output.
Verdict criterion_rates() {
  Verdict v;
  v.expect(format_ratio(435, 7064, 1, 4) == "0.0616", "435/7064");
  v.expect(format_ratio(221, 7064, 1, 4) == "0.0313", "221/7064");
  SimReport r;
  r.sim_num_insn = 7064;
  r.sim_elapsed_time = 1;
  CacheStats il1;
  il1.accesses = 7064;
  il1.misses = 435;
  il1.hits = 7064 - 435;
  il1.replacements = 221;
  r.caches.push_back({"il1", false, il1});
  const std::string text = render_simcache(r);
  auto has = [&](const std::string& s) { return text.find(s) != std::string::npos; };
  v.expect(has("sim_inst_rate 7064.0000 #"), "sim_inst_rate");
  v.expect(has("il1.miss_rate 0.0616 #"), "il1.miss_rate");
  v.expect(has("il1.repl_rate 0.0313 #"), "il1.repl_rate");
  return v;
}

struct PropertyCase {
  std::vector<TraceRecord> trace;
  std::uint64_t nsets;
  std::uint64_t bsize;
};

PropertyCase make_case(std::mt19937_64& rng, std::size_t max_refs) {
  PropertyCase c;
  c.nsets = 16ull << (rng() % 7);   // 16..1024
  c.bsize = 16ull << (rng() % 4);   // 16..128
  const std::size_t n = 1 + rng() % max_refs;
  c.trace = property_trace(rng, n, c.nsets * c.bsize * 8);
  return c;
}

// Stack-distance misses against direct LRU simulation.
Verdict criterion_sweep_oracle() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  for (int round = 0; round < 1000; ++round) {
    // A few traces at the full size bound, the rest smaller.
    const PropertyCase pc = make_case(rng, round % 100 == 0 ? 100000 : 20000);
    const auto blocks = block_references(pc.trace, pc.bsize);
    const auto h = stack_distances_blocks(blocks, pc.nsets, 1);
    for (std::uint64_t a : {1, 2, 4, 8}) {
      const std::uint64_t direct = lru_direct(blocks, pc.nsets, pc.bsize, a, ReplacementPolicy::Lru);
      v.expect(misses_for_assoc(h, a) == direct,
               fmt::format("round {} {}x{}x{}: {} vs {}", round, pc.nsets, pc.bsize, a,
                           misses_for_assoc(h, a), direct));
    }
  }
  const double took = Seconds(std::chrono::steady_clock::now() - start).count();
  v.expect(took < 60.0, fmt::format("took {:.1f} s", took));
  return v;
}

// Misses never increase with associativity.
Verdict criterion_stack_property() {
  Verdict v;
  std::mt19937_64 rng(5);
  for (int round = 0; round < 1000; ++round) {
    const PropertyCase pc = make_case(rng, 5000);
    const auto blocks = block_references(pc.trace, pc.bsize);
    const auto h = stack_distances_blocks(blocks, pc.nsets, 1);
    for (std::uint64_t a = 1; a < 32; ++a)
      v.expect(misses_for_assoc(h, a + 1) <= misses_for_assoc(h, a),
               fmt::format("round {} assoc {}", round, a));
    std::uint64_t prev = UINT64_MAX;
    for (std::uint64_t a : {1, 2, 4, 8, 16}) {
      const std::uint64_t m = lru_direct(blocks, pc.nsets, pc.bsize, a, ReplacementPolicy::Lru);
      v.expect(m <= prev, fmt::format("round {} direct assoc {}", round, a));
      prev = m;
    }
  }
  return v;
}

// Belady dominance and exactness.
Verdict criterion_belady() {
  Verdict v;
  std::mt19937_64 rng(6);
  for (int round = 0; round < 1000; ++round) {
    const PropertyCase pc = make_case(rng, 3000);
    const auto blocks = block_references(pc.trace, pc.bsize);
    // Fewer sets than the geometry range so replacement actually happens.
    const std::uint64_t nsets = 1ull << (rng() % 5);
    const std::uint64_t assoc = 1ull << (rng() % 4);
    const std::uint64_t opt = belady_misses_blocks(blocks, nsets, assoc);
    const std::uint64_t lru = lru_direct(blocks, nsets, pc.bsize, assoc, ReplacementPolicy::Lru);
    const std::uint64_t fifo = lru_direct(blocks, nsets, pc.bsize, assoc, ReplacementPolicy::Fifo);
    const std::uint64_t rnd =
        lru_direct(blocks, nsets, pc.bsize, assoc, ReplacementPolicy::Random, rng());
    v.expect(opt <= lru && opt <= fifo && opt <= rnd,
             fmt::format("round {}: opt {} lru {} fifo {} random {}", round, opt, lru, fifo, rnd));
  }
  for (int round = 0; round < 5000; ++round) {
    const std::size_t n = 1 + rng() % 10;
    const std::uint64_t alphabet = 1 + rng() % 6;
    std::vector<std::uint64_t> refs(n);
    for (auto& r : refs) r = rng() % alphabet;
    const std::size_t cap = 1 + rng() % 3;
    const std::uint64_t opt = belady_misses_blocks(refs, 1, cap);
    const std::uint64_t best = oracle::exhaustive_min_misses(refs, cap);
    v.expect(opt == best, fmt::format("tiny round {}: {} vs {}", round, opt, best));
  }
  return v;
}

const std::vector<std::vector<std::string>> kShapes = {
    {},
    {"-cache:dl1", "ul1:64:32:2:f", "-cache:il1", "dl1"},
    {"-cache:il1", "dl2"},
    {"-cache:dl2", "none", "-cache:il2", "none"},
    {"-cache:il1", "il1:32:64:1:l", "-cache:il2", "il2:64:64:2:r", "-cache:dl2", "dl2:128:64:4:r"},
    {"-cache:dl1", "dl1:16:16:4:r", "-flush", "true"},
    {"-tlb:itlb", "none", "-tlb:dtlb", "dtlb:4:4096:2:f", "-cache:il1", "none"},
};

void check_ledger(Verdict& v, const Hierarchy& h, const SimReport& r, const std::string& label) {
  v.expect(h.check_ledger(), label + ": routing ledger");
  for (const auto& c : r.caches) {
    v.expect(c.stats.accesses == c.stats.hits + c.stats.misses, label + ": " + c.name + " a=h+m");
    std::uint64_t misses = 0, writebacks = 0;
    for (const auto& u : r.caches) {
      if (h.next_level_of(u.name) != c.name) continue;
      misses += u.stats.misses;
      writebacks += u.stats.writebacks;
    }
    const Routing* route = h.routing(c.name);
    v.expect(route->from_misses == misses && route->from_writebacks == writebacks,
             label + ": " + c.name + " routed traffic");
  }
  RegionCounters sum;
  sum.caches.resize(r.caches.size());
  for (const auto& reg : r.regions) {
    sum.insts += reg.insts;
    sum.refs += reg.refs;
    sum.branches += reg.branches;
    sum.imem += reg.imem;
    sum.dmem += reg.dmem;
    for (std::size_t i = 0; i < r.caches.size() && i < reg.caches.size(); ++i)
      sum.caches[i] += reg.caches[i];
  }
  bool caches_match = true;
  for (std::size_t i = 0; i < r.caches.size(); ++i)
    caches_match = caches_match && sum.caches[i] == r.caches[i].stats;
  v.expect(sum.insts == r.sim_num_insn && sum.refs == r.sim_num_refs &&
               sum.branches == r.branches && sum.imem == r.imem && sum.dmem == r.dmem &&
               caches_match,
           label + ": region sums");
}

// Ledger identities after every property run.
Verdict criterion_ledger() {
  Verdict v;
  std::mt19937_64 rng(7);
  for (std::size_t s = 0; s < kShapes.size(); ++s) {
    for (int round = 0; round < 40; ++round) {
      Hierarchy h = Hierarchy::build(parse_hierarchy_args(kShapes[s]), rng());
      const SimReport r = h.run(random_program(rng, 3000), zero_clock());
      check_ledger(v, h, r, fmt::format("shape {} round {}", s, round));
    }
  }
  for (int round = 0; round < 100; ++round) {
    VexConfig cfg;
    cfg.icache = parse_cache_spec(fmt::format("icache:{}:32:{}:l", 1 << (rng() % 5), 1 << (rng() % 3)));
    cfg.dcache = parse_cache_spec(fmt::format("dcache:{}:32:{}:l", 1 << (rng() % 5), 1 << (rng() % 3)));
    Hierarchy h = Hierarchy::build(vex_hierarchy(cfg));
    h.set_event_log(true);
    const SimReport r = h.run(random_program(rng, 3000), zero_clock());
    check_ledger(v, h, r, fmt::format("vex round {}", round));
    const CycleReport c = account(h.events(), cfg.timing, summarize(r));
    v.expect(c.check_identities(), fmt::format("vex round {}: cycle identities", round));
    std::uint64_t region_total = 0;
    for (const auto& reg : c.regions) region_total += reg.total_cycles;
    v.expect(region_total == c.total_cycles, fmt::format("vex round {}: region cycles", round));
  }
  return v;
}

// Byte-identical reports for identical inputs.
Verdict criterion_determinism() {
  Verdict v;
  std::mt19937_64 rng(8);
  for (std::size_t s = 0; s < kShapes.size(); ++s) {
    const auto trace = random_program(rng, 20000);
    const HierarchySpec spec = parse_hierarchy_args(kShapes[s]);
    auto render = [&] {
      Hierarchy h = Hierarchy::build(spec, 42);
      const SimReport r = h.run(trace, zero_clock());
      return render_simcache(r) + export_report(r, ExportFormat::Json);
    };
    v.expect(render() == render(), fmt::format("shape {}", s));
  }

  const auto dir = std::filesystem::temp_directory_path() / "cachesim_acceptance";
  std::filesystem::create_directories(dir);
  const std::string trace_path = (dir / "t.ctb").string();
  save_trace(trace_path, random_program(rng, 20000));
  const std::string cfg_path = (dir / "vex.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "CoreCkFreq 1000\nBusCkFreq 500\nlg2CacheSize 12\nlg2Sets 2\nlg2LineSize 5\n"
           "MissPenalty 36\nWBPenalty 33\nlg2ICacheSize 12\nlg2ICacheSets 0\n"
           "lg2ICacheLineSize 6\nICachePenalty 45\nNumCaches 1\nBranchStall 1\n";
  }
  const std::vector<std::vector<std::string>> commands = {
      {"sim", "-cache:dl1", "dl1:64:32:4:r", "-cache:dl2", "ul2:128:64:8:r", "-seed", "9",
       trace_path},
      {"sim", "--format", "json", trace_path},
      {"vexsim", cfg_path, trace_path, "--profile"},
      {"sweep", "--sets", "16,64", "--bsize", "32", "--assoc", "1,2,4", "--opt", "--workers", "4",
       trace_path},
  };
  for (const auto& args : commands) {
    auto once = [&] {
      std::ostringstream out, err;
      const int code = run_cli(args, out, err, zero_clock());
      return fmt::format("{}\n{}{}", code, out.str(), err.str());
    };
    const std::string first = once();
    v.expect(first.rfind("0\n", 0) == 0, fmt::format("{} failed: {}", args[0], first));
    v.expect(first == once(), fmt::format("{} output differs", args[0]));
  }
  std::filesystem::remove_all(dir);
  return v;
}

// A million records through the default hierarchy.
Verdict criterion_throughput() {
  Verdict v;
  std::vector<TraceRecord> trace = gen_mixed(9, 1000000);
  trace.resize(1000000);
  Hierarchy h = Hierarchy::build(default_hierarchy());
  const auto start = std::chrono::steady_clock::now();
  const SimReport r = h.run(trace, zero_clock());
  const double took = Seconds(std::chrono::steady_clock::now() - start).count();
  v.expect(r.caches.size() == 5, "default hierarchy shape");
  v.expect(took < 5.0, fmt::format("took {:.2f} s", took));
  std::printf("  1000000 records in %.3f s\n", took);
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"config strings parse, round-trip and reject bad input", criterion_config},
      {"timing arithmetic matches the published summary", criterion_timing},
      {"rate formatting matches the published output", criterion_rates},
      {"stack-distance misses equal direct LRU simulation", criterion_sweep_oracle},
      {"LRU misses are non-increasing in associativity", criterion_stack_property},
      {"OPT dominates and equals exhaustive search", criterion_belady},
      {"ledger identities hold after every run", criterion_ledger},
      {"reports are byte-identical across runs", criterion_determinism},
      {"one million records in under five seconds", criterion_throughput},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [title, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.expect(false, fmt::format("exception: {}", e.what()));
    }
    const double took = Seconds(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%llu checks, %.2f s)\n", v.ok() ? "PASS" : "FAIL", index,
                title, static_cast<unsigned long long>(v.checks), took);
    for (const auto& f : v.failures) std::printf("  %s\n", f.c_str());
    if (!v.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
