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

#include "cachesim/timing.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "cachesim/numfmt.hpp"

namespace cachesim {

namespace {
std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }
}  // namespace

double CycleReport::bandwidth_pct() const {
  return total_cycles == 0
             ? 0.0
             : 100.0 * static_cast<double>(bus_busy_cycles) / static_cast<double>(total_cycles);
}

bool CycleReport::check_identities() const {
  return total_cycles == execution_cycles + stall_cycles &&
         stall_cycles == imem.stall_total + dmem.stall_total + branch.branch_stall_cycles &&
         imem.stall_total == imem.stall_miss + imem.stall_bus_conflict &&
         dmem.stall_total == dmem.stall_miss + dmem.stall_bus_conflict &&
         bus_busy_cycles <= total_cycles;
}

AccountSummary summarize(const SimReport& report) {
  AccountSummary s;
  s.insn_count = report.sim_num_insn;
  s.op_count = report.executed_operations;
  s.imem = report.imem;
  s.dmem = report.dmem;
  s.branches = report.branches;
  for (const auto& r : report.regions) {
    s.region_names.push_back(r.name);
    s.region_insts.push_back(r.insts);
    s.region_imem.push_back(r.imem);
    s.region_dmem.push_back(r.dmem);
  }
  return s;
}

std::uint64_t bus_transfer_cycles(const TimingSpec& t, std::uint64_t bytes) {
  const std::uint64_t beats = ceil_div(std::max<std::uint64_t>(bytes, 1), t.mem_width);
  return ceil_div(beats * t.core_clk_mhz, t.bus_clk_mhz);
}

std::uint64_t main_memory_latency(const TimingSpec& t, std::uint64_t bytes) {
  const std::uint64_t beats = ceil_div(std::max<std::uint64_t>(bytes, 1), t.mem_width);
  return t.mem_lat_first + (beats - 1) * t.mem_lat_next;
}

namespace {

void check_summary(std::span<const MemEvent> events, const AccountSummary& s) {
  std::uint64_t imiss = 0, dmiss = 0, taken = 0;
  std::uint64_t last_index = 0;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::IMiss: ++imiss; break;
      case EventKind::DMiss: ++dmiss; break;
      case EventKind::TakenBranch: ++taken; break;
      case EventKind::Writeback: break;
    }
    if (e.insn_index < last_index)
      throw TimingError("events are not in execution order");
    if (e.insn_index > s.insn_count)
      throw TimingError(fmt::format("event at instruction {} past the end ({} instructions)",
                                    e.insn_index, s.insn_count));
    if (!s.region_names.empty() && e.region >= s.region_names.size())
      throw TimingError(fmt::format("event refers to unknown region {}", e.region));
    last_index = e.insn_index;
  }
  auto mismatch = [](std::string_view what, std::uint64_t events, std::uint64_t summary) {
    throw TimingError(fmt::format("InconsistentCounts: {} events {} != summary {}", what,
                                  events, summary));
  };
  if (imiss != s.imem.misses) mismatch("I-miss", imiss, s.imem.misses);
  if (dmiss != s.dmem.misses) mismatch("D-miss", dmiss, s.dmem.misses);
  if (taken != s.branches.taken) mismatch("taken-branch", taken, s.branches.taken);
  if (s.imem.hits + s.imem.misses != s.imem.accesses)
    throw TimingError("InconsistentCounts: imem hits + misses != accesses");
  if (s.dmem.hits + s.dmem.misses != s.dmem.accesses)
    throw TimingError("InconsistentCounts: dmem hits + misses != accesses");
  if (s.branches.taken + s.branches.not_taken != s.branches.executed)
    throw TimingError("InconsistentCounts: taken + not taken != executed branches");
  const auto n = s.region_names.size();
  if (s.region_insts.size() != n || s.region_imem.size() != n || s.region_dmem.size() != n)
    throw TimingError("InconsistentCounts: region tables differ in length");
  if (n > 0) {
    std::uint64_t insts = 0;
    for (auto v : s.region_insts) insts += v;
    if (insts != s.insn_count)
      throw TimingError("InconsistentCounts: region instructions do not sum to the total");
  }
}

struct Interval {
  std::uint64_t start;
  std::uint64_t end;
};

}  // namespace

CycleReport account(std::span<const MemEvent> events, const TimingSpec& t,
                    const AccountSummary& summary) {
  t.validate();
  check_summary(events, summary);

  CycleReport c;
  c.execution_cycles = summary.insn_count;
  c.executed_operations = summary.op_count;
  c.core_clk_mhz = t.core_clk_mhz;
  c.imem.accesses = summary.imem.accesses;
  c.imem.hits = summary.imem.hits;
  c.imem.misses = summary.imem.misses;
  c.dmem.accesses = summary.dmem.accesses;
  c.dmem.hits = summary.dmem.hits;
  c.dmem.misses = summary.dmem.misses;
  c.branch.executed = summary.branches.executed;
  c.branch.taken = summary.branches.taken;
  c.branch.not_taken = summary.branches.not_taken;

  std::vector<std::uint64_t> region_extra(summary.region_names.size(), 0);
  std::vector<Interval> bus;
  std::uint64_t stall = 0;
  std::uint64_t bus_free = 0;

  // Claims the bus for `occupancy` cycles; returns the wait.
  auto claim = [&](std::uint64_t now, std::uint64_t occupancy) {
    const std::uint64_t start = std::max(now, bus_free);
    bus_free = start + occupancy;
    if (occupancy > 0) bus.push_back({start, bus_free});
    return start - now;
  };

  for (const auto& e : events) {
    const std::uint64_t now = e.insn_index + stall;
    std::uint64_t delay = 0;
    switch (e.kind) {
      case EventKind::IMiss:
      case EventKind::DMiss: {
        MemSideCycles& side = e.kind == EventKind::IMiss ? c.imem : c.dmem;
        const std::uint64_t penalty =
            e.kind == EventKind::IMiss ? t.icache_penalty : t.miss_penalty;
        const std::uint64_t wait = claim(now, bus_transfer_cycles(t, e.bytes));
        side.stall_bus_conflict += wait;
        side.stall_miss += penalty;
        delay = wait + penalty;
        if (!region_extra.empty()) region_extra[e.region] += wait;
        break;
      }
      case EventKind::Writeback:
        // Posted: the transfer holds the bus but the core does not wait for it.
        claim(now, bus_transfer_cycles(t, e.bytes) + t.wb_penalty);
        break;
      case EventKind::TakenBranch:
        c.branch.branch_stall_cycles += t.branch_stall;
        delay = t.branch_stall;
        if (!region_extra.empty()) region_extra[e.region] += t.branch_stall;
        break;
    }
    stall += delay;
  }

  c.imem.stall_total = c.imem.stall_miss + c.imem.stall_bus_conflict;
  c.dmem.stall_total = c.dmem.stall_miss + c.dmem.stall_bus_conflict;
  c.stall_cycles = c.imem.stall_total + c.dmem.stall_total + c.branch.branch_stall_cycles;
  c.total_cycles = c.execution_cycles + c.stall_cycles;

  for (const auto& iv : bus) {
    if (iv.start >= c.total_cycles) break;
    c.bus_busy_cycles += std::min(iv.end, c.total_cycles) - iv.start;
  }

  for (std::size_t i = 0; i < summary.region_names.size(); ++i) {
    RegionCycles r;
    r.name = summary.region_names[i];
    r.insts = summary.region_insts[i];
    r.dcache_cycles = summary.region_dmem[i].misses * t.miss_penalty;
    r.icache_cycles = summary.region_imem[i].misses * t.icache_penalty;
    r.total_cycles = r.insts + r.dcache_cycles + r.icache_cycles + region_extra[i];
    c.regions.push_back(std::move(r));
  }
  return c;
}

ReportRates rates(const CycleReport& report) {
  auto side = [](const MemSideCycles& s) {
    SideRates r;
    if (s.accesses > 0) {
      r.hit_rate = format_percent(s.hits, s.accesses) + "%";
      r.miss_rate = format_percent(s.misses, s.accesses) + "%";
    }
    return r;
  };
  return {side(report.imem), side(report.dmem)};
}

std::vector<MemoryTimingRow> memory_timing(const SimReport& report, const Hierarchy& h,
                                           const TimingSpec& t) {
  t.validate();
  std::vector<MemoryTimingRow> rows;
  for (const auto& c : report.caches) {
    const Cache* cache = h.find_cache(c.name);
    if (!cache) continue;
    MemoryTimingRow row;
    row.name = c.name;
    row.misses = c.stats.misses;
    if (c.is_tlb) {
      row.latency = t.tlb_lat;
    } else if (h.next_level_of(c.name).empty()) {
      row.latency = main_memory_latency(t, cache->spec().bsize);
    } else {
      continue;
    }
    row.cycles = row.misses * row.latency;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cachesim
