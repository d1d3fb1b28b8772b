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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachesim/config.hpp"
#include "cachesim/hierarchy.hpp"

namespace cachesim {

struct MemSideCycles {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t stall_total = 0;
  std::uint64_t stall_miss = 0;
  std::uint64_t stall_bus_conflict = 0;
  bool operator==(const MemSideCycles&) const = default;
};

struct BranchCycles {
  std::uint64_t executed = 0;
  std::uint64_t taken = 0;
  std::uint64_t not_taken = 0;
  std::uint64_t branch_stall_cycles = 0;
  bool operator==(const BranchCycles&) const = default;
};

/// Cycle attribution for one region. `total_cycles` also carries the
/// region's branch and bus-conflict stalls, so totals over regions add up
/// to CycleReport::total_cycles.
struct RegionCycles {
  std::string name;
  std::uint64_t total_cycles = 0;
  std::uint64_t insts = 0;
  std::uint64_t dcache_cycles = 0;  // region D-misses x MissPenalty
  std::uint64_t icache_cycles = 0;  // region I-misses x ICachePenalty
  bool operator==(const RegionCycles&) const = default;
};

struct CycleReport {
  std::uint64_t total_cycles = 0;
  std::uint64_t execution_cycles = 0;
  std::uint64_t stall_cycles = 0;
  MemSideCycles imem;
  MemSideCycles dmem;
  BranchCycles branch;
  /// Bus occupancy inside [0, total_cycles).
  std::uint64_t bus_busy_cycles = 0;
  std::uint64_t executed_operations = 0;
  std::uint64_t core_clk_mhz = 0;
  std::vector<RegionCycles> regions;

  /// 100 * bus_busy_cycles / total_cycles.
  double bandwidth_pct() const;
  /// The four bookkeeping identities between the fields above.
  bool check_identities() const;
  bool operator==(const CycleReport&) const = default;
};

class TimingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Event-independent counts that account() cross-checks the event stream
/// against.
struct AccountSummary {
  std::uint64_t insn_count = 0;
  std::uint64_t op_count = 0;
  SideStats imem;
  SideStats dmem;
  BranchStats branches;
  std::vector<std::string> region_names;
  std::vector<std::uint64_t> region_insts;
  std::vector<SideStats> region_imem;
  std::vector<SideStats> region_dmem;
};

AccountSummary summarize(const SimReport& report);

/// Folds the event stream into a cycle report.
///
/// Every instruction costs one execution cycle. Misses stall for their
/// side's penalty and taken branches for BranchStall. A single bus serves
/// refills and writebacks in event order: each transfer occupies
/// ceil(bytes / mem_width) beats of core_clk / bus_clk core cycles (a
/// writeback additionally holds the bus for WBPenalty). A refill that finds
/// the bus busy waits, and the wait is charged to its side as a bus-conflict
/// stall. Writebacks are posted: they delay later transfers but never the
/// core. An event's timestamp is its instruction index plus all stall
/// cycles accumulated before it.
///
/// Throws TimingError when the events disagree with `summary`.
CycleReport account(std::span<const MemEvent> events, const TimingSpec& t,
                    const AccountSummary& summary);

/// Core cycles for one bus transfer of `bytes`.
std::uint64_t bus_transfer_cycles(const TimingSpec& t, std::uint64_t bytes);

/// mem_lat_first + (ceil(bytes / mem_width) - 1) * mem_lat_next.
std::uint64_t main_memory_latency(const TimingSpec& t, std::uint64_t bytes);

struct SideRates {
  std::optional<std::string> hit_rate;   // e.g. "90.40%"
  std::optional<std::string> miss_rate;
};

struct ReportRates {
  SideRates imem;
  SideRates dmem;
};

/// Hit and miss rates at two decimals; absent for a side with no accesses.
ReportRates rates(const CycleReport& report);

/// Memory-side cycle estimate for the multi-level (sim-cache) dialect:
/// misses in each cache backed directly by memory cost
/// main_memory_latency(bsize), TLB misses cost tlb_lat.
struct MemoryTimingRow {
  std::string name;
  std::uint64_t misses = 0;
  std::uint64_t latency = 0;
  std::uint64_t cycles = 0;
};

std::vector<MemoryTimingRow> memory_timing(const SimReport& report, const Hierarchy& h,
                                           const TimingSpec& t);

}  // namespace cachesim
