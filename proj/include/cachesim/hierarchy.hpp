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
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cachesim/cache.hpp"
#include "cachesim/config.hpp"
#include "cachesim/trace.hpp"

namespace cachesim {

enum class Side { Instruction, Data };

/// First-level traffic seen from one reference stream, independent of
/// whether the L1 is split or unified.
struct SideStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  SideStats& operator+=(const SideStats& o);
  bool operator==(const SideStats&) const = default;
};

struct BranchStats {
  std::uint64_t executed = 0;
  std::uint64_t taken = 0;
  std::uint64_t not_taken = 0;
  BranchStats& operator+=(const BranchStats& o);
  bool operator==(const BranchStats&) const = default;
};

struct NamedStats {
  std::string name;
  bool is_tlb = false;
  CacheStats stats;
  bool operator==(const NamedStats&) const = default;
};

/// Counters attributed to one region. `caches` is indexed like
/// SimReport::caches.
struct RegionCounters {
  std::string name;
  std::uint64_t insts = 0;
  std::uint64_t ops = 0;
  std::uint64_t refs = 0;
  std::uint64_t syscalls = 0;
  BranchStats branches;
  SideStats imem;
  SideStats dmem;
  std::vector<CacheStats> caches;
  bool operator==(const RegionCounters&) const = default;
};

/// Name of the region that collects records seen before the first marker.
inline constexpr std::string_view kUnmarkedRegion = "(unmarked)";

struct SimReport {
  std::uint64_t sim_num_insn = 0;
  std::uint64_t sim_num_refs = 0;
  std::uint64_t executed_operations = 0;
  std::uint64_t syscalls = 0;
  std::uint64_t sim_elapsed_time = 1;  // whole seconds, at least 1
  std::vector<NamedStats> caches;
  BranchStats branches;
  SideStats imem;
  SideStats dmem;
  std::vector<RegionCounters> regions;  // in order of first appearance

  /// sim_num_insn / sim_elapsed_time.
  double sim_inst_rate() const;
  const CacheStats* find(std::string_view cache_name) const;
  bool operator==(const SimReport&) const = default;
};

enum class EventKind { IMiss, DMiss, Writeback, TakenBranch };

/// One timing-relevant occurrence, in trace order. `insn_index` counts the
/// Inst records executed before the event's own instruction.
struct MemEvent {
  EventKind kind;
  Side side;
  std::uint64_t insn_index;
  std::uint32_t bytes;   // transfer size for misses and writebacks
  std::uint32_t region;  // index into SimReport::regions
  bool operator==(const MemEvent&) const = default;
};

struct StepAccess {
  std::string cache_name;
  AccessOutcome outcome;
  bool operator==(const StepAccess&) const = default;
};

/// Per-cache traffic ledger: where each access came from.
struct Routing {
  std::uint64_t direct = 0;           // from the reference streams
  std::uint64_t from_misses = 0;      // fills requested by an upper level
  std::uint64_t from_writebacks = 0;  // dirty evictions from an upper level
};

/// Returns wall-clock seconds; injected so reports can be made deterministic.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

/// The sim-cache run loop: TLBs plus a two-level split or unified cache
/// hierarchy with per-region attribution.
class Hierarchy {
 public:
  static Hierarchy build(const HierarchySpec& spec, std::uint64_t seed = 1);

  /// Processes one record and returns every cache access it caused, in
  /// the order they happened.
  std::vector<StepAccess> step(const TraceRecord& r);

  SimReport run(const std::vector<TraceRecord>& trace, const Clock& clock = {});
  SimReport run(TraceReader& reader, const Clock& clock = {});

  /// Snapshot of the counters so far; sim_elapsed_time is left at 1.
  SimReport report() const;

  void set_event_log(bool enabled) { log_events_ = enabled; }
  const std::vector<MemEvent>& events() const { return events_; }

  std::size_t cache_count() const { return nodes_.size(); }
  const Cache* find_cache(std::string_view name) const;
  const Routing* routing(std::string_view name) const;
  /// Name of the level that services `name`'s misses, or "" for memory.
  std::string next_level_of(std::string_view name) const;

  /// Every cache's accesses equal the sum of its routing ledger.
  bool check_ledger() const;

 private:
  struct Node {
    Cache cache;
    int next = -1;
    bool is_tlb = false;
    Routing routing;
  };

  Hierarchy() = default;
  int add_node(const CacheSpec& spec, bool is_tlb, std::uint64_t seed);
  void process(const TraceRecord& r, std::vector<StepAccess>* log);
  void access_level(int node, std::uint64_t addr, AccessKind kind, Side side, bool first_level,
                    std::vector<StepAccess>* log);
  void flush_all(std::vector<StepAccess>* log);
  void emit(EventKind kind, Side side, std::uint64_t bytes);
  RegionCounters& region() { return regions_[current_region_]; }
  void switch_region(const std::string& name);

  std::vector<Node> nodes_;
  int il1_ = -1;
  int dl1_ = -1;
  int itlb_ = -1;
  int dtlb_ = -1;
  bool flush_on_syscall_ = false;

  std::uint64_t insts_ = 0;
  std::uint64_t ops_ = 0;
  std::uint64_t refs_ = 0;
  std::uint64_t syscalls_ = 0;
  BranchStats branches_;
  SideStats imem_;
  SideStats dmem_;

  std::vector<RegionCounters> regions_;
  std::unordered_map<std::string, std::uint32_t> region_index_;
  std::uint32_t current_region_ = 0;
  bool region_open_ = false;

  bool log_events_ = false;
  std::vector<MemEvent> events_;
};

}  // namespace cachesim
