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

#include "cachesim/hierarchy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace cachesim {

SideStats& SideStats::operator+=(const SideStats& o) {
  accesses += o.accesses;
  hits += o.hits;
  misses += o.misses;
  return *this;
}

BranchStats& BranchStats::operator+=(const BranchStats& o) {
  executed += o.executed;
  taken += o.taken;
  not_taken += o.not_taken;
  return *this;
}

double SimReport::sim_inst_rate() const {
  return static_cast<double>(sim_num_insn) /
         static_cast<double>(std::max<std::uint64_t>(sim_elapsed_time, 1));
}

const CacheStats* SimReport::find(std::string_view cache_name) const {
  for (const auto& c : caches) {
    if (c.name == cache_name) return &c.stats;
  }
  return nullptr;
}

Clock steady_clock_seconds() {
  return [] {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  };
}

int Hierarchy::add_node(const CacheSpec& spec, bool is_tlb, std::uint64_t seed) {
  for (const auto& n : nodes_) {
    if (n.cache.spec().name == spec.name)
      throw ConfigError(ConfigErrorKind::DuplicateCacheName, spec.name,
                        "two distinct caches share this name");
  }
  // Decorrelate RANDOM victims across caches that share the run seed.
  const std::uint64_t cache_seed = seed + 0x9e3779b97f4a7c15ULL * (nodes_.size() + 1);
  nodes_.push_back(Node{Cache(spec, cache_seed), -1, is_tlb, {}});
  return static_cast<int>(nodes_.size() - 1);
}

Hierarchy Hierarchy::build(const HierarchySpec& spec, std::uint64_t seed) {
  spec.validate();
  Hierarchy h;
  h.flush_on_syscall_ = spec.flush_on_syscall;

  auto configured = [](const CacheBinding& b) { return std::get_if<CacheSpec>(&b); };

  // Report order: il1, il2, dl1, dl2, itlb, dtlb.
  int il1 = -1, il2 = -1, dl1 = -1, dl2 = -1;
  if (auto* s = configured(spec.il1)) il1 = h.add_node(*s, false, seed);
  if (auto* s = configured(spec.il2)) il2 = h.add_node(*s, false, seed);
  if (auto* s = configured(spec.dl1)) dl1 = h.add_node(*s, false, seed);
  if (auto* s = configured(spec.dl2)) dl2 = h.add_node(*s, false, seed);
  if (auto* s = configured(spec.itlb)) h.itlb_ = h.add_node(*s, true, seed);
  if (auto* s = configured(spec.dtlb)) h.dtlb_ = h.add_node(*s, true, seed);

  if (dl1 >= 0) h.nodes_[dl1].next = dl2;

  if (auto* u = std::get_if<UnifiedWith>(&spec.il1)) {
    il1 = u->target == Level::Dl1 ? dl1 : dl2;
  } else if (il1 >= 0) {
    if (il2 >= 0)
      h.nodes_[il1].next = il2;
    else if (std::holds_alternative<UnifiedWith>(spec.il2))
      h.nodes_[il1].next = dl2;
  }

  h.il1_ = il1;
  h.dl1_ = dl1;
  return h;
}

const Cache* Hierarchy::find_cache(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.cache.spec().name == name) return &n.cache;
  }
  return nullptr;
}

const Routing* Hierarchy::routing(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.cache.spec().name == name) return &n.routing;
  }
  return nullptr;
}

std::string Hierarchy::next_level_of(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.cache.spec().name == name)
      return n.next >= 0 ? nodes_[n.next].cache.spec().name : std::string();
  }
  return {};
}

bool Hierarchy::check_ledger() const {
  for (const auto& n : nodes_) {
    const auto& r = n.routing;
    if (n.cache.stats().accesses != r.direct + r.from_misses + r.from_writebacks) return false;
    if (!n.cache.check_invariants()) return false;
  }
  return true;
}

void Hierarchy::switch_region(const std::string& name) {
  auto [it, inserted] = region_index_.try_emplace(name, static_cast<std::uint32_t>(regions_.size()));
  if (inserted) {
    RegionCounters rc;
    rc.name = name;
    rc.caches.resize(nodes_.size());
    regions_.push_back(std::move(rc));
  }
  current_region_ = it->second;
  region_open_ = true;
}

void Hierarchy::emit(EventKind kind, Side side, std::uint64_t bytes) {
  if (!log_events_) return;
  events_.push_back(MemEvent{kind, side, insts_, static_cast<std::uint32_t>(bytes),
                             current_region_});
}

void Hierarchy::access_level(int node, std::uint64_t addr, AccessKind kind, Side side,
                             bool first_level, std::vector<StepAccess>* log) {
  Node& n = nodes_[node];
  const AccessOutcome o = n.cache.access(addr, kind);
  if (log) log->push_back({n.cache.spec().name, o});

  CacheStats& rs = region().caches[node];
  ++rs.accesses;
  if (o.hit) {
    ++rs.hits;
  } else {
    ++rs.misses;
    if (o.evicted) {
      ++rs.replacements;
      if (o.evicted->was_dirty) ++rs.writebacks;
    }
  }

  if (first_level) {
    SideStats& global = side == Side::Instruction ? imem_ : dmem_;
    SideStats& local = side == Side::Instruction ? region().imem : region().dmem;
    ++global.accesses;
    ++local.accesses;
    if (o.hit) {
      ++global.hits;
      ++local.hits;
    } else {
      ++global.misses;
      ++local.misses;
    }
  }
  if (o.hit) return;

  const std::uint64_t bsize = n.cache.spec().bsize;
  const int next = n.next;
  if (first_level) emit(side == Side::Instruction ? EventKind::IMiss : EventKind::DMiss, side, bsize);

  // Writeback before the fill, as a write-back cache with no victim buffer
  // would issue them.
  if (o.evicted && o.evicted->was_dirty) {
    if (next >= 0) {
      ++nodes_[next].routing.from_writebacks;
      access_level(next, o.evicted->block_addr, AccessKind::Write, side, false, log);
    } else {
      emit(EventKind::Writeback, side, bsize);
    }
  }
  if (next >= 0) {
    ++nodes_[next].routing.from_misses;
    access_level(next, addr & ~(bsize - 1), AccessKind::Read, side, false, log);
  }
}

void Hierarchy::flush_all(std::vector<StepAccess>* log) {
  // Upper levels first so their dirty data lands in (and is then flushed
  // from) the level below.
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    bool is_lower = false;
    for (const auto& n : nodes_) is_lower |= n.next == i;
    if (!is_lower && !nodes_[i].is_tlb) order.push_back(i);
  }
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (std::find(order.begin(), order.end(), i) == order.end() && !nodes_[i].is_tlb)
      order.push_back(i);
  }
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].is_tlb) order.push_back(i);
  }

  for (int i : order) {
    Node& n = nodes_[i];
    FlushResult fr = n.cache.flush();
    CacheStats& rs = region().caches[i];
    rs.writebacks += fr.writebacks_done;
    rs.invalidations += fr.lines_invalidated;
    const bool data_chain = i == dl1_ || (dl1_ >= 0 && nodes_[dl1_].next == i);
    const Side side = data_chain ? Side::Data : Side::Instruction;
    for (std::uint64_t block : fr.dirty_blocks) {
      if (n.next >= 0) {
        ++nodes_[n.next].routing.from_writebacks;
        access_level(n.next, block, AccessKind::Write, side, false, log);
      } else {
        emit(EventKind::Writeback, side, n.cache.spec().bsize);
      }
    }
  }
}

namespace {
// Visits each aligned `unit`-byte chunk overlapped by [addr, addr + size).
template <typename F>
void for_each_chunk(std::uint64_t addr, std::uint64_t size, std::uint64_t unit, F&& f) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t last_byte = addr > max - (size - 1) ? max : addr + (size - 1);
  const std::uint64_t first = addr / unit;
  const std::uint64_t last = last_byte / unit;
  for (std::uint64_t c = first;; ++c) {
    f(c * unit);
    if (c == last) break;
  }
}
}  // namespace

void Hierarchy::process(const TraceRecord& rec, std::vector<StepAccess>* log) {
  if (!region_open_ && !std::holds_alternative<Region>(rec))
    switch_region(std::string(kUnmarkedRegion));

  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Inst>) {
          if (itlb_ >= 0) {
            ++nodes_[itlb_].routing.direct;
            access_level(itlb_, r.addr, AccessKind::Read, Side::Instruction, false, log);
          }
          if (il1_ >= 0) {
            ++nodes_[il1_].routing.direct;
            access_level(il1_, r.addr, AccessKind::Read, Side::Instruction, true, log);
          }
          ++insts_;
          ops_ += r.ops;
          ++region().insts;
          region().ops += r.ops;
        } else if constexpr (std::is_same_v<T, Load> || std::is_same_v<T, Store>) {
          const AccessKind kind = std::is_same_v<T, Store> ? AccessKind::Write : AccessKind::Read;
          ++refs_;
          ++region().refs;
          if (dtlb_ >= 0) {
            for_each_chunk(r.addr, r.size, nodes_[dtlb_].cache.spec().bsize, [&](std::uint64_t a) {
              ++nodes_[dtlb_].routing.direct;
              access_level(dtlb_, a, AccessKind::Read, Side::Data, false, log);
            });
          }
          if (dl1_ >= 0) {
            for_each_chunk(r.addr, r.size, nodes_[dl1_].cache.spec().bsize, [&](std::uint64_t a) {
              ++nodes_[dl1_].routing.direct;
              access_level(dl1_, a, kind, Side::Data, true, log);
            });
          }
        } else if constexpr (std::is_same_v<T, Branch>) {
          BranchStats& b = region().branches;
          ++branches_.executed;
          ++b.executed;
          if (r.taken) {
            ++branches_.taken;
            ++b.taken;
            emit(EventKind::TakenBranch, Side::Instruction, 0);
          } else {
            ++branches_.not_taken;
            ++b.not_taken;
          }
        } else if constexpr (std::is_same_v<T, Syscall>) {
          ++syscalls_;
          ++region().syscalls;
          if (flush_on_syscall_) flush_all(log);
        } else {
          switch_region(r.name);
        }
      },
      rec);
}

std::vector<StepAccess> Hierarchy::step(const TraceRecord& r) {
  std::vector<StepAccess> log;
  process(r, &log);
  return log;
}

SimReport Hierarchy::report() const {
  SimReport rep;
  rep.sim_num_insn = insts_;
  rep.sim_num_refs = refs_;
  rep.executed_operations = ops_;
  rep.syscalls = syscalls_;
  rep.branches = branches_;
  rep.imem = imem_;
  rep.dmem = dmem_;
  for (const auto& n : nodes_)
    rep.caches.push_back(NamedStats{n.cache.spec().name, n.is_tlb, n.cache.stats()});
  rep.regions = regions_;
  return rep;
}

namespace {
std::uint64_t elapsed_seconds(double start, double end) {
  const double secs = std::floor(end - start);
  return secs < 1.0 ? 1 : static_cast<std::uint64_t>(secs);
}
}  // namespace

SimReport Hierarchy::run(const std::vector<TraceRecord>& trace, const Clock& clock) {
  const Clock& c = clock ? clock : steady_clock_seconds();
  const double start = c();
  for (const auto& r : trace) process(r, nullptr);
  SimReport rep = report();
  rep.sim_elapsed_time = elapsed_seconds(start, c());
  return rep;
}

SimReport Hierarchy::run(TraceReader& reader, const Clock& clock) {
  const Clock& c = clock ? clock : steady_clock_seconds();
  const double start = c();
  while (auto r = reader.next()) process(*r, nullptr);
  SimReport rep = report();
  rep.sim_elapsed_time = elapsed_seconds(start, c());
  return rep;
}

}  // namespace cachesim
