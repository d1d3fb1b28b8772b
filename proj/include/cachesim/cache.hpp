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
#include <vector>

#include "cachesim/config.hpp"

namespace cachesim {

enum class AccessKind { Read, Write };

struct CacheStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t replacements = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t invalidations = 0;

  CacheStats& operator+=(const CacheStats& o);
  bool operator==(const CacheStats&) const = default;
};

// Rates per access; all return 0 for an idle cache.
double miss_rate(const CacheStats& s);
double repl_rate(const CacheStats& s);
double wb_rate(const CacheStats& s);
double inv_rate(const CacheStats& s);

struct SetTag {
  std::uint64_t set_index;
  std::uint64_t tag;
  bool operator==(const SetTag&) const = default;
};

/// block = addr / bsize; set = block mod nsets; tag = block / nsets.
SetTag decompose(std::uint64_t addr, const CacheSpec& spec);

struct Eviction {
  std::uint64_t tag;
  std::uint64_t block_addr;  // byte address of the evicted block
  bool was_dirty;
  bool operator==(const Eviction&) const = default;
};

struct AccessOutcome {
  bool hit = false;
  std::optional<Eviction> evicted;  // only ever set on a miss

  static AccessOutcome make_hit() { return {true, std::nullopt}; }
  bool operator==(const AccessOutcome&) const = default;
};

struct FlushResult {
  std::uint64_t writebacks_done = 0;
  std::uint64_t lines_invalidated = 0;
  /// Block addresses of the dirty lines written back, in set/way order.
  std::vector<std::uint64_t> dirty_blocks;
};

/// One write-back, write-allocate set-associative cache.
///
/// On a miss the victim is the lowest-numbered invalid way if one exists;
/// otherwise it is chosen by the replacement policy. LRU stamps are
/// refreshed on every touch, FIFO stamps only when a line is filled, and
/// RANDOM draws from a xorshift64* generator seeded at construction.
class Cache {
 public:
  Cache(CacheSpec spec, std::uint64_t seed = 1);

  AccessOutcome access(std::uint64_t addr, AccessKind kind);
  FlushResult flush();

  const CacheSpec& spec() const { return spec_; }
  const CacheStats& stats() const { return stats_; }

  bool contains(std::uint64_t addr) const;
  std::uint64_t valid_lines() const;
  /// True when every set holds pairwise-distinct valid tags and no invalid
  /// line is dirty.
  bool check_invariants() const;

 private:
  struct Line {
    std::uint64_t tag = 0;
    std::uint64_t stamp = 0;
    bool valid = false;
    bool dirty = false;
  };

  std::size_t choose_victim(std::size_t base);
  std::uint64_t next_random();

  CacheSpec spec_;
  unsigned offset_bits_;
  unsigned index_bits_;
  std::vector<Line> lines_;  // nsets * assoc, set-major
  std::uint64_t clock_ = 0;
  std::uint64_t rng_state_;
  CacheStats stats_;
};

}  // namespace cachesim
