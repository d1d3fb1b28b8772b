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

#include "cachesim/cache.hpp"

#include <bit>
#include <stdexcept>
#include <unordered_set>

namespace cachesim {

CacheStats& CacheStats::operator+=(const CacheStats& o) {
  accesses += o.accesses;
  hits += o.hits;
  misses += o.misses;
  replacements += o.replacements;
  writebacks += o.writebacks;
  invalidations += o.invalidations;
  return *this;
}

namespace {
double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// splitmix64 finaliser; turns any seed (including 0) into a usable
// non-zero xorshift state.
std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x == 0 ? 0x2545f4914f6cdd1dULL : x;
}
}  // namespace

double miss_rate(const CacheStats& s) { return ratio(s.misses, s.accesses); }
double repl_rate(const CacheStats& s) { return ratio(s.replacements, s.accesses); }
double wb_rate(const CacheStats& s) { return ratio(s.writebacks, s.accesses); }
double inv_rate(const CacheStats& s) { return ratio(s.invalidations, s.accesses); }

SetTag decompose(std::uint64_t addr, const CacheSpec& spec) {
  const std::uint64_t block = addr >> std::countr_zero(spec.bsize);
  return {block & (spec.nsets - 1), block >> std::countr_zero(spec.nsets)};
}

Cache::Cache(CacheSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_state_(mix_seed(seed)) {
  if (!is_power_of_two(spec_.nsets) || !is_power_of_two(spec_.bsize) ||
      !is_power_of_two(spec_.assoc))
    throw std::invalid_argument("cache geometry must be powers of two: " + spec_.to_string());
  offset_bits_ = static_cast<unsigned>(std::countr_zero(spec_.bsize));
  index_bits_ = static_cast<unsigned>(std::countr_zero(spec_.nsets));
  lines_.resize(spec_.nsets * spec_.assoc);
}

std::uint64_t Cache::next_random() {
  // xorshift64*
  rng_state_ ^= rng_state_ >> 12;
  rng_state_ ^= rng_state_ << 25;
  rng_state_ ^= rng_state_ >> 27;
  return rng_state_ * 0x2545f4914f6cdd1dULL;
}

std::size_t Cache::choose_victim(std::size_t base) {
  const std::size_t ways = spec_.assoc;
  for (std::size_t w = 0; w < ways; ++w) {
    if (!lines_[base + w].valid) return base + w;
  }
  if (spec_.repl == ReplacementPolicy::Random) return base + next_random() % ways;

  // LRU and FIFO both evict the smallest stamp; they differ only in when
  // stamps are refreshed.
  std::size_t victim = base;
  for (std::size_t w = 1; w < ways; ++w) {
    if (lines_[base + w].stamp < lines_[victim].stamp) victim = base + w;
  }
  return victim;
}

AccessOutcome Cache::access(std::uint64_t addr, AccessKind kind) {
  const std::uint64_t block = addr >> offset_bits_;
  const std::uint64_t set = block & (spec_.nsets - 1);
  const std::uint64_t tag = block >> index_bits_;
  const std::size_t base = set * spec_.assoc;

  ++clock_;
  ++stats_.accesses;

  for (std::size_t w = 0; w < spec_.assoc; ++w) {
    Line& line = lines_[base + w];
    if (line.valid && line.tag == tag) {
      ++stats_.hits;
      if (spec_.repl == ReplacementPolicy::Lru) line.stamp = clock_;
      if (kind == AccessKind::Write) line.dirty = true;
      return AccessOutcome::make_hit();
    }
  }

  ++stats_.misses;
  AccessOutcome outcome;
  Line& victim = lines_[choose_victim(base)];
  if (victim.valid) {
    ++stats_.replacements;
    if (victim.dirty) ++stats_.writebacks;
    const std::uint64_t victim_block = (victim.tag << index_bits_) | set;
    outcome.evicted = Eviction{victim.tag, victim_block << offset_bits_, victim.dirty};
  }
  victim.tag = tag;
  victim.valid = true;
  victim.dirty = kind == AccessKind::Write;
  victim.stamp = clock_;
  return outcome;
}

FlushResult Cache::flush() {
  FlushResult result;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    Line& line = lines_[i];
    if (!line.valid) continue;
    ++result.lines_invalidated;
    if (line.dirty) {
      ++result.writebacks_done;
      const std::uint64_t set = i / spec_.assoc;
      result.dirty_blocks.push_back(((line.tag << index_bits_) | set) << offset_bits_);
    }
    line = Line{};
  }
  stats_.writebacks += result.writebacks_done;
  stats_.invalidations += result.lines_invalidated;
  return result;
}

bool Cache::contains(std::uint64_t addr) const {
  const SetTag st = decompose(addr, spec_);
  const std::size_t base = st.set_index * spec_.assoc;
  for (std::size_t w = 0; w < spec_.assoc; ++w) {
    if (lines_[base + w].valid && lines_[base + w].tag == st.tag) return true;
  }
  return false;
}

std::uint64_t Cache::valid_lines() const {
  std::uint64_t n = 0;
  for (const auto& line : lines_) n += line.valid ? 1 : 0;
  return n;
}

bool Cache::check_invariants() const {
  for (std::size_t set = 0; set < spec_.nsets; ++set) {
    std::unordered_set<std::uint64_t> tags;
    for (std::size_t w = 0; w < spec_.assoc; ++w) {
      const Line& line = lines_[set * spec_.assoc + w];
      if (line.dirty && !line.valid) return false;
      if (line.valid && !tags.insert(line.tag).second) return false;
    }
  }
  return stats_.accesses == stats_.hits + stats_.misses;
}

}  // namespace cachesim
