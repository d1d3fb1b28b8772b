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

// One-pass design-space sweeps.
//
// For a fixed (nsets, bsize) the per-set LRU stack distance of every
// reference determines the LRU miss count of every associativity at once:
// a reference hits in an A-way set iff its distance is at most A. Offline
// optimal (Belady) replacement is provided alongside as a lower bound.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cachesim/trace.hpp"

namespace cachesim {

/// Which trace records feed a sweep.
enum class RefStream { Data, Instruction, Unified };

std::string_view to_string(RefStream s);

/// Block numbers (addr / bsize) touched by the selected records, in order.
/// Loads and stores spanning several blocks contribute one entry per block.
std::vector<std::uint64_t> block_references(std::span<const TraceRecord> trace,
                                            std::uint64_t bsize,
                                            RefStream stream = RefStream::Data);

struct Geometry {
  std::uint64_t nsets;
  std::uint64_t bsize;
  bool operator==(const Geometry&) const = default;
};

struct DistanceHistogram {
  std::uint64_t nsets = 1;
  std::uint64_t bsize = 1;
  std::uint64_t cold = 0;
  /// counts[d - 1] is the number of references at stack distance d.
  std::vector<std::uint64_t> counts;

  std::uint64_t count_at(std::uint64_t distance) const;
  std::uint64_t max_distance() const { return counts.size(); }
  std::uint64_t total() const;
  bool operator==(const DistanceHistogram&) const = default;
};

DistanceHistogram stack_distances_blocks(std::span<const std::uint64_t> blocks,
                                         std::uint64_t nsets, std::uint64_t bsize);
DistanceHistogram stack_distances(std::span<const TraceRecord> trace, std::uint64_t nsets,
                                  std::uint64_t bsize, RefStream stream = RefStream::Data);

/// cold + references at distance > assoc.
std::uint64_t misses_for_assoc(const DistanceHistogram& h, std::uint64_t assoc);

std::uint64_t belady_misses_blocks(std::span<const std::uint64_t> blocks, std::uint64_t nsets,
                                   std::uint64_t assoc);
std::uint64_t belady_misses(std::span<const TraceRecord> trace, std::uint64_t nsets,
                            std::uint64_t bsize, std::uint64_t assoc,
                            RefStream stream = RefStream::Data);

enum class SweepPolicy { Lru, Opt };

struct SweepRow {
  std::uint64_t nsets = 0;
  std::uint64_t bsize = 0;
  std::uint64_t assoc = 0;
  SweepPolicy policy = SweepPolicy::Lru;
  std::uint64_t references = 0;
  std::uint64_t misses = 0;

  double miss_rate() const;
  bool operator==(const SweepRow&) const = default;
};

using SweepTable = std::vector<SweepRow>;

struct SweepOptions {
  RefStream stream = RefStream::Data;
  bool include_opt = false;
  /// Worker threads for independent geometries; 0 picks the hardware count.
  unsigned workers = 0;
};

/// LRU rows for every (geometry, assoc), geometry-major, followed by OPT
/// rows in the same order when requested. Each geometry costs one pass.
SweepTable sweep(std::span<const TraceRecord> trace, std::span<const Geometry> geometries,
                 std::span<const std::uint64_t> assocs, const SweepOptions& options = {});

}  // namespace cachesim
