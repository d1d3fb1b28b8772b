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

#include "cachesim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "cachesim/config.hpp"

namespace cachesim {

std::string_view to_string(RefStream s) {
  switch (s) {
    case RefStream::Data: return "data";
    case RefStream::Instruction: return "inst";
    case RefStream::Unified: return "unified";
  }
  return "?";
}

std::vector<std::uint64_t> block_references(std::span<const TraceRecord> trace,
                                            std::uint64_t bsize, RefStream stream) {
  if (!is_power_of_two(bsize)) throw std::invalid_argument("bsize must be a power of two");
  const bool want_data = stream != RefStream::Instruction;
  const bool want_inst = stream != RefStream::Data;
  const auto shift = std::countr_zero(bsize);
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

  std::vector<std::uint64_t> out;
  out.reserve(trace.size());
  for (const auto& rec : trace) {
    if (const auto* i = std::get_if<Inst>(&rec)) {
      if (want_inst) out.push_back(i->addr >> shift);
      continue;
    }
    std::uint64_t addr = 0, size = 0;
    if (const auto* l = std::get_if<Load>(&rec)) {
      addr = l->addr;
      size = l->size;
    } else if (const auto* s = std::get_if<Store>(&rec)) {
      addr = s->addr;
      size = s->size;
    } else {
      continue;
    }
    if (!want_data) continue;
    const std::uint64_t last = addr > kMax - (size - 1) ? kMax : addr + size - 1;
    for (std::uint64_t b = addr >> shift;; ++b) {
      out.push_back(b);
      if (b == last >> shift) break;
    }
  }
  return out;
}

std::uint64_t DistanceHistogram::count_at(std::uint64_t distance) const {
  return distance == 0 || distance > counts.size() ? 0 : counts[distance - 1];
}

std::uint64_t DistanceHistogram::total() const {
  std::uint64_t n = cold;
  for (auto c : counts) n += c;
  return n;
}

DistanceHistogram stack_distances_blocks(std::span<const std::uint64_t> blocks,
                                         std::uint64_t nsets, std::uint64_t bsize) {
  if (!is_power_of_two(nsets)) throw std::invalid_argument("nsets must be a power of two");
  DistanceHistogram h;
  h.nsets = nsets;
  h.bsize = bsize;

  // Per-set LRU stacks, most recent at the back so short reuse distances
  // are found after a short scan.
  std::vector<std::vector<std::uint64_t>> stacks(nsets);
  const std::uint64_t mask = nsets - 1;
  for (std::uint64_t block : blocks) {
    auto& stack = stacks[block & mask];
    auto it = std::find(stack.rbegin(), stack.rend(), block);
    if (it == stack.rend()) {
      ++h.cold;
      stack.push_back(block);
      continue;
    }
    const auto depth = static_cast<std::uint64_t>(it - stack.rbegin()) + 1;
    if (h.counts.size() < depth) h.counts.resize(depth, 0);
    ++h.counts[depth - 1];
    // Rotate the hit block to the top, shifting the more recent ones down.
    auto pos = std::prev(it.base());
    std::rotate(pos, pos + 1, stack.end());
  }
  return h;
}

DistanceHistogram stack_distances(std::span<const TraceRecord> trace, std::uint64_t nsets,
                                  std::uint64_t bsize, RefStream stream) {
  const auto blocks = block_references(trace, bsize, stream);
  return stack_distances_blocks(blocks, nsets, bsize);
}

std::uint64_t misses_for_assoc(const DistanceHistogram& h, std::uint64_t assoc) {
  if (assoc == 0) throw std::invalid_argument("assoc must be at least 1");
  std::uint64_t misses = h.cold;
  for (std::uint64_t d = assoc + 1; d <= h.counts.size(); ++d) misses += h.counts[d - 1];
  return misses;
}

std::uint64_t belady_misses_blocks(std::span<const std::uint64_t> blocks, std::uint64_t nsets,
                                   std::uint64_t assoc) {
  if (!is_power_of_two(nsets)) throw std::invalid_argument("nsets must be a power of two");
  if (assoc == 0) throw std::invalid_argument("assoc must be at least 1");
  constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  // Backward pass: position of each reference's next use.
  std::vector<std::uint64_t> next_use(blocks.size(), kNever);
  {
    std::unordered_map<std::uint64_t, std::uint64_t> seen;
    seen.reserve(blocks.size());
    for (std::size_t i = blocks.size(); i-- > 0;) {
      auto [it, inserted] = seen.try_emplace(blocks[i], i);
      if (!inserted) {
        next_use[i] = it->second;
        it->second = i;
      }
    }
  }

  struct Way {
    std::uint64_t block;
    std::uint64_t next;
  };
  std::vector<std::vector<Way>> sets(nsets);
  const std::uint64_t mask = nsets - 1;
  std::uint64_t misses = 0;

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto& ways = sets[blocks[i] & mask];
    auto hit = std::find_if(ways.begin(), ways.end(),
                            [&](const Way& w) { return w.block == blocks[i]; });
    if (hit != ways.end()) {
      hit->next = next_use[i];
      continue;
    }
    ++misses;
    if (ways.size() < assoc) {
      ways.push_back({blocks[i], next_use[i]});
      continue;
    }
    // Farthest next use; strict comparison keeps the lowest way on ties.
    std::size_t victim = 0;
    for (std::size_t w = 1; w < ways.size(); ++w) {
      if (ways[w].next > ways[victim].next) victim = w;
    }
    ways[victim] = {blocks[i], next_use[i]};
  }
  return misses;
}

std::uint64_t belady_misses(std::span<const TraceRecord> trace, std::uint64_t nsets,
                            std::uint64_t bsize, std::uint64_t assoc, RefStream stream) {
  const auto blocks = block_references(trace, bsize, stream);
  return belady_misses_blocks(blocks, nsets, assoc);
}

double SweepRow::miss_rate() const {
  return references == 0 ? 0.0 : static_cast<double>(misses) / static_cast<double>(references);
}

SweepTable sweep(std::span<const TraceRecord> trace, std::span<const Geometry> geometries,
                 std::span<const std::uint64_t> assocs, const SweepOptions& options) {
  if (geometries.empty() || assocs.empty())
    throw std::invalid_argument("sweep needs at least one geometry and one associativity");
  for (const auto& g : geometries) {
    if (!is_power_of_two(g.nsets) || !is_power_of_two(g.bsize))
      throw std::invalid_argument("sweep geometry must be powers of two");
  }
  for (auto a : assocs) {
    if (a == 0) throw std::invalid_argument("associativity must be at least 1");
  }

  const std::size_t per_geometry = assocs.size();
  SweepTable lru(geometries.size() * per_geometry);
  SweepTable opt(options.include_opt ? lru.size() : 0);

  auto run_geometry = [&](std::size_t gi) {
    const Geometry& g = geometries[gi];
    const auto blocks = block_references(trace, g.bsize, options.stream);
    const auto hist = stack_distances_blocks(blocks, g.nsets, g.bsize);
    for (std::size_t ai = 0; ai < per_geometry; ++ai) {
      const std::size_t slot = gi * per_geometry + ai;
      lru[slot] = SweepRow{g.nsets, g.bsize, assocs[ai], SweepPolicy::Lru, blocks.size(),
                           misses_for_assoc(hist, assocs[ai])};
      if (options.include_opt)
        opt[slot] = SweepRow{g.nsets, g.bsize, assocs[ai], SweepPolicy::Opt, blocks.size(),
                             belady_misses_blocks(blocks, g.nsets, assocs[ai])};
    }
  };

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(geometries.size()));
  if (workers == 1) {
    for (std::size_t gi = 0; gi < geometries.size(); ++gi) run_geometry(gi);
  } else {
    // Each worker writes only its own geometry's slots, so output order is
    // fixed regardless of scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t gi; (gi = next.fetch_add(1)) < geometries.size();) run_geometry(gi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  lru.insert(lru.end(), opt.begin(), opt.end());
  return lru;
}

}  // namespace cachesim
