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
#include <string_view>
#include <variant>
#include <vector>

namespace cachesim {

enum class ReplacementPolicy { Lru, Fifo, Random };

/// Single-character code used in config strings ('l', 'f', 'r').
char policy_char(ReplacementPolicy p);
std::optional<ReplacementPolicy> policy_from_char(char c);
std::string_view policy_name(ReplacementPolicy p);

enum class ConfigErrorKind {
  WrongFieldCount,
  NonPowerOfTwo,
  UnknownPolicy,
  NonNumeric,
  InvalidName,
  InvalidUnification,
  UnknownFlag,
  MissingValue,
  InvalidValue,
  DuplicateCacheName,
  MissingKey,
  GeometryUnderflow,
  NonNumericValue,
};

std::string_view to_string(ConfigErrorKind kind);

/// Thrown by every parser in this header. `field()` names the offending
/// field, flag or key when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string field, const std::string& detail);

  ConfigErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ConfigErrorKind kind_;
  std::string field_;
};

/// Geometry of one set-associative cache or TLB. For a TLB, `bsize` is the
/// page size in bytes.
struct CacheSpec {
  std::string name;
  std::uint64_t nsets = 1;
  std::uint64_t bsize = 1;
  std::uint64_t assoc = 1;
  ReplacementPolicy repl = ReplacementPolicy::Lru;

  std::uint64_t capacity_bytes() const { return nsets * bsize * assoc; }

  /// Renders `<name>:<nsets>:<bsize>:<assoc>:<repl>`.
  std::string to_string() const;

  bool operator==(const CacheSpec&) const = default;
};

/// Parses `<name>:<nsets>:<bsize>:<assoc>:<repl>`. Numbers are plain decimal
/// without sign or leading zeros, so every accepted string round-trips
/// through CacheSpec::to_string() unchanged.
CacheSpec parse_cache_spec(std::string_view text);

bool is_power_of_two(std::uint64_t v);

enum class Level { Il1, Il2, Dl1, Dl2 };

std::string_view level_name(Level level);

struct NoCache {
  bool operator==(const NoCache&) const = default;
};

struct UnifiedWith {
  Level target;
  bool operator==(const UnifiedWith&) const = default;
};

/// How one hierarchy slot is populated.
using CacheBinding = std::variant<NoCache, CacheSpec, UnifiedWith>;

bool is_configured(const CacheBinding& b);
bool is_none(const CacheBinding& b);

struct HierarchySpec {
  CacheBinding il1;
  CacheBinding il2;
  CacheBinding dl1;
  CacheBinding dl2;
  CacheBinding itlb;
  CacheBinding dtlb;
  bool flush_on_syscall = false;

  /// Throws ConfigError when the bindings form an unsupported combination.
  void validate() const;

  bool operator==(const HierarchySpec&) const = default;
};

/// The stock sim-cache configuration.
HierarchySpec default_hierarchy();

/// Flag names accepted by parse_hierarchy_args.
inline constexpr std::string_view kHierarchyFlags[] = {
    "-cache:il1", "-cache:il2", "-cache:dl1", "-cache:dl2",
    "-tlb:itlb",  "-tlb:dtlb",  "-flush",
};

bool is_hierarchy_flag(std::string_view flag);

/// Parses a flat `flag value flag value ...` list. Unspecified flags keep
/// their default; a repeated flag takes its last value.
HierarchySpec parse_hierarchy_args(std::span<const std::string> args);

/// Cycle-model parameters shared by both dialects. Penalties and latencies
/// are in core cycles.
struct TimingSpec {
  std::uint64_t core_clk_mhz = 1000;
  std::uint64_t bus_clk_mhz = 500;
  std::uint64_t miss_penalty = 36;
  std::uint64_t wb_penalty = 33;
  std::uint64_t icache_penalty = 45;
  std::uint64_t branch_stall = 1;
  std::uint64_t tlb_lat = 30;
  std::uint64_t mem_lat_first = 18;
  std::uint64_t mem_lat_next = 2;
  std::uint64_t mem_width = 8;
  std::uint64_t num_caches = 1;

  void validate() const;

  bool operator==(const TimingSpec&) const = default;
};

struct VexConfig {
  CacheSpec dcache;
  CacheSpec icache;
  TimingSpec timing;
  /// Keys that were recognised as vex.cfg syntax but carry no modeled meaning.
  std::vector<std::string> ignored_keys;
};

/// Parses a vex.cfg body. Cache geometry keys are log2-encoded; `lg2Sets`
/// and `lg2ICacheSets` give the number of ways.
VexConfig parse_vex_cfg(std::string_view text);

/// Split L1 instruction and data caches, nothing below them, no TLBs.
HierarchySpec vex_hierarchy(const VexConfig& cfg);

}  // namespace cachesim
