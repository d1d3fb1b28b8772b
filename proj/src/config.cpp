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

#include "cachesim/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>

#include <fmt/format.h>

namespace cachesim {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// Strict decimal: digits only, no sign, no leading zero unless the value is 0.
std::optional<std::uint64_t> parse_decimal(std::string_view s) {
  if (s.empty() || (s.size() > 1 && s.front() == '0')) return std::nullopt;
  if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  });
}

std::optional<Level> level_from_name(std::string_view s) {
  if (s == "il1") return Level::Il1;
  if (s == "il2") return Level::Il2;
  if (s == "dl1") return Level::Dl1;
  if (s == "dl2") return Level::Dl2;
  return std::nullopt;
}

[[noreturn]] void fail(ConfigErrorKind kind, std::string field, const std::string& detail) {
  throw ConfigError(kind, std::move(field), detail);
}

}  // namespace

char policy_char(ReplacementPolicy p) {
  switch (p) {
    case ReplacementPolicy::Lru: return 'l';
    case ReplacementPolicy::Fifo: return 'f';
    case ReplacementPolicy::Random: return 'r';
  }
  return '?';
}

std::optional<ReplacementPolicy> policy_from_char(char c) {
  switch (c) {
    case 'l': return ReplacementPolicy::Lru;
    case 'f': return ReplacementPolicy::Fifo;
    case 'r': return ReplacementPolicy::Random;
    default: return std::nullopt;
  }
}

std::string_view policy_name(ReplacementPolicy p) {
  switch (p) {
    case ReplacementPolicy::Lru: return "LRU";
    case ReplacementPolicy::Fifo: return "FIFO";
    case ReplacementPolicy::Random: return "RANDOM";
  }
  return "?";
}

std::string_view to_string(ConfigErrorKind kind) {
  switch (kind) {
    case ConfigErrorKind::WrongFieldCount: return "WrongFieldCount";
    case ConfigErrorKind::NonPowerOfTwo: return "NonPowerOfTwo";
    case ConfigErrorKind::UnknownPolicy: return "UnknownPolicy";
    case ConfigErrorKind::NonNumeric: return "NonNumeric";
    case ConfigErrorKind::InvalidName: return "InvalidName";
    case ConfigErrorKind::InvalidUnification: return "InvalidUnification";
    case ConfigErrorKind::UnknownFlag: return "UnknownFlag";
    case ConfigErrorKind::MissingValue: return "MissingValue";
    case ConfigErrorKind::InvalidValue: return "InvalidValue";
    case ConfigErrorKind::DuplicateCacheName: return "DuplicateCacheName";
    case ConfigErrorKind::MissingKey: return "MissingKey";
    case ConfigErrorKind::GeometryUnderflow: return "GeometryUnderflow";
    case ConfigErrorKind::NonNumericValue: return "NonNumericValue";
  }
  return "?";
}

ConfigError::ConfigError(ConfigErrorKind kind, std::string field, const std::string& detail)
    : std::runtime_error(fmt::format("{}({}): {}", cachesim::to_string(kind), field, detail)),
      kind_(kind),
      field_(std::move(field)) {}

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string CacheSpec::to_string() const {
  return fmt::format("{}:{}:{}:{}:{}", name, nsets, bsize, assoc, policy_char(repl));
}

CacheSpec parse_cache_spec(std::string_view text) {
  auto fields = split(text, ':');
  if (fields.size() != 5)
    fail(ConfigErrorKind::WrongFieldCount, std::string(text),
         fmt::format("expected <name>:<nsets>:<bsize>:<assoc>:<repl>, got {} field(s)",
                     fields.size()));

  CacheSpec spec;
  if (!valid_name(fields[0]))
    fail(ConfigErrorKind::InvalidName, "name", fmt::format("bad cache name '{}'", fields[0]));
  spec.name = std::string(fields[0]);

  constexpr std::array<const char*, 3> names = {"nsets", "bsize", "assoc"};
  std::array<std::uint64_t*, 3> slots = {&spec.nsets, &spec.bsize, &spec.assoc};
  for (std::size_t i = 0; i < 3; ++i) {
    auto value = parse_decimal(fields[i + 1]);
    if (!value)
      fail(ConfigErrorKind::NonNumeric, names[i],
           fmt::format("'{}' is not a decimal number", fields[i + 1]));
    if (!is_power_of_two(*value))
      fail(ConfigErrorKind::NonPowerOfTwo, names[i],
           fmt::format("{} must be a power of two, got {}", names[i], *value));
    *slots[i] = *value;
  }

  auto repl = fields[4];
  std::optional<ReplacementPolicy> policy;
  if (repl.size() == 1) policy = policy_from_char(repl.front());
  if (!policy)
    fail(ConfigErrorKind::UnknownPolicy, std::string(repl),
         "replacement must be 'l' (LRU), 'f' (FIFO) or 'r' (random)");
  spec.repl = *policy;
  return spec;
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Il1: return "il1";
    case Level::Il2: return "il2";
    case Level::Dl1: return "dl1";
    case Level::Dl2: return "dl2";
  }
  return "?";
}

bool is_configured(const CacheBinding& b) { return std::holds_alternative<CacheSpec>(b); }
bool is_none(const CacheBinding& b) { return std::holds_alternative<NoCache>(b); }

void HierarchySpec::validate() const {
  auto check_plain = [](const CacheBinding& b, std::string_view slot) {
    if (std::holds_alternative<UnifiedWith>(b))
      fail(ConfigErrorKind::InvalidUnification, std::string(slot),
           fmt::format("{} cannot be pointed at another level", slot));
  };
  check_plain(dl1, "dl1");
  check_plain(dl2, "dl2");
  check_plain(itlb, "itlb");
  check_plain(dtlb, "dtlb");

  if (is_configured(dl2) && is_none(dl1))
    fail(ConfigErrorKind::InvalidUnification, "dl2",
         "the l1 data cache must be defined if the l2 data cache is defined");

  if (auto* u = std::get_if<UnifiedWith>(&il1)) {
    if (u->target != Level::Dl1 && u->target != Level::Dl2)
      fail(ConfigErrorKind::InvalidUnification, "il1", "il1 may only point at dl1 or dl2");
    const auto& target = u->target == Level::Dl1 ? dl1 : dl2;
    if (!is_configured(target))
      fail(ConfigErrorKind::InvalidUnification, "il1",
           fmt::format("il1 cannot share {} as it is undefined", level_name(u->target)));
    // Instruction misses follow the data chain, so a separate il2 would be
    // unreachable.
    if (is_configured(il2))
      fail(ConfigErrorKind::InvalidUnification, "il2",
           "il2 cannot be configured when il1 is unified with a data cache");
  }

  if (auto* u = std::get_if<UnifiedWith>(&il2)) {
    if (u->target != Level::Dl2)
      fail(ConfigErrorKind::InvalidUnification, "il2", "il2 may only point at dl2");
    if (!is_configured(dl2) && !is_none(il1))
      fail(ConfigErrorKind::InvalidUnification, "il2",
           "il2 cannot share dl2 as it is undefined");
  }

  if (is_configured(il2) && is_none(il1))
    fail(ConfigErrorKind::InvalidUnification, "il2",
         "the l1 inst cache must be defined if the l2 inst cache is defined");

  for (const auto* b : {&il1, &il2, &dl1, &dl2, &itlb, &dtlb}) {
    if (auto* spec = std::get_if<CacheSpec>(b)) {
      if (!is_power_of_two(spec->nsets) || !is_power_of_two(spec->bsize) ||
          !is_power_of_two(spec->assoc))
        fail(ConfigErrorKind::NonPowerOfTwo, spec->name, "geometry must be powers of two");
    }
  }
}

HierarchySpec default_hierarchy() {
  HierarchySpec h;
  h.dl1 = parse_cache_spec("dl1:256:32:1:l");
  h.dl2 = parse_cache_spec("ul2:1024:64:4:l");
  h.il1 = parse_cache_spec("il1:256:32:1:l");
  h.il2 = UnifiedWith{Level::Dl2};
  h.itlb = parse_cache_spec("itlb:16:4096:4:l");
  h.dtlb = parse_cache_spec("dtlb:32:4096:4:l");
  h.flush_on_syscall = false;
  return h;
}

bool is_hierarchy_flag(std::string_view flag) {
  return std::find(std::begin(kHierarchyFlags), std::end(kHierarchyFlags), flag) !=
         std::end(kHierarchyFlags);
}

namespace {

// Values a slot may take besides a config string. A level name that is not
// in `allowed` is an invalid unification.
CacheBinding parse_binding(std::string_view slot, std::string_view value,
                           std::initializer_list<Level> allowed) {
  if (value == "none") return NoCache{};
  if (auto level = level_from_name(value)) {
    if (std::find(allowed.begin(), allowed.end(), *level) == allowed.end())
      fail(ConfigErrorKind::InvalidUnification, std::string(slot),
           fmt::format("{} cannot be pointed at {}", slot, value));
    return UnifiedWith{*level};
  }
  return parse_cache_spec(value);
}

bool parse_bool(std::string_view flag, std::string_view value) {
  if (value == "true" || value == "TRUE" || value == "1") return true;
  if (value == "false" || value == "FALSE" || value == "0") return false;
  fail(ConfigErrorKind::InvalidValue, std::string(flag),
       fmt::format("expected true or false, got '{}'", value));
}

}  // namespace

HierarchySpec parse_hierarchy_args(std::span<const std::string> args) {
  HierarchySpec h = default_hierarchy();
  for (std::size_t i = 0; i < args.size(); i += 2) {
    const std::string& flag = args[i];
    if (!is_hierarchy_flag(flag))
      fail(ConfigErrorKind::UnknownFlag, flag, "not a cache hierarchy flag");
    if (i + 1 >= args.size()) fail(ConfigErrorKind::MissingValue, flag, "flag needs a value");
    std::string_view value = args[i + 1];

    if (flag == "-cache:il1") {
      h.il1 = parse_binding("il1", value, {Level::Dl1, Level::Dl2});
    } else if (flag == "-cache:il2") {
      h.il2 = parse_binding("il2", value, {Level::Dl2});
    } else if (flag == "-cache:dl1") {
      h.dl1 = parse_binding("dl1", value, {});
    } else if (flag == "-cache:dl2") {
      h.dl2 = parse_binding("dl2", value, {});
    } else if (flag == "-tlb:itlb") {
      h.itlb = parse_binding("itlb", value, {});
    } else if (flag == "-tlb:dtlb") {
      h.dtlb = parse_binding("dtlb", value, {});
    } else {
      h.flush_on_syscall = parse_bool(flag, value);
    }
  }
  h.validate();
  return h;
}

void TimingSpec::validate() const {
  if (bus_clk_mhz == 0)
    fail(ConfigErrorKind::InvalidValue, "BusCkFreq", "bus clock must be positive");
  if (core_clk_mhz < bus_clk_mhz)
    fail(ConfigErrorKind::InvalidValue, "CoreCkFreq",
         "core clock must be at least the bus clock");
  if (!is_power_of_two(mem_width))
    fail(ConfigErrorKind::NonPowerOfTwo, "mem_width",
         fmt::format("memory bus width must be a power of two, got {}", mem_width));
}

namespace {

constexpr std::uint64_t kMaxLg2 = 40;

CacheSpec vex_geometry(std::string name, std::uint64_t lg2_size, std::uint64_t lg2_ways,
                       std::uint64_t lg2_line, std::string_view size_key) {
  for (auto v : {lg2_size, lg2_ways, lg2_line}) {
    if (v > kMaxLg2)
      fail(ConfigErrorKind::InvalidValue, std::string(size_key),
           fmt::format("log2 value {} out of range", v));
  }
  if (lg2_size < lg2_ways + lg2_line)
    fail(ConfigErrorKind::GeometryUnderflow, std::string(size_key),
         fmt::format("cache of 2^{} bytes cannot hold 2^{} ways of 2^{}-byte lines", lg2_size,
                     lg2_ways, lg2_line));
  CacheSpec spec;
  spec.name = std::move(name);
  spec.assoc = std::uint64_t{1} << lg2_ways;
  spec.bsize = std::uint64_t{1} << lg2_line;
  spec.nsets = std::uint64_t{1} << (lg2_size - lg2_ways - lg2_line);
  spec.repl = ReplacementPolicy::Lru;
  return spec;
}

}  // namespace

VexConfig parse_vex_cfg(std::string_view text) {
  static constexpr std::string_view required[] = {
      "CoreCkFreq",   "BusCkFreq",     "lg2CacheSize",  "lg2Sets",
      "lg2LineSize",  "MissPenalty",   "WBPenalty",     "lg2ICacheSize",
      "lg2ICacheSets", "lg2ICacheLineSize", "ICachePenalty",
  };
  static constexpr std::string_view optional_keys[] = {"NumCaches", "BranchStall"};

  std::map<std::string, std::uint64_t, std::less<>> values;
  VexConfig cfg;

  for (auto line : split(text, '\n')) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      auto start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos > start) tokens.push_back(line.substr(start, pos - start));
    }
    if (tokens.empty()) continue;

    std::string key(tokens[0]);
    bool modeled = std::find(std::begin(required), std::end(required), key) != std::end(required) ||
                   std::find(std::begin(optional_keys), std::end(optional_keys), key) !=
                       std::end(optional_keys);
    if (!modeled) {
      if (std::find(cfg.ignored_keys.begin(), cfg.ignored_keys.end(), key) ==
          cfg.ignored_keys.end())
        cfg.ignored_keys.push_back(key);
      continue;
    }
    if (tokens.size() != 2)
      fail(ConfigErrorKind::NonNumericValue, key, "expected exactly one value");
    // vex.cfg values are written unpadded, but tolerate leading zeros here.
    std::string_view raw = tokens[1];
    while (raw.size() > 1 && raw.front() == '0') raw.remove_prefix(1);
    auto value = parse_decimal(raw);
    if (!value)
      fail(ConfigErrorKind::NonNumericValue, key,
           fmt::format("'{}' is not a non-negative integer", tokens[1]));
    values[key] = *value;
  }

  for (auto key : required) {
    if (!values.contains(key))
      fail(ConfigErrorKind::MissingKey, std::string(key), "required vex.cfg key is missing");
  }
  auto get = [&](std::string_view key) { return values.find(key)->second; };

  cfg.dcache = vex_geometry("dcache", get("lg2CacheSize"), get("lg2Sets"), get("lg2LineSize"),
                            "lg2CacheSize");
  cfg.icache = vex_geometry("icache", get("lg2ICacheSize"), get("lg2ICacheSets"),
                            get("lg2ICacheLineSize"), "lg2ICacheSize");

  TimingSpec& t = cfg.timing;
  t.core_clk_mhz = get("CoreCkFreq");
  t.bus_clk_mhz = get("BusCkFreq");
  t.miss_penalty = get("MissPenalty");
  t.wb_penalty = get("WBPenalty");
  t.icache_penalty = get("ICachePenalty");
  if (auto it = values.find("BranchStall"); it != values.end()) t.branch_stall = it->second;
  if (auto it = values.find("NumCaches"); it != values.end()) t.num_caches = it->second;
  t.validate();
  return cfg;
}

HierarchySpec vex_hierarchy(const VexConfig& cfg) {
  HierarchySpec h;
  h.il1 = cfg.icache;
  h.il2 = NoCache{};
  h.dl1 = cfg.dcache;
  h.dl2 = NoCache{};
  h.itlb = NoCache{};
  h.dtlb = NoCache{};
  h.flush_on_syscall = false;
  return h;
}

}  // namespace cachesim
