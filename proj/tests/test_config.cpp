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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cachesim/config.hpp"

using namespace cachesim;

namespace {

ConfigErrorKind spec_error(std::string_view text) {
  try {
    parse_cache_spec(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError for '" << text << "'");
  return ConfigErrorKind::InvalidValue;
}

ConfigErrorKind hierarchy_error(std::vector<std::string> args) {
  try {
    parse_hierarchy_args(args);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigErrorKind::InvalidValue;
}

ConfigErrorKind vex_error(std::string_view text) {
  try {
    parse_vex_cfg(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigErrorKind::InvalidValue;
}

const CacheSpec& configured(const CacheBinding& b) {
  REQUIRE(std::holds_alternative<CacheSpec>(b));
  return std::get<CacheSpec>(b);
}

constexpr std::string_view kVexCfg = R"(CoreCkFreq      1000
BusCkFreq       500
lg2CacheSize    16 # (CacheSize      = 256k)
lg2Sets         2 # (Sets           = 4)
lg2LineSize     5 # (LineSize       = 32)
MissPenalty     36
WBPenalty       33
lg2StrSize      9 # (StrSize        = 512)
lg2StrSets      4 # (StrSets         = 16)
lg2StrLineSize  5 # (StrLineSize     = 32)
StrMissPenalty  36
StrWBPenalty    33
lg2ICacheSize   15 # (ICacheSize     = 32k)
lg2ICacheSets   0 # (ICacheSets      = 1)
lg2ICacheLineSize 6 # (ICacheLineSize  = 64)
ICachePenalty   45
NumCaches       1
BranchStall     1
StreamEnable    FALSE
PrefetchEnable  TRUE
LockEnable      FALSE
ProfGranularity AUTO
)";

}  // namespace

TEST_CASE("cache strings from the documentation parse to their fields") {
  const CacheSpec dl1 = parse_cache_spec("dl1:256:32:1:l");
  CHECK(dl1.name == "dl1");
  CHECK(dl1.nsets == 256);
  CHECK(dl1.bsize == 32);
  CHECK(dl1.assoc == 1);
  CHECK(dl1.repl == ReplacementPolicy::Lru);
  CHECK(dl1.capacity_bytes() == 8192);

  const CacheSpec ul2 = parse_cache_spec("ul2:1024:64:4:l");
  CHECK(ul2.name == "ul2");
  CHECK(ul2.nsets == 1024);
  CHECK(ul2.bsize == 64);
  CHECK(ul2.assoc == 4);

  const CacheSpec dtlb = parse_cache_spec("dtlb:128:4096:32:r");
  CHECK(dtlb.nsets == 128);
  CHECK(dtlb.bsize == 4096);
  CHECK(dtlb.assoc == 32);
  CHECK(dtlb.repl == ReplacementPolicy::Random);

  CHECK(parse_cache_spec("x:1:1:1:f").repl == ReplacementPolicy::Fifo);
}

TEST_CASE("malformed cache strings report the failing field") {
  CHECK(spec_error("dl1:100:32:1:l") == ConfigErrorKind::NonPowerOfTwo);
  try {
    parse_cache_spec("dl1:100:32:1:l");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "nsets");
  }
  CHECK(spec_error("dl1:256:48:1:l") == ConfigErrorKind::NonPowerOfTwo);
  CHECK(spec_error("dl1:256:32:3:l") == ConfigErrorKind::NonPowerOfTwo);
  CHECK(spec_error("dl1:0:32:1:l") == ConfigErrorKind::NonPowerOfTwo);
  CHECK(spec_error("dl1:256:32:1") == ConfigErrorKind::WrongFieldCount);
  CHECK(spec_error("dl1:256:32:1:l:x") == ConfigErrorKind::WrongFieldCount);
  CHECK(spec_error("") == ConfigErrorKind::WrongFieldCount);
  CHECK(spec_error("dl1:256:32:1:x") == ConfigErrorKind::UnknownPolicy);
  CHECK(spec_error("dl1:256:32:1:lr") == ConfigErrorKind::UnknownPolicy);
  CHECK(spec_error("dl1:abc:32:1:l") == ConfigErrorKind::NonNumeric);
  CHECK(spec_error("dl1:-4:32:1:l") == ConfigErrorKind::NonNumeric);
  CHECK(spec_error("dl1:0256:32:1:l") == ConfigErrorKind::NonNumeric);
  CHECK(spec_error(":256:32:1:l") == ConfigErrorKind::InvalidName);
}

TEST_CASE("every valid cache string round-trips byte for byte") {
  std::mt19937_64 rng(7);
  const char policies[] = {'l', 'f', 'r'};
  for (int i = 0; i < 2000; ++i) {
    const std::string text =
        fmt::format("c{}:{}:{}:{}:{}", rng() % 100, 1ull << (rng() % 20), 1ull << (rng() % 13),
                    1ull << (rng() % 6), policies[rng() % 3]);
    CHECK(parse_cache_spec(text).to_string() == text);
  }
}

TEST_CASE("policy characters map one to one") {
  for (auto p : {ReplacementPolicy::Lru, ReplacementPolicy::Fifo, ReplacementPolicy::Random})
    CHECK(policy_from_char(policy_char(p)) == p);
  CHECK_FALSE(policy_from_char('L').has_value());
}

TEST_CASE("no hierarchy flags give the documented defaults") {
  const HierarchySpec d = parse_hierarchy_args({});
  CHECK(configured(d.dl1) == parse_cache_spec("dl1:256:32:1:l"));
  CHECK(configured(d.dl2) == parse_cache_spec("ul2:1024:64:4:l"));
  CHECK(configured(d.il1) == parse_cache_spec("il1:256:32:1:l"));
  CHECK(std::get<UnifiedWith>(d.il2).target == Level::Dl2);
  CHECK(configured(d.itlb) == parse_cache_spec("itlb:16:4096:4:l"));
  CHECK(configured(d.dtlb) == parse_cache_spec("dtlb:32:4096:4:l"));
  CHECK_FALSE(d.flush_on_syscall);
  CHECK(d == default_hierarchy());

  const std::vector<std::string> spelled = {
      "-cache:dl1", "dl1:256:32:1:l",   "-cache:dl2", "ul2:1024:64:4:l", "-cache:il1",
      "il1:256:32:1:l", "-cache:il2", "dl2", "-tlb:itlb", "itlb:16:4096:4:l",
      "-tlb:dtlb", "dtlb:32:4096:4:l", "-flush", "false"};
  CHECK(parse_hierarchy_args(spelled) == d);
}

TEST_CASE("unification bindings") {
  const HierarchySpec a = parse_hierarchy_args(
      std::vector<std::string>{"-cache:il1", "il1:128:64:1:l", "-cache:il2", "dl2"});
  CHECK(std::get<UnifiedWith>(a.il2).target == Level::Dl2);
  CHECK(configured(a.il1).nsets == 128);

  const HierarchySpec b = parse_hierarchy_args(
      std::vector<std::string>{"-cache:dl1", "ul1:256:32:1:l", "-cache:il1", "dl1"});
  CHECK(std::get<UnifiedWith>(b.il1).target == Level::Dl1);
  CHECK(configured(b.dl1).name == "ul1");

  const HierarchySpec c = parse_hierarchy_args(std::vector<std::string>{"-cache:il1", "dl2"});
  CHECK(std::get<UnifiedWith>(c.il1).target == Level::Dl2);
}

TEST_CASE("unsupported hierarchy combinations are rejected") {
  CHECK(hierarchy_error({"-cache:dl1", "il1"}) == ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:dl1", "dl2"}) == ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:il2", "dl1"}) == ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:il1", "il2"}) == ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-tlb:itlb", "dl1"}) == ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:dl1", "none", "-cache:il1", "dl1"}) ==
        ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:dl1", "none"}) == ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:il1", "none", "-cache:il2", "il2:64:64:1:l"}) ==
        ConfigErrorKind::InvalidUnification);
  CHECK(hierarchy_error({"-cache:dl3", "x:1:1:1:l"}) == ConfigErrorKind::UnknownFlag);
  CHECK(hierarchy_error({"-cache:dl1"}) == ConfigErrorKind::MissingValue);
  CHECK(hierarchy_error({"-flush", "maybe"}) == ConfigErrorKind::InvalidValue);
  CHECK(hierarchy_error({"-cache:dl1", "dl1:3:32:1:l"}) == ConfigErrorKind::NonPowerOfTwo);
}

TEST_CASE("the last repeated flag wins and none disables a level") {
  const HierarchySpec h = parse_hierarchy_args(std::vector<std::string>{
      "-flush", "true", "-tlb:itlb", "none", "-tlb:dtlb", "none", "-flush", "false"});
  CHECK_FALSE(h.flush_on_syscall);
  CHECK(is_none(h.itlb));
  CHECK(is_none(h.dtlb));
}

TEST_CASE("vex.cfg geometry uses lg2Sets as the way count") {
  const VexConfig cfg = parse_vex_cfg(kVexCfg);
  CHECK(cfg.dcache.capacity_bytes() == 65536);
  CHECK(cfg.dcache.assoc == 4);
  CHECK(cfg.dcache.bsize == 32);
  CHECK(cfg.dcache.nsets == 512);
  CHECK(cfg.icache.capacity_bytes() == 32768);
  CHECK(cfg.icache.assoc == 1);
  CHECK(cfg.icache.bsize == 64);
  CHECK(cfg.icache.nsets == 512);

  CHECK(cfg.timing.core_clk_mhz == 1000);
  CHECK(cfg.timing.bus_clk_mhz == 500);
  CHECK(cfg.timing.miss_penalty == 36);
  CHECK(cfg.timing.wb_penalty == 33);
  CHECK(cfg.timing.icache_penalty == 45);
  CHECK(cfg.timing.branch_stall == 1);
  CHECK(cfg.timing.num_caches == 1);

  const std::vector<std::string> ignored = cfg.ignored_keys;
  for (const char* key : {"StreamEnable", "PrefetchEnable", "LockEnable", "ProfGranularity",
                          "lg2StrSize", "StrMissPenalty"})
    CHECK(std::find(ignored.begin(), ignored.end(), key) != ignored.end());
}

TEST_CASE("vex.cfg geometry always multiplies out to the cache size") {
  for (int size = 4; size <= 20; ++size) {
    for (int ways = 0; ways <= 3; ++ways) {
      for (int line = 2; line <= 7; ++line) {
        const std::string text = fmt::format(
            "CoreCkFreq 1000\nBusCkFreq 500\nlg2CacheSize {0}\nlg2Sets {1}\nlg2LineSize {2}\n"
            "MissPenalty 1\nWBPenalty 1\nlg2ICacheSize {0}\nlg2ICacheSets {1}\n"
            "lg2ICacheLineSize {2}\nICachePenalty 1\n",
            size, ways, line);
        if (size < ways + line) {
          CHECK(vex_error(text) == ConfigErrorKind::GeometryUnderflow);
          continue;
        }
        const VexConfig cfg = parse_vex_cfg(text);
        CHECK(cfg.dcache.nsets * cfg.dcache.bsize * cfg.dcache.assoc == (1ull << size));
        CHECK(cfg.icache.nsets * cfg.icache.bsize * cfg.icache.assoc == (1ull << size));
      }
    }
  }
}

TEST_CASE("vex.cfg errors") {
  std::string missing(kVexCfg);
  missing.erase(missing.find("MissPenalty     36\n"), 19);
  CHECK(vex_error(missing) == ConfigErrorKind::MissingKey);

  std::string bad(kVexCfg);
  bad.replace(bad.find("36"), 2, "3x");
  CHECK(vex_error(bad) == ConfigErrorKind::NonNumericValue);

  CHECK(vex_error("CoreCkFreq\n") != ConfigErrorKind::MissingKey);
}

TEST_CASE("timing constraints") {
  TimingSpec t;
  CHECK_NOTHROW(t.validate());
  t.bus_clk_mhz = 2000;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = TimingSpec{};
  t.bus_clk_mhz = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = TimingSpec{};
  t.mem_width = 6;
  CHECK_THROWS_AS(t.validate(), ConfigError);
}
