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

#include "cachesim/report.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "cachesim/numfmt.hpp"

namespace cachesim {

using nlohmann::json;

ExportFormat parse_format(std::string_view name) {
  if (name == "text") return ExportFormat::Text;
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  throw FormatError(fmt::format("UnsupportedFormat: '{}' (expected text, csv or json)", name));
}

// ---------------------------------------------------------------- sim-cache

namespace {

void stat_line(std::string& out, std::string_view name, std::string_view value,
               std::string_view desc) {
  fmt::format_to(std::back_inserter(out), "{} {} # {}\n", name, value, desc);
}

}  // namespace

std::string render_simcache(const SimReport& r, std::span<const MemoryTimingRow> memory_rows) {
  std::string out = "sim: ** simulation statistics **\n";
  stat_line(out, "sim_num_insn", std::to_string(r.sim_num_insn),
            "total number of instructions executed");
  stat_line(out, "sim_num_refs", std::to_string(r.sim_num_refs),
            "total number of loads and stores executed");
  stat_line(out, "sim_elapsed_time", std::to_string(r.sim_elapsed_time),
            "total simulation time in seconds");
  stat_line(out, "sim_inst_rate",
            format_ratio(r.sim_num_insn, std::max<std::uint64_t>(r.sim_elapsed_time, 1), 1, 4),
            "simulation speed (in insts/sec)");

  for (const auto& c : r.caches) {
    const CacheStats& s = c.stats;
    auto line = [&](std::string_view counter, const std::string& value, std::string_view desc) {
      stat_line(out, fmt::format("{}.{}", c.name, counter), value, desc);
    };
    line("accesses", std::to_string(s.accesses), "total number of accesses");
    line("hits", std::to_string(s.hits), "total number of hits");
    line("misses", std::to_string(s.misses), "total number of misses");
    line("replacements", std::to_string(s.replacements), "total number of replacements");
    line("writebacks", std::to_string(s.writebacks), "total number of writebacks");
    line("invalidations", std::to_string(s.invalidations), "total number of invalidations");
    line("miss_rate", format_ratio(s.misses, s.accesses, 1, 4), "miss rate (i.e., misses/ref)");
    line("repl_rate", format_ratio(s.replacements, s.accesses, 1, 4),
         "replacement rate (i.e., repls/ref)");
    line("wb_rate", format_ratio(s.writebacks, s.accesses, 1, 4),
         "writeback rate (i.e., wrbks/ref)");
    line("inv_rate", format_ratio(s.invalidations, s.accesses, 1, 4),
         "invalidation rate (i.e., invs/ref)");
  }

  for (const auto& m : memory_rows) {
    stat_line(out, m.name + ".mem_latency", std::to_string(m.latency),
              "memory-side latency per miss (cycles)");
    stat_line(out, m.name + ".mem_cycles", std::to_string(m.cycles),
              "memory-side stall cycles (misses x latency)");
  }
  return out;
}

// ---------------------------------------------------------------- VEX summary

namespace {

constexpr std::size_t kLabelWidth = 29;
constexpr std::size_t kIndentedWidth = 30;

// "( 17.00%)": right-aligned in six columns as VEX prints it.
std::string pct6(std::uint64_t num, std::uint64_t den) {
  return fmt::format("({:>6}%)", format_percent(num, den));
}

struct Summary {
  std::string out;

  void top(std::string_view label, const std::string& value) {
    fmt::format_to(std::back_inserter(out), "{:<{}}{}\n", label, kLabelWidth, value);
  }
  void inner(std::string_view label, const std::string& value) {
    fmt::format_to(std::back_inserter(out), "  {:<{}}{}\n", label, kIndentedWidth - 2, value);
  }
  void text(std::string_view s) {
    out += s;
    out += '\n';
  }
};

void side_block(Summary& s, const MemSideCycles& m, std::string_view ops_title,
                std::string_view ops_note, std::string_view stall_title, bool accesses_pct) {
  if (ops_note.empty())
    s.text(ops_title);
  else
    s.top(ops_title, std::string(ops_note));
  std::string accesses = std::to_string(m.accesses);
  if (accesses_pct && m.accesses > 0) accesses += " " + pct6(m.accesses, m.accesses);
  s.inner("Accesses:", accesses);
  if (m.accesses > 0) {
    s.inner("Hits (Hit Rate):", fmt::format("{} {}", m.hits, pct6(m.hits, m.accesses)));
    s.inner("Misses (Miss Rate):", fmt::format("{} {}", m.misses, pct6(m.misses, m.accesses)));
  } else {
    s.inner("Hits (Hit Rate):", std::to_string(m.hits));
    s.inner("Misses (Miss Rate):", std::to_string(m.misses));
  }
  s.text(stall_title);
  auto stall = [&](std::string_view label, std::uint64_t v) {
    if (m.stall_total > 0)
      s.inner(label, fmt::format("{} {}", v, pct6(v, m.stall_total)));
    else
      s.inner(label, std::to_string(v));
  };
  stall("Total (in cycles):", m.stall_total);
  stall("Due to Misses:", m.stall_miss);
  stall("Due to Bus Conflicts:", m.stall_bus_conflict);
}

std::string branch_value(std::uint64_t count, const CycleReport& c, bool with_br) {
  std::string v = std::to_string(count);
  if (c.executed_operations > 0)
    v += fmt::format(" ({:>6}% ops)", format_percent(count, c.executed_operations));
  if (c.execution_cycles > 0)
    v += fmt::format("({:>5}% insts)", format_percent(count, c.execution_cycles));
  if (with_br && c.branch.executed > 0)
    v += fmt::format("({:>5}% br)", format_percent(count, c.branch.executed));
  return v;
}

}  // namespace

std::string render_vex_summary(const CycleReport& c) {
  Summary s;
  std::string total = std::to_string(c.total_cycles);
  if (c.core_clk_mhz > 0)
    total += fmt::format(" ({} msec)", format_ratio(c.total_cycles, c.core_clk_mhz * 1000, 1, 6));
  s.top("Total Cycles:", total);
  if (c.total_cycles > 0) {
    s.top("Execution Cycles:",
          fmt::format("{} {}", c.execution_cycles, pct6(c.execution_cycles, c.total_cycles)));
  } else {
    s.top("Execution Cycles:", std::to_string(c.execution_cycles));
  }
  if (c.stall_cycles > 0)
    s.top("Stall Cycles:", fmt::format("{} {}", c.stall_cycles, pct6(c.stall_cycles, c.total_cycles)));
  else
    s.top("Stall Cycles:", "0");
  s.top("Executed operations:", std::to_string(c.executed_operations));
  s.text("");

  s.top("Executed branches:", branch_value(c.branch.executed, c, false));
  s.top("Not taken branches:", branch_value(c.branch.not_taken, c, true));
  s.top("Taken branches:", branch_value(c.branch.taken, c, true));
  s.text("");

  side_block(s, c.imem, "Instruction Memory Operations:", "", "Instruction Memory Stall Cycles",
             false);
  s.text("");
  side_block(s, c.dmem, "Data Memory Operations:", "Cache", "Data Memory Stall Cycles", true);
  s.text("");
  s.out += fmt::format("Percentage Bus Bandwidth Consumed: {}%\n",
                       format_percent(c.bus_busy_cycles, c.total_cycles));
  return s.out;
}

// ---------------------------------------------------------------- profile

std::string render_region_profile(const CycleReport& c) {
  std::vector<std::size_t> order(c.regions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return c.regions[a].total_cycles > c.regions[b].total_cycles;
  });

  std::uint64_t total = 0, insts = 0, dcache = 0, icache = 0;
  for (const auto& r : c.regions) {
    total += r.total_cycles;
    insts += r.insts;
    dcache += r.dcache_cycles;
    icache += r.icache_cycles;
  }

  std::string out = "Flat profile (cycles)\t\tInsts\t\tDcache\t\tIcache\t\tFunction\n";
  out += "Total\tTotal%\tInsts\tInsts%\tDcache\tDcache%\tIcache\tIcache%\t\n";
  for (std::size_t i : order) {
    const RegionCycles& r = c.regions[i];
    fmt::format_to(std::back_inserter(out), "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                   r.total_cycles, format_percent(r.total_cycles, total), r.insts,
                   format_percent(r.insts, insts), r.dcache_cycles,
                   format_percent(r.dcache_cycles, dcache), r.icache_cycles,
                   format_percent(r.icache_cycles, icache), r.name);
  }
  return out;
}

// ---------------------------------------------------------------- JSON

namespace {

json stats_json(const CacheStats& s) {
  return {{"accesses", s.accesses},         {"hits", s.hits},
          {"misses", s.misses},             {"replacements", s.replacements},
          {"writebacks", s.writebacks},     {"invalidations", s.invalidations}};
}

CacheStats stats_from(const json& j) {
  CacheStats s;
  s.accesses = j.at("accesses").get<std::uint64_t>();
  s.hits = j.at("hits").get<std::uint64_t>();
  s.misses = j.at("misses").get<std::uint64_t>();
  s.replacements = j.at("replacements").get<std::uint64_t>();
  s.writebacks = j.at("writebacks").get<std::uint64_t>();
  s.invalidations = j.at("invalidations").get<std::uint64_t>();
  return s;
}

json side_json(const SideStats& s) {
  return {{"accesses", s.accesses}, {"hits", s.hits}, {"misses", s.misses}};
}

SideStats side_from(const json& j) {
  return {j.at("accesses").get<std::uint64_t>(), j.at("hits").get<std::uint64_t>(),
          j.at("misses").get<std::uint64_t>()};
}

json branch_json(const BranchStats& b) {
  return {{"executed", b.executed}, {"taken", b.taken}, {"not_taken", b.not_taken}};
}

BranchStats branch_from(const json& j) {
  return {j.at("executed").get<std::uint64_t>(), j.at("taken").get<std::uint64_t>(),
          j.at("not_taken").get<std::uint64_t>()};
}

json mem_side_json(const MemSideCycles& m) {
  return {{"accesses", m.accesses},       {"hits", m.hits},
          {"misses", m.misses},           {"stall_total", m.stall_total},
          {"stall_miss", m.stall_miss},   {"stall_bus_conflict", m.stall_bus_conflict}};
}

MemSideCycles mem_side_from(const json& j) {
  MemSideCycles m;
  m.accesses = j.at("accesses").get<std::uint64_t>();
  m.hits = j.at("hits").get<std::uint64_t>();
  m.misses = j.at("misses").get<std::uint64_t>();
  m.stall_total = j.at("stall_total").get<std::uint64_t>();
  m.stall_miss = j.at("stall_miss").get<std::uint64_t>();
  m.stall_bus_conflict = j.at("stall_bus_conflict").get<std::uint64_t>();
  return m;
}

std::string_view policy_label(SweepPolicy p) { return p == SweepPolicy::Opt ? "opt" : "lru"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::string key_value_csv(const json& j) {
  std::string out = "key,value\n";
  const json flat = j.flatten();
  for (const auto& [key, value] : flat.items()) {
    const std::string v = value.is_string() ? value.get<std::string>() : value.dump();
    out += csv_field(key) + "," + csv_field(v) + "\n";
  }
  return out;
}

}  // namespace

json to_json(const SimReport& r) {
  json caches = json::array();
  for (const auto& c : r.caches)
    caches.push_back({{"name", c.name}, {"is_tlb", c.is_tlb}, {"stats", stats_json(c.stats)}});
  json regions = json::array();
  for (const auto& rc : r.regions) {
    json per_cache = json::array();
    for (const auto& s : rc.caches) per_cache.push_back(stats_json(s));
    regions.push_back({{"name", rc.name},
                       {"insts", rc.insts},
                       {"ops", rc.ops},
                       {"refs", rc.refs},
                       {"syscalls", rc.syscalls},
                       {"branches", branch_json(rc.branches)},
                       {"imem", side_json(rc.imem)},
                       {"dmem", side_json(rc.dmem)},
                       {"caches", per_cache}});
  }
  return {{"sim_num_insn", r.sim_num_insn},
          {"sim_num_refs", r.sim_num_refs},
          {"executed_operations", r.executed_operations},
          {"syscalls", r.syscalls},
          {"sim_elapsed_time", r.sim_elapsed_time},
          {"sim_inst_rate", r.sim_inst_rate()},
          {"caches", caches},
          {"branches", branch_json(r.branches)},
          {"imem", side_json(r.imem)},
          {"dmem", side_json(r.dmem)},
          {"regions", regions}};
}

SimReport sim_report_from_json(const json& j) {
  SimReport r;
  r.sim_num_insn = j.at("sim_num_insn").get<std::uint64_t>();
  r.sim_num_refs = j.at("sim_num_refs").get<std::uint64_t>();
  r.executed_operations = j.at("executed_operations").get<std::uint64_t>();
  r.syscalls = j.at("syscalls").get<std::uint64_t>();
  r.sim_elapsed_time = j.at("sim_elapsed_time").get<std::uint64_t>();
  for (const auto& c : j.at("caches"))
    r.caches.push_back(
        {c.at("name").get<std::string>(), c.at("is_tlb").get<bool>(), stats_from(c.at("stats"))});
  r.branches = branch_from(j.at("branches"));
  r.imem = side_from(j.at("imem"));
  r.dmem = side_from(j.at("dmem"));
  for (const auto& rj : j.at("regions")) {
    RegionCounters rc;
    rc.name = rj.at("name").get<std::string>();
    rc.insts = rj.at("insts").get<std::uint64_t>();
    rc.ops = rj.at("ops").get<std::uint64_t>();
    rc.refs = rj.at("refs").get<std::uint64_t>();
    rc.syscalls = rj.at("syscalls").get<std::uint64_t>();
    rc.branches = branch_from(rj.at("branches"));
    rc.imem = side_from(rj.at("imem"));
    rc.dmem = side_from(rj.at("dmem"));
    for (const auto& s : rj.at("caches")) rc.caches.push_back(stats_from(s));
    r.regions.push_back(std::move(rc));
  }
  return r;
}

json to_json(const CycleReport& c) {
  json regions = json::array();
  for (const auto& r : c.regions)
    regions.push_back({{"name", r.name},
                       {"total_cycles", r.total_cycles},
                       {"insts", r.insts},
                       {"dcache_cycles", r.dcache_cycles},
                       {"icache_cycles", r.icache_cycles}});
  return {{"total_cycles", c.total_cycles},
          {"execution_cycles", c.execution_cycles},
          {"stall_cycles", c.stall_cycles},
          {"imem", mem_side_json(c.imem)},
          {"dmem", mem_side_json(c.dmem)},
          {"branch",
           {{"executed", c.branch.executed},
            {"taken", c.branch.taken},
            {"not_taken", c.branch.not_taken},
            {"branch_stall_cycles", c.branch.branch_stall_cycles}}},
          {"bus_busy_cycles", c.bus_busy_cycles},
          {"bandwidth_pct", c.bandwidth_pct()},
          {"executed_operations", c.executed_operations},
          {"core_clk_mhz", c.core_clk_mhz},
          {"regions", regions}};
}

CycleReport cycle_report_from_json(const json& j) {
  CycleReport c;
  c.total_cycles = j.at("total_cycles").get<std::uint64_t>();
  c.execution_cycles = j.at("execution_cycles").get<std::uint64_t>();
  c.stall_cycles = j.at("stall_cycles").get<std::uint64_t>();
  c.imem = mem_side_from(j.at("imem"));
  c.dmem = mem_side_from(j.at("dmem"));
  const auto& b = j.at("branch");
  c.branch = {b.at("executed").get<std::uint64_t>(), b.at("taken").get<std::uint64_t>(),
              b.at("not_taken").get<std::uint64_t>(),
              b.at("branch_stall_cycles").get<std::uint64_t>()};
  c.bus_busy_cycles = j.at("bus_busy_cycles").get<std::uint64_t>();
  c.executed_operations = j.at("executed_operations").get<std::uint64_t>();
  c.core_clk_mhz = j.at("core_clk_mhz").get<std::uint64_t>();
  for (const auto& r : j.at("regions"))
    c.regions.push_back({r.at("name").get<std::string>(), r.at("total_cycles").get<std::uint64_t>(),
                         r.at("insts").get<std::uint64_t>(),
                         r.at("dcache_cycles").get<std::uint64_t>(),
                         r.at("icache_cycles").get<std::uint64_t>()});
  return c;
}

json to_json(const SweepTable& t) {
  json rows = json::array();
  for (const auto& r : t)
    rows.push_back({{"nsets", r.nsets},
                    {"bsize", r.bsize},
                    {"assoc", r.assoc},
                    {"policy", policy_label(r.policy)},
                    {"references", r.references},
                    {"misses", r.misses},
                    {"miss_rate", r.miss_rate()}});
  return rows;
}

SweepTable sweep_table_from_json(const json& j) {
  SweepTable t;
  for (const auto& r : j) {
    const auto policy = r.at("policy").get<std::string>();
    if (policy != "lru" && policy != "opt")
      throw FormatError("unknown sweep policy '" + policy + "'");
    t.push_back({r.at("nsets").get<std::uint64_t>(), r.at("bsize").get<std::uint64_t>(),
                 r.at("assoc").get<std::uint64_t>(),
                 policy == "opt" ? SweepPolicy::Opt : SweepPolicy::Lru,
                 r.at("references").get<std::uint64_t>(), r.at("misses").get<std::uint64_t>()});
  }
  return t;
}

// ---------------------------------------------------------------- export

std::string export_report(const SimReport& r, ExportFormat format) {
  switch (format) {
    case ExportFormat::Text: return render_simcache(r);
    case ExportFormat::Csv: return key_value_csv(to_json(r));
    case ExportFormat::Json: return to_json(r).dump(2) + "\n";
  }
  throw FormatError("UnsupportedFormat");
}

std::string export_report(const CycleReport& c, ExportFormat format) {
  switch (format) {
    case ExportFormat::Text: return render_vex_summary(c);
    case ExportFormat::Csv: return key_value_csv(to_json(c));
    case ExportFormat::Json: return to_json(c).dump(2) + "\n";
  }
  throw FormatError("UnsupportedFormat");
}

std::string export_report(const SweepTable& t, ExportFormat format) {
  if (format == ExportFormat::Json) return to_json(t).dump(2) + "\n";
  const bool has_opt =
      std::any_of(t.begin(), t.end(), [](const SweepRow& r) { return r.policy == SweepPolicy::Opt; });
  std::string out = has_opt ? "nsets,bsize,assoc,misses,miss_rate,policy\n"
                            : "nsets,bsize,assoc,misses,miss_rate\n";
  for (const auto& r : t) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{}", r.nsets, r.bsize, r.assoc,
                   r.misses, format_ratio(r.misses, r.references, 1, 6));
    if (has_opt) fmt::format_to(std::back_inserter(out), ",{}", policy_label(r.policy));
    out += '\n';
  }
  return out;
}

}  // namespace cachesim
