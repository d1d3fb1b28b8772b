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

#include "cachesim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cachesim/config.hpp"
#include "cachesim/report.hpp"
#include "cachesim/sweep.hpp"
#include "cachesim/timing.hpp"
#include "cachesim/trace.hpp"

namespace cachesim {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::string_view kTopUsage =
    "usage: cachesim <command> [options]\n"
    "\n"
    "commands:\n"
    "  sim     multi-level cache and TLB simulation (sim-cache statistics)\n"
    "  vexsim  split L1 simulation with a cycle model read from a vex.cfg file\n"
    "  sweep   miss counts for many geometries and associativities in one pass\n"
    "  gen     write a synthetic trace\n";

std::uint64_t parse_u64(std::string_view flag, std::string_view text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
    throw UsageError(fmt::format("{} expects an unsigned integer, got '{}'", flag, text));
  return v;
}

std::string binding_text(const CacheBinding& b) {
  if (const auto* spec = std::get_if<CacheSpec>(&b)) return spec->to_string();
  if (const auto* u = std::get_if<UnifiedWith>(&b)) return std::string(level_name(u->target));
  return "none";
}

// Writes to --out when given, otherwise to the command's standard output.
void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw TraceError(TraceErrorKind::Io, 0, "cannot write '" + path + "'");
  file << text;
}

// First call reads 0, later calls read `seconds`.
Clock fixed_elapsed(std::uint64_t seconds) {
  auto calls = std::make_shared<int>(0);
  return [calls, seconds] { return (*calls)++ == 0 ? 0.0 : static_cast<double>(seconds); };
}

// ---------------------------------------------------------------- sim

int cmd_sim(std::span<const std::string> args, std::ostream& out, const Clock& clock) {
  std::vector<std::string> hierarchy_args;
  TimingSpec timing;
  bool with_timing = false;
  std::uint64_t seed = 1;
  ExportFormat format = ExportFormat::Text;
  std::string out_path;
  std::optional<std::uint64_t> elapsed;
  std::optional<std::string> trace_path;

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto value = [&](std::size_t k = 1) -> const std::string& {
      if (i + k >= args.size()) throw UsageError(a + " expects a value");
      return args[i + k];
    };
    if (a == "-h" || a == "--help") {
      out << sim_help();
      return kExitOk;
    }
    if (is_hierarchy_flag(a)) {
      hierarchy_args.push_back(a);
      hierarchy_args.push_back(value());
      ++i;
    } else if (a == "-mem:lat") {
      timing.mem_lat_first = parse_u64(a, value(1));
      timing.mem_lat_next = parse_u64(a, value(2));
      with_timing = true;
      i += 2;
    } else if (a == "-mem:width") {
      timing.mem_width = parse_u64(a, value());
      with_timing = true;
      ++i;
    } else if (a == "-tlb:lat") {
      timing.tlb_lat = parse_u64(a, value());
      with_timing = true;
      ++i;
    } else if (a == "-seed") {
      seed = parse_u64(a, value());
      ++i;
    } else if (a == "--format") {
      format = parse_format(value());
      ++i;
    } else if (a == "--out") {
      out_path = value();
      ++i;
    } else if (a == "--elapsed-seconds") {
      elapsed = parse_u64(a, value());
      ++i;
    } else if (a.size() > 1 && a[0] == '-') {
      throw UsageError("unknown flag '" + a + "'");
    } else if (trace_path) {
      throw UsageError("more than one trace given");
    } else {
      trace_path = a;
    }
  }
  if (!trace_path) throw UsageError("sim needs a trace file");

  const HierarchySpec spec = parse_hierarchy_args(hierarchy_args);
  if (with_timing) timing.validate();
  Hierarchy h = Hierarchy::build(spec, seed);
  TraceReader reader = TraceReader::open(*trace_path);
  const SimReport report = h.run(reader, elapsed ? fixed_elapsed(*elapsed) : clock);

  std::vector<MemoryTimingRow> rows;
  if (with_timing) rows = memory_timing(report, h, timing);

  std::string text;
  if (format == ExportFormat::Text) {
    text = render_simcache(report, rows);
  } else if (format == ExportFormat::Json && with_timing) {
    nlohmann::json j = to_json(report);
    for (const auto& r : rows)
      j["memory_timing"].push_back(
          {{"name", r.name}, {"misses", r.misses}, {"latency", r.latency}, {"cycles", r.cycles}});
    text = j.dump(2) + "\n";
  } else {
    text = export_report(report, format);
  }
  emit(out, out_path, text);
  return kExitOk;
}

// ---------------------------------------------------------------- CLI11 commands

// Parses `args` into `app`; returns an exit code when parsing ends the run.
std::optional<int> parse_app(CLI::App& app, std::span<const std::string> args, std::ostream& out,
                             std::ostream& err) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  return std::nullopt;
}

int cmd_vexsim(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split L1 simulation with a VEX-style cycle summary", "cachesim vexsim"};
  std::string cfg_path, trace_path, format_name = "text", out_path;
  bool profile = false;
  app.add_option("cfg", cfg_path, "vex.cfg file")->required();
  app.add_option("trace", trace_path, "trace file (.ct text or .ctb packed)")->required();
  app.add_flag("--profile", profile, "append the per-region flat profile");
  app.add_option("--format", format_name, "text, csv or json");
  app.add_option("--out", out_path, "write the report here instead of standard output");
  if (auto rc = parse_app(app, args, out, err)) return *rc;
  const ExportFormat format = parse_format(format_name);

  std::ifstream cfg_file(cfg_path);
  if (!cfg_file)
    throw ConfigError(ConfigErrorKind::InvalidValue, cfg_path, "cannot open configuration file");
  std::stringstream body;
  body << cfg_file.rdbuf();
  const VexConfig cfg = parse_vex_cfg(body.str());

  Hierarchy h = Hierarchy::build(vex_hierarchy(cfg));
  h.set_event_log(true);
  TraceReader reader = TraceReader::open(trace_path);
  const SimReport report = h.run(reader, [] { return 0.0; });
  const CycleReport cycles = account(h.events(), cfg.timing, summarize(report));

  std::string text = export_report(cycles, format);
  if (profile && format == ExportFormat::Text) text += "\n" + render_region_profile(cycles);
  emit(out, out_path, text);
  return kExitOk;
}

int cmd_sweep(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-pass LRU sweep over cache geometries", "cachesim sweep"};
  std::vector<std::uint64_t> sets, bsizes, assocs;
  std::string trace_path, refs = "data", format_name = "text", out_path;
  bool opt = false;
  unsigned workers = 0;
  app.add_option("--sets", sets, "comma-separated set counts")->required()->delimiter(',');
  app.add_option("--bsize", bsizes, "comma-separated block sizes (bytes)")
      ->required()
      ->delimiter(',');
  app.add_option("--assoc", assocs, "comma-separated associativities")
      ->required()
      ->delimiter(',');
  app.add_flag("--opt", opt, "also report offline-optimal (Belady) misses");
  app.add_option("--refs", refs, "reference stream: data, inst or unified")
      ->check(CLI::IsMember({"data", "inst", "unified"}));
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  app.add_option("--format", format_name, "text (same as csv), csv or json");
  app.add_option("--out", out_path, "write the table here instead of standard output");
  app.add_option("trace", trace_path, "trace file (.ct text or .ctb packed)")->required();
  if (auto rc = parse_app(app, args, out, err)) return *rc;
  const ExportFormat format = parse_format(format_name);

  std::vector<Geometry> geometries;
  for (auto s : sets) {
    for (auto b : bsizes) {
      if (!is_power_of_two(s) || !is_power_of_two(b))
        throw ConfigError(ConfigErrorKind::NonPowerOfTwo, "sweep",
                          fmt::format("geometry {}x{} is not a power of two", s, b));
      geometries.push_back({s, b});
    }
  }
  for (auto a : assocs) {
    if (a == 0) throw ConfigError(ConfigErrorKind::InvalidValue, "sweep", "associativity 0");
  }

  SweepOptions options;
  options.stream = refs == "inst" ? RefStream::Instruction
                   : refs == "unified" ? RefStream::Unified
                                       : RefStream::Data;
  options.include_opt = opt;
  options.workers = workers;
  const auto trace = load_trace(trace_path);
  emit(out, out_path, export_report(sweep(trace, geometries, assocs, options), format));
  return kExitOk;
}

int cmd_gen(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Write a synthetic trace", "cachesim gen"};
  std::string kind, out_path;
  std::uint64_t seed = 1, count = 100000, base = 0x10000000, stride = 4;
  std::uint64_t working_set = 16384, iterations = 10, range = 1 << 20;
  app.add_option("kind", kind, "sequential, loop, random or mixed")
      ->required()
      ->check(CLI::IsMember({"sequential", "loop", "random", "mixed"}));
  app.add_option("--seed", seed, "generator seed (random, mixed)");
  app.add_option("--count", count, "references (sequential, random) or instructions (mixed)");
  app.add_option("--base", base, "first address");
  app.add_option("--stride", stride, "address step (sequential, loop)");
  app.add_option("--working-set", working_set, "bytes swept per iteration (loop)");
  app.add_option("--iterations", iterations, "passes over the working set (loop)");
  app.add_option("--range", range, "address range in bytes (random)");
  app.add_option("--out", out_path, "output file; .ctb selects the packed form");
  if (auto rc = parse_app(app, args, out, err)) return *rc;

  std::vector<TraceRecord> trace;
  if (kind == "sequential") {
    trace = gen_sequential(base, count, stride);
  } else if (kind == "loop") {
    if (stride == 0) throw UsageError("--stride must be positive");
    trace = gen_loop(base, working_set, iterations, stride);
  } else if (kind == "random") {
    trace = gen_random(seed, base, range, count);
  } else {
    trace = gen_mixed(seed, count);
  }
  if (out_path.empty())
    write_trace(out, trace);
  else
    save_trace(out_path, trace);
  return kExitOk;
}

}  // namespace

std::string sim_help() {
  const HierarchySpec d = default_hierarchy();
  const TimingSpec t;
  struct Row {
    std::string flag, value, desc;
  };
  const std::vector<Row> rows = {
      {"-h", "false", "print help message"},
      {"-seed", "1", "random number generator seed"},
      {"-cache:dl1", binding_text(d.dl1), "l1 data cache config, i.e., {<config>|none}"},
      {"-cache:dl2", binding_text(d.dl2), "l2 data cache config, i.e., {<config>|none}"},
      {"-cache:il1", binding_text(d.il1), "l1 inst cache config, i.e., {<config>|dl1|dl2|none}"},
      {"-cache:il2", binding_text(d.il2), "l2 instruction cache config, i.e., {<config>|dl2|none}"},
      {"-tlb:itlb", binding_text(d.itlb), "instruction TLB config, i.e., {<config>|none}"},
      {"-tlb:dtlb", binding_text(d.dtlb), "data TLB config, i.e., {<config>|none}"},
      {"-flush", d.flush_on_syscall ? "true" : "false", "flush caches on system calls"},
      {"-mem:lat", fmt::format("{} {}", t.mem_lat_first, t.mem_lat_next),
       "memory access latency (<first_chunk> <inter_chunk>)"},
      {"-mem:width", std::to_string(t.mem_width), "memory access bus width (in bytes)"},
      {"-tlb:lat", std::to_string(t.tlb_lat), "inst/data TLB miss latency (in cycles)"},
      {"--format", "text", "report format, i.e., {text|csv|json}"},
      {"--out", "<null>", "write the report to a file"},
      {"--elapsed-seconds", "<null>", "fix sim_elapsed_time instead of timing the run"},
  };
  std::string s =
      "usage: cachesim sim [flags] <trace>\n"
      "\n"
      "Cache configuration: <name>:<nsets>:<bsize>:<assoc>:<repl>, repl one of l|f|r.\n"
      "Any -mem:* or -tlb:lat flag adds memory-side cycle estimates to the report.\n"
      "\n";
  for (const auto& r : rows) s += fmt::format("# {:<15} {} # {}\n", r.flag, r.value, r.desc);
  return s;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err,
            const Clock& clock) {
  if (args.empty()) {
    err << kTopUsage;
    return kExitUsage;
  }
  const std::string& command = args.front();
  const auto rest = args.subspan(1);
  try {
    if (command == "sim") return cmd_sim(rest, out, clock);
    if (command == "vexsim") return cmd_vexsim(rest, out, err);
    if (command == "sweep") return cmd_sweep(rest, out, err);
    if (command == "gen") return cmd_gen(rest, out, err);
    if (command == "-h" || command == "--help" || command == "help") {
      out << kTopUsage;
      return kExitOk;
    }
    err << "error: unknown command '" << command << "'\n" << kTopUsage;
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    if (command == "sim") err << sim_help();
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << "\n";
    return kExitInput;
  } catch (const TimingError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace cachesim
