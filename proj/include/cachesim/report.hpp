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

// Text, CSV and JSON renderings of simulation results.
//
// CSV layouts:
//   sweep tables      nsets,bsize,assoc,misses,miss_rate
//                     (a trailing ",policy" column is added when the table
//                     holds OPT rows)
//   other reports     key,value  where key is the JSON pointer of the field

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cachesim/hierarchy.hpp"
#include "cachesim/sweep.hpp"
#include "cachesim/timing.hpp"

namespace cachesim {

enum class ExportFormat { Text, Csv, Json };

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "text", "csv" or "json"; anything else throws FormatError.
ExportFormat parse_format(std::string_view name);

/// sim-cache statistics: one `<name> <value> # <description>` line per
/// counter. Extra memory-timing rows are appended when given.
std::string render_simcache(const SimReport& report,
                            std::span<const MemoryTimingRow> memory_rows = {});

/// VEX-style cycle summary.
std::string render_vex_summary(const CycleReport& c);

/// Tab-separated flat profile, one row per region, heaviest first.
std::string render_region_profile(const CycleReport& c);

nlohmann::json to_json(const SimReport& r);
nlohmann::json to_json(const CycleReport& c);
nlohmann::json to_json(const SweepTable& t);

SimReport sim_report_from_json(const nlohmann::json& j);
CycleReport cycle_report_from_json(const nlohmann::json& j);
SweepTable sweep_table_from_json(const nlohmann::json& j);

std::string export_report(const SimReport& r, ExportFormat format);
std::string export_report(const CycleReport& c, ExportFormat format);
/// Text and CSV are the same for sweep tables.
std::string export_report(const SweepTable& t, ExportFormat format);

}  // namespace cachesim
