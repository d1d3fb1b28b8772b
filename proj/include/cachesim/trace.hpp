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

// Memory-reference traces.
//
// Text form (.ct), one record per line, '#' starts a comment:
//
//   I <hex> [<ops>]    instruction fetch, optional operation count (default 1)
//   L <hex> <size>     load of <size> bytes
//   S <hex> <size>     store of <size> bytes
//   B <T|N>            branch, taken or not taken
//   Y                  system call
//   R <name>           switch the attribution region
//
// Packed form (.ctb), fixed 11-byte records with no file header:
//
//   byte 0      kind ('I', 'L', 'S', 'B', 'Y', 'R')
//   bytes 1-8   address, little endian (B: 1 taken / 0 not taken; Y, R: 0)
//   bytes 9-10  little endian u16: ops (I), size (L/S), name length (R), 0 otherwise
//
// An 'R' record is followed by its name bytes.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cachesim {

struct Inst {
  std::uint64_t addr = 0;
  std::uint32_t ops = 1;
  bool operator==(const Inst&) const = default;
};

struct Load {
  std::uint64_t addr = 0;
  std::uint32_t size = 4;
  bool operator==(const Load&) const = default;
};

struct Store {
  std::uint64_t addr = 0;
  std::uint32_t size = 4;
  bool operator==(const Store&) const = default;
};

struct Branch {
  bool taken = false;
  bool operator==(const Branch&) const = default;
};

struct Syscall {
  bool operator==(const Syscall&) const = default;
};

struct Region {
  std::string name;
  bool operator==(const Region&) const = default;
};

using TraceRecord = std::variant<Inst, Load, Store, Branch, Syscall, Region>;

/// Largest size / op count representable in the packed form.
inline constexpr std::uint32_t kMaxRecordField = 0xffff;

enum class TraceErrorKind { Syntax, BadHex, BadSize, Io };

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrorKind kind, std::uint64_t line, const std::string& reason);

  TraceErrorKind kind() const noexcept { return kind_; }
  /// 1-based line number (text) or record index (packed); 0 when unknown.
  std::uint64_t line() const noexcept { return line_; }

 private:
  TraceErrorKind kind_;
  std::uint64_t line_;
};

/// Parses one text line. Returns nullopt for blank and comment-only lines.
std::optional<TraceRecord> parse_trace_line(std::string_view line, std::uint64_t line_no);

std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> parse_trace(std::string_view text);

std::string format_record(const TraceRecord& r);
std::string write_trace(const std::vector<TraceRecord>& records);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

void write_binary_trace(std::ostream& out, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_binary_trace(std::istream& in);

/// Streams records from either form, one at a time.
class TraceReader {
 public:
  enum class Format { Text, Binary };

  TraceReader(std::istream& in, Format format);

  /// Opens `path`; `.ctb` selects the packed form. Throws TraceError{Io}.
  static TraceReader open(const std::string& path);

  std::optional<TraceRecord> next();
  std::uint64_t position() const { return position_; }

 private:
  std::unique_ptr<std::istream> owned_;
  std::istream* in_;
  Format format_;
  std::uint64_t position_ = 0;
};

/// Reads a whole trace file, picking the form from the extension.
std::vector<TraceRecord> load_trace(const std::string& path);
void save_trace(const std::string& path, const std::vector<TraceRecord>& records);

bool is_binary_trace_path(std::string_view path);

// Synthetic stimulus. All generators emit 4-byte loads and are pure
// functions of their arguments.
std::vector<TraceRecord> gen_sequential(std::uint64_t start, std::uint64_t count,
                                        std::uint64_t stride);
std::vector<TraceRecord> gen_loop(std::uint64_t base, std::uint64_t working_set_bytes,
                                  std::uint64_t iterations, std::uint64_t stride);
/// Addresses are uniform in [base, base + range_bytes), rounded down to a
/// 4-byte boundary relative to base.
std::vector<TraceRecord> gen_random(std::uint64_t seed, std::uint64_t base,
                                    std::uint64_t range_bytes, std::uint64_t count);

/// A program-shaped mix: sequential fetch runs broken by taken branches,
/// loads and stores over a hot/cold data set, occasional syscalls, and
/// region markers. Produces exactly `count` Inst records.
std::vector<TraceRecord> gen_mixed(std::uint64_t seed, std::uint64_t count);

}  // namespace cachesim
