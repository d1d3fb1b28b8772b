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

#include "cachesim/trace.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace cachesim {

TraceError::TraceError(TraceErrorKind kind, std::uint64_t line, const std::string& reason)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, reason) : reason),
      kind_(kind),
      line_(line) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::size_t tokenize(std::string_view line, std::array<std::string_view, 4>& out) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    if (pos > start) {
      if (n == out.size()) return n + 1;  // too many; caller rejects
      out[n++] = line.substr(start, pos - start);
    }
  }
  return n;
}

std::uint64_t parse_hex(std::string_view s, std::uint64_t line_no) {
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, 16);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw TraceError(TraceErrorKind::BadHex, line_no, fmt::format("bad hex address '{}'", s));
  return value;
}

std::uint32_t parse_count(std::string_view s, std::uint64_t line_no, std::string_view what) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, 10);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || value == 0 ||
      value > kMaxRecordField)
    throw TraceError(TraceErrorKind::BadSize, line_no,
                     fmt::format("bad {} '{}' (expected 1..{})", what, s, kMaxRecordField));
  return value;
}

[[noreturn]] void syntax(std::uint64_t line_no, std::string_view reason) {
  throw TraceError(TraceErrorKind::Syntax, line_no, std::string(reason));
}

}  // namespace

std::optional<TraceRecord> parse_trace_line(std::string_view line, std::uint64_t line_no) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::array<std::string_view, 4> tok;
  const std::size_t n = tokenize(line, tok);
  if (n == 0) return std::nullopt;
  if (tok[0].size() != 1) syntax(line_no, fmt::format("unknown record kind '{}'", tok[0]));

  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (n < lo || n > hi)
      syntax(line_no, fmt::format("'{}' record takes {} operand(s), got {}", tok[0],
                                  lo == hi ? fmt::format("{}", lo - 1)
                                           : fmt::format("{}-{}", lo - 1, hi - 1),
                                  n - 1));
  };

  switch (tok[0][0]) {
    case 'I': {
      expect(2, 3);
      Inst r{parse_hex(tok[1], line_no), 1};
      if (n == 3) r.ops = parse_count(tok[2], line_no, "op count");
      return r;
    }
    case 'L':
      expect(3, 3);
      return Load{parse_hex(tok[1], line_no), parse_count(tok[2], line_no, "size")};
    case 'S':
      expect(3, 3);
      return Store{parse_hex(tok[1], line_no), parse_count(tok[2], line_no, "size")};
    case 'B':
      expect(2, 2);
      if (tok[1] == "T") return Branch{true};
      if (tok[1] == "N") return Branch{false};
      syntax(line_no, fmt::format("branch outcome must be T or N, got '{}'", tok[1]));
    case 'Y':
      expect(1, 1);
      return Syscall{};
    case 'R':
      expect(2, 2);
      return Region{std::string(tok[1])};
    default:
      syntax(line_no, fmt::format("unknown record kind '{}'", tok[0]));
  }
}

std::vector<TraceRecord> parse_trace(std::istream& in) {
  TraceReader reader(in, TraceReader::Format::Text);
  std::vector<TraceRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<TraceRecord> parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

namespace {
struct Formatter {
  std::string operator()(const Inst& r) const {
    return r.ops == 1 ? fmt::format("I {:x}", r.addr) : fmt::format("I {:x} {}", r.addr, r.ops);
  }
  std::string operator()(const Load& r) const { return fmt::format("L {:x} {}", r.addr, r.size); }
  std::string operator()(const Store& r) const { return fmt::format("S {:x} {}", r.addr, r.size); }
  std::string operator()(const Branch& r) const { return r.taken ? "B T" : "B N"; }
  std::string operator()(const Syscall&) const { return "Y"; }
  std::string operator()(const Region& r) const {
    if (r.name.empty() || r.name.find_first_of(" \t\r\n\v\f#") != std::string::npos)
      throw std::invalid_argument("region name must be a single token without '#': '" +
                                  r.name + "'");
    return "R " + r.name;
  }
};
}  // namespace

std::string format_record(const TraceRecord& r) { return std::visit(Formatter{}, r); }

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

std::string write_trace(const std::vector<TraceRecord>& records) {
  std::ostringstream out;
  write_trace(out, records);
  return out.str();
}

namespace {

constexpr std::size_t kPackedSize = 11;

void put_packed(std::ostream& out, char kind, std::uint64_t addr, std::uint16_t field) {
  std::array<char, kPackedSize> buf{};
  buf[0] = kind;
  for (int i = 0; i < 8; ++i) buf[1 + i] = static_cast<char>((addr >> (8 * i)) & 0xff);
  buf[9] = static_cast<char>(field & 0xff);
  buf[10] = static_cast<char>(field >> 8);
  out.write(buf.data(), buf.size());
}

std::uint16_t checked_field(std::uint64_t v) {
  if (v > kMaxRecordField) throw std::invalid_argument("record field exceeds 16 bits");
  return static_cast<std::uint16_t>(v);
}

}  // namespace

void write_binary_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const auto& rec : records) {
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Inst>) {
            put_packed(out, 'I', r.addr, checked_field(r.ops));
          } else if constexpr (std::is_same_v<T, Load>) {
            put_packed(out, 'L', r.addr, checked_field(r.size));
          } else if constexpr (std::is_same_v<T, Store>) {
            put_packed(out, 'S', r.addr, checked_field(r.size));
          } else if constexpr (std::is_same_v<T, Branch>) {
            put_packed(out, 'B', r.taken ? 1 : 0, 0);
          } else if constexpr (std::is_same_v<T, Syscall>) {
            put_packed(out, 'Y', 0, 0);
          } else {
            put_packed(out, 'R', 0, checked_field(r.name.size()));
            out.write(r.name.data(), static_cast<std::streamsize>(r.name.size()));
          }
        },
        rec);
  }
}

std::vector<TraceRecord> read_binary_trace(std::istream& in) {
  TraceReader reader(in, TraceReader::Format::Binary);
  std::vector<TraceRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

TraceReader::TraceReader(std::istream& in, Format format) : in_(&in), format_(format) {}

bool is_binary_trace_path(std::string_view path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".ctb";
}

TraceReader TraceReader::open(const std::string& path) {
  const bool binary = is_binary_trace_path(path);
  auto file = std::make_unique<std::ifstream>(path, binary ? std::ios::binary : std::ios::in);
  if (!*file) throw TraceError(TraceErrorKind::Io, 0, "cannot open trace '" + path + "'");
  TraceReader reader(*file, binary ? Format::Binary : Format::Text);
  reader.owned_ = std::move(file);
  return reader;
}

std::optional<TraceRecord> TraceReader::next() {
  if (format_ == Format::Text) {
    std::string line;
    while (std::getline(*in_, line)) {
      ++position_;
      if (auto r = parse_trace_line(line, position_)) return r;
    }
    if (in_->bad()) throw TraceError(TraceErrorKind::Io, position_, "read error");
    return std::nullopt;
  }

  std::array<unsigned char, kPackedSize> buf{};
  in_->read(reinterpret_cast<char*>(buf.data()), buf.size());
  const auto got = static_cast<std::size_t>(in_->gcount());
  if (got == 0) return std::nullopt;
  ++position_;
  if (got != kPackedSize)
    throw TraceError(TraceErrorKind::Syntax, position_, "truncated packed record");

  std::uint64_t addr = 0;
  for (int i = 7; i >= 0; --i) addr = (addr << 8) | buf[1 + i];
  const std::uint32_t field = buf[9] | (static_cast<std::uint32_t>(buf[10]) << 8);

  auto need_field = [&] {
    if (field == 0) throw TraceError(TraceErrorKind::BadSize, position_, "zero size field");
  };
  switch (buf[0]) {
    case 'I': need_field(); return Inst{addr, field};
    case 'L': need_field(); return Load{addr, field};
    case 'S': need_field(); return Store{addr, field};
    case 'B':
      if (addr > 1) throw TraceError(TraceErrorKind::Syntax, position_, "bad branch outcome");
      return Branch{addr == 1};
    case 'Y': return Syscall{};
    case 'R': {
      need_field();
      std::string name(field, '\0');
      in_->read(name.data(), field);
      if (static_cast<std::size_t>(in_->gcount()) != field)
        throw TraceError(TraceErrorKind::Syntax, position_, "truncated region name");
      return Region{std::move(name)};
    }
    default:
      throw TraceError(TraceErrorKind::Syntax, position_,
                       fmt::format("unknown packed record kind 0x{:02x}", buf[0]));
  }
}

std::vector<TraceRecord> load_trace(const std::string& path) {
  auto reader = TraceReader::open(path);
  std::vector<TraceRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

void save_trace(const std::string& path, const std::vector<TraceRecord>& records) {
  const bool binary = is_binary_trace_path(path);
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw TraceError(TraceErrorKind::Io, 0, "cannot write trace '" + path + "'");
  if (binary)
    write_binary_trace(out, records);
  else
    write_trace(out, records);
  if (!out) throw TraceError(TraceErrorKind::Io, 0, "write failed for '" + path + "'");
}

std::vector<TraceRecord> gen_sequential(std::uint64_t start, std::uint64_t count,
                                        std::uint64_t stride) {
  std::vector<TraceRecord> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.emplace_back(Load{start + i * stride, 4});
  return out;
}

std::vector<TraceRecord> gen_loop(std::uint64_t base, std::uint64_t working_set_bytes,
                                  std::uint64_t iterations, std::uint64_t stride) {
  std::vector<TraceRecord> out;
  for (std::uint64_t it = 0; it < iterations; ++it) {
    for (std::uint64_t off = 0; off < working_set_bytes; off += stride)
      out.emplace_back(Load{base + off, 4});
  }
  return out;
}

std::vector<TraceRecord> gen_random(std::uint64_t seed, std::uint64_t base,
                                    std::uint64_t range_bytes, std::uint64_t count) {
  // Raw engine output keeps streams identical across standard libraries;
  // distribution objects are implementation-defined.
  std::mt19937_64 rng(seed);
  std::vector<TraceRecord> out;
  out.reserve(count);
  const std::uint64_t range = range_bytes == 0 ? 1 : range_bytes;
  for (std::uint64_t i = 0; i < count; ++i)
    out.emplace_back(Load{base + ((rng() % range) & ~std::uint64_t{3}), 4});
  return out;
}

std::vector<TraceRecord> gen_mixed(std::uint64_t seed, std::uint64_t count) {
  static constexpr std::array<std::string_view, 8> kFunctions = {
      "main", "parse", "hash_insert", "hash_lookup", "memcpy", "printf", "malloc", "qsort"};
  constexpr std::uint64_t kCodeBase = 0x400000;
  constexpr std::uint64_t kFunctionSpan = 0x800;
  constexpr std::uint64_t kHotData = 0x10000000;
  constexpr std::uint64_t kHotBytes = 8 * 1024;
  constexpr std::uint64_t kColdData = 0x20000000;
  constexpr std::uint64_t kColdBytes = 1024 * 1024;

  std::mt19937_64 rng(seed);
  auto chance = [&](std::uint64_t num, std::uint64_t den) { return rng() % den < num; };

  std::vector<TraceRecord> out;
  out.reserve(count * 2);
  std::size_t fn = 0;
  std::uint64_t pc = kCodeBase;
  out.emplace_back(Region{std::string(kFunctions[fn])});

  for (std::uint64_t i = 0; i < count; ++i) {
    out.emplace_back(Inst{pc, static_cast<std::uint32_t>(1 + rng() % 4)});
    pc += 4;

    if (chance(3, 10)) {
      const std::uint32_t size = 1u << (rng() % 4);
      std::uint64_t addr = chance(7, 10) ? kHotData + rng() % kHotBytes
                                         : kColdData + rng() % kColdBytes;
      addr &= ~std::uint64_t{size - 1};
      if (chance(3, 10))
        out.emplace_back(Store{addr, size});
      else
        out.emplace_back(Load{addr, size});
    }

    if (chance(1, 8)) {
      const bool taken = chance(6, 10);
      out.emplace_back(Branch{taken});
      if (taken) {
        if (chance(1, 4)) {
          fn = rng() % kFunctions.size();
          pc = kCodeBase + fn * kFunctionSpan;
          out.emplace_back(Region{std::string(kFunctions[fn])});
        } else {
          // Loop back-edge within the current function.
          const std::uint64_t entry = kCodeBase + fn * kFunctionSpan;
          pc = entry + (rng() % (kFunctionSpan / 4)) * 4;
        }
      }
    }
    if (pc >= kCodeBase + (fn + 1) * kFunctionSpan) pc = kCodeBase + fn * kFunctionSpan;

    if (chance(1, 5000)) out.emplace_back(Syscall{});
  }
  return out;
}

}  // namespace cachesim
