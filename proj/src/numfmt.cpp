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

#include "cachesim/numfmt.hpp"

#include <fmt/format.h>

namespace cachesim {

std::string format_ratio(std::uint64_t num, std::uint64_t den, std::uint64_t scale,
                         unsigned decimals) {
  __extension__ using u128 = unsigned __int128;
  u128 unit = 1;
  for (unsigned i = 0; i < decimals; ++i) unit *= 10;

  u128 q = 0;
  if (den != 0) {
    const u128 n = static_cast<u128>(num) * scale * unit;
    q = (2 * n + den) / (2 * static_cast<u128>(den));
  }
  const u128 whole = q / unit;
  if (decimals == 0) return fmt::format("{}", whole);
  return fmt::format("{}.{:0{}}", whole, q % unit, decimals);
}

}  // namespace cachesim
