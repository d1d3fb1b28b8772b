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

// Fixed-point rendering of integer ratios. Rounding is half-up and exact:
// the quotient is formed in integer arithmetic, never through a double.

#pragma once

#include <cstdint>
#include <string>

namespace cachesim {

/// num / den * scale rendered with `decimals` digits; 0 when den == 0.
/// Example: format_ratio(435, 7064, 1, 4) == "0.0616".
std::string format_ratio(std::uint64_t num, std::uint64_t den, std::uint64_t scale,
                         unsigned decimals);

/// 100 * num / den with two decimals, e.g. "90.40".
inline std::string format_percent(std::uint64_t num, std::uint64_t den) {
  return format_ratio(num, den, 100, 2);
}

}  // namespace cachesim
