// Copyright 2026 The metrott Authors
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

#ifndef METROTT_TYPES_HPP_
#define METROTT_TYPES_HPP_

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace metrott {

// Upstream runs from station 1 to N, downstream from N+1 to 2N.
enum class Direction { kUp, kDown };

inline constexpr std::array<Direction, 2> kDirections = {Direction::kUp,
                                                         Direction::kDown};

std::string_view to_string(Direction direction);
Direction opposite(Direction direction);

// A potential service of one direction; index is 1-based (k in K^up / K^dn).
// Printed as "u3" / "d2".
struct ServiceId {
  Direction direction = Direction::kUp;
  int index = 1;

  std::string name() const;
  static std::optional<ServiceId> parse(std::string_view text);

  auto operator<=>(const ServiceId&) const = default;
};

}  // namespace metrott

#endif  // METROTT_TYPES_HPP_
