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

#include "metrott/types.hpp"

#include <charconv>

namespace metrott {

std::string_view to_string(Direction direction) {
  return direction == Direction::kUp ? "up" : "down";
}

Direction opposite(Direction direction) {
  return direction == Direction::kUp ? Direction::kDown : Direction::kUp;
}

std::string ServiceId::name() const {
  return (direction == Direction::kUp ? "u" : "d") + std::to_string(index);
}

std::optional<ServiceId> ServiceId::parse(std::string_view text) {
  if (text.size() < 2 || (text[0] != 'u' && text[0] != 'd')) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
    return std::nullopt;
  }
  return ServiceId{text[0] == 'u' ? Direction::kUp : Direction::kDown, value};
}

}  // namespace metrott
