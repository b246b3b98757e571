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

#ifndef METROTT_FIXTURES_HPP_
#define METROTT_FIXTURES_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "metrott/instance.hpp"

namespace metrott {

enum class Period { kMorning, kMidday, kEvening };

std::string to_string(Period period);
// Accepts "M", "MD" and "E".
Period parse_period(std::string_view text);

// Parsed "R-S-T" instance index: trains, stations per direction, minutes.
struct InstanceIndex {
  int trains = 0;
  int stations = 0;
  int minutes = 0;
};
InstanceIndex parse_instance_index(std::string_view text);

inline constexpr std::uint64_t kDefaultDemandSeed = 2023;

// Gravity-style demand: rate proportional to noise / (1 + |i - j|) with
// seeded multiplicative noise in [0.75, 1.25], scaled so that each direction
// carries `total_up` / `total_down` passengers over the horizon.
OdMatrix gravity_demand(int stations_per_direction, double horizon_start, double horizon_end,
                        double total_up, double total_down, std::uint64_t seed);

// Santiago-like line with the given index, period and mode. Service counts
// follow the required-services rule with the mode's load factor.
Instance generate_line_instance(const InstanceIndex& index, Period period, OperatingMode mode,
                                std::uint64_t seed = kDefaultDemandSeed);

std::vector<std::string> fixture_names();
// Throws UnknownFixture for names outside fixture_names().
Instance generate_fixture(std::string_view name);

}  // namespace metrott

#endif  // METROTT_FIXTURES_HPP_
