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

#include "metrott/demand.hpp"

#include <cmath>
#include <string>

#include "metrott/error.hpp"

namespace metrott {

OdMatrix::OdMatrix(int stations_per_direction, double horizon_start,
                   double horizon_end)
    : stations_per_direction_(stations_per_direction),
      horizon_start_(horizon_start),
      horizon_end_(horizon_end) {
  if (stations_per_direction < 2) {
    raise(ErrorCode::kInvalidArgument, "a direction needs at least two stations");
  }
  if (!(horizon_start < horizon_end) || !std::isfinite(horizon_start) ||
      !std::isfinite(horizon_end)) {
    raise(ErrorCode::kInvalidArgument, "horizon must satisfy t_start < t_end");
  }
  const auto n = static_cast<std::size_t>(station_count());
  rate_.assign(n * n, 0.0);
}

bool OdMatrix::is_station(int station) const {
  return station >= 1 && station <= station_count();
}

Direction OdMatrix::direction_of(int station) const {
  if (!is_station(station)) {
    raise(ErrorCode::kUnknownStation, "station " + std::to_string(station));
  }
  return station <= stations_per_direction_ ? Direction::kUp : Direction::kDown;
}

std::size_t OdMatrix::cell(int origin, int destination) const {
  return static_cast<std::size_t>(origin - 1) *
             static_cast<std::size_t>(station_count()) +
         static_cast<std::size_t>(destination - 1);
}

void OdMatrix::check_pair(int origin, int destination) const {
  if (!is_station(origin)) {
    raise(ErrorCode::kUnknownStation, "station " + std::to_string(origin));
  }
  if (!is_station(destination)) {
    raise(ErrorCode::kUnknownStation, "station " + std::to_string(destination));
  }
}

double OdMatrix::rate(int origin, int destination) const {
  check_pair(origin, destination);
  return rate_[cell(origin, destination)];
}

double OdMatrix::count(int origin, int destination) const {
  return rate(origin, destination) * horizon_length();
}

void OdMatrix::set_rate(int origin, int destination, double rate) {
  check_pair(origin, destination);
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    raise(ErrorCode::kInvalidArgument, "rates must be finite and non-negative");
  }
  if (direction_of(origin) != direction_of(destination) || origin >= destination) {
    if (rate == 0.0) return;
    raise(ErrorCode::kInvalidArgument,
          "demand only flows forward within one direction (" +
              std::to_string(origin) + " -> " + std::to_string(destination) + ")");
  }
  rate_[cell(origin, destination)] = rate;
}

void OdMatrix::set_count(int origin, int destination, double count) {
  set_rate(origin, destination, count / horizon_length());
}

std::vector<std::pair<int, int>> OdMatrix::active_pairs(Direction direction) const {
  const int first = direction == Direction::kUp ? 1 : stations_per_direction_ + 1;
  const int last = first + stations_per_direction_ - 1;
  std::vector<std::pair<int, int>> pairs;
  for (int i = first; i <= last; ++i) {
    for (int j = i + 1; j <= last; ++j) {
      if (rate_[cell(i, j)] > 0.0) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

OdMatrix scale(const OdMatrix& od, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    raise(ErrorCode::kNonPositiveFactor, "scale factor must be positive");
  }
  OdMatrix scaled(od.stations_per_direction(), od.horizon_start(), od.horizon_end());
  for (Direction direction : kDirections) {
    for (auto [i, j] : od.active_pairs(direction)) {
      scaled.set_rate(i, j, od.rate(i, j) * factor);
    }
  }
  return scaled;
}

double directional_total(const OdMatrix& od, Direction direction) {
  double total_rate = 0.0;
  for (auto [i, j] : od.active_pairs(direction)) total_rate += od.rate(i, j);
  return total_rate * od.horizon_length();
}

}  // namespace metrott
