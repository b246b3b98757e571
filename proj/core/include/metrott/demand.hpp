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

#ifndef METROTT_DEMAND_HPP_
#define METROTT_DEMAND_HPP_

#include <utility>
#include <vector>

#include "metrott/types.hpp"

namespace metrott {

// Per-second passenger arrival rates p_{i,j} for every ordered pair i < j of
// one direction, over a horizon [t_start, t_end] in seconds-of-day. Station
// ids are global: 1..N upstream, N+1..2N downstream. Cross-direction pairs
// are always zero.
class OdMatrix {
 public:
  OdMatrix(int stations_per_direction, double horizon_start, double horizon_end);

  int stations_per_direction() const { return stations_per_direction_; }
  int station_count() const { return 2 * stations_per_direction_; }
  double horizon_start() const { return horizon_start_; }
  double horizon_end() const { return horizon_end_; }
  double horizon_length() const { return horizon_end_ - horizon_start_; }

  bool is_station(int station) const;
  Direction direction_of(int station) const;

  // Throws UnknownStation if either id is out of range. Pairs that are not
  // "origin before destination in the same direction" have rate zero.
  double rate(int origin, int destination) const;
  // Passengers over the whole horizon (rate * horizon length).
  double count(int origin, int destination) const;

  void set_rate(int origin, int destination, double rate);
  // Counts are converted to rates by dividing by the horizon length.
  void set_count(int origin, int destination, double count);

  // Pairs with a strictly positive rate, ordered by (origin, destination).
  std::vector<std::pair<int, int>> active_pairs(Direction direction) const;

 private:
  std::size_t cell(int origin, int destination) const;
  void check_pair(int origin, int destination) const;

  int stations_per_direction_;
  double horizon_start_;
  double horizon_end_;
  std::vector<double> rate_;
};

// Multiplies every rate by factor (> 0, NonPositiveFactor otherwise).
OdMatrix scale(const OdMatrix& od, double factor);

// Sum of rate_{i,j} * (t_end - t_start) over the pairs of one direction.
double directional_total(const OdMatrix& od, Direction direction);

}  // namespace metrott

#endif  // METROTT_DEMAND_HPP_
