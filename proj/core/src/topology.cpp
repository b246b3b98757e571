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

#include "metrott/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metrott/error.hpp"

namespace metrott {
namespace {

bool finite_positive(double value) { return std::isfinite(value) && value > 0.0; }

}  // namespace

void KinematicParams::validate() const {
  if (!finite_positive(v_max) || !finite_positive(v_acc) || !finite_positive(v_dec)) {
    raise(ErrorCode::kInvalidArgument, "v_max, v_acc and v_dec must be positive");
  }
}

void DwellPolicy::validate() const {
  if (group_dwell.size() != thresholds.size() + 1) {
    raise(ErrorCode::kInvalidArgument,
          "dwell policy needs one more group than thresholds");
  }
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i - 1] < thresholds[i])) {
      raise(ErrorCode::kInvalidArgument, "dwell thresholds must be strictly ascending");
    }
  }
  for (double dwell : group_dwell) {
    if (!finite_positive(dwell)) {
      raise(ErrorCode::kInvalidArgument, "group dwell times must be positive");
    }
  }
}

int DwellPolicy::group_of(double crowdedness) const {
  const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), crowdedness);
  return static_cast<int>(it - thresholds.begin());
}

LineTopology::LineTopology(Params params) : params_(std::move(params)) {
  n_ = params_.stations_per_direction;
  accel_penalty_ = params_.accel_penalty;
  decel_penalty_ = params_.decel_penalty;
  const int a = params_.short_turn_start;
  const int b = params_.short_turn_end;
  if (n_ < 4) {
    raise(ErrorCode::kConfigMismatch,
          "four turnaround stations per direction need at least four stations");
  }
  if (!(1 < a && a < b && b < n_)) {
    raise(ErrorCode::kConfigMismatch,
          "intermediate turnaround stations must satisfy 1 < a < b < N (got " +
              std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  const auto count = static_cast<std::size_t>(2 * n_);
  if (params_.pure_run_time.size() != count || params_.dwell_time.size() != count ||
      params_.min_turnaround.size() != count) {
    raise(ErrorCode::kMissingParameter,
          "running, dwell and turnaround vectors need one entry per station");
  }
  if (!params_.dwell_group.empty() && params_.dwell_group.size() != count) {
    raise(ErrorCode::kMissingParameter, "dwell_group needs one entry per station");
  }
  if (!(accel_penalty_ >= 0.0) || !(decel_penalty_ >= 0.0) ||
      !std::isfinite(accel_penalty_) || !std::isfinite(decel_penalty_)) {
    raise(ErrorCode::kInvalidArgument, "acceleration/deceleration penalties must be >= 0");
  }

  stations_.resize(count);
  for (int s = 1; s <= 2 * n_; ++s) {
    Station& st = stations_[static_cast<std::size_t>(s - 1)];
    st.index = s;
    const int up = s <= n_ ? s : 2 * n_ + 1 - s;
    st.is_turnaround = up == 1 || up == a || up == b || up == n_;
    st.dwell_group =
        params_.dwell_group.empty() ? 0 : params_.dwell_group[static_cast<std::size_t>(s - 1)];
  }
  for (Direction dir : kDirections) {
    for (int s = first_station(dir); s <= last_station(dir); ++s) {
      const auto idx = static_cast<std::size_t>(s - 1);
      if (s != first_station(dir) && !finite_positive(params_.pure_run_time[idx])) {
        raise(ErrorCode::kInvalidArgument,
              "pure running time into station " + std::to_string(s) + " must be > 0");
      }
      if (!(params_.dwell_time[idx] >= 0.0) || !std::isfinite(params_.dwell_time[idx])) {
        raise(ErrorCode::kInvalidArgument,
              "dwell time at station " + std::to_string(s) + " must be >= 0");
      }
      if (stations_[idx].is_turnaround && !finite_positive(params_.min_turnaround[idx])) {
        raise(ErrorCode::kInvalidArgument,
              "minimum turnaround at station " + std::to_string(s) + " must be > 0");
      }
    }
  }
}

const Station& LineTopology::station(int index) const {
  check_station(index);
  return stations_[static_cast<std::size_t>(index - 1)];
}

void LineTopology::check_station(int station) const {
  if (!is_station(station)) {
    raise(ErrorCode::kUnknownStation, "station " + std::to_string(station));
  }
}

Direction LineTopology::direction_of(int station) const {
  check_station(station);
  return station <= n_ ? Direction::kUp : Direction::kDown;
}

int LineTopology::first_station(Direction direction) const {
  return direction == Direction::kUp ? 1 : n_ + 1;
}

int LineTopology::last_station(Direction direction) const {
  return direction == Direction::kUp ? n_ : 2 * n_;
}

std::vector<int> LineTopology::stations_of(Direction direction) const {
  std::vector<int> out;
  for (int s = first_station(direction); s <= last_station(direction); ++s) out.push_back(s);
  return out;
}

std::array<int, 4> LineTopology::turnaround_stations(Direction direction) const {
  return {first_station(direction), short_turn_start(direction),
          short_turn_end(direction), last_station(direction)};
}

int LineTopology::short_turn_start(Direction direction) const {
  return direction == Direction::kUp ? params_.short_turn_start
                                     : paired_station(params_.short_turn_end);
}

int LineTopology::short_turn_end(Direction direction) const {
  return direction == Direction::kUp ? params_.short_turn_end
                                     : paired_station(params_.short_turn_start);
}

double LineTopology::pure_run_time(int station) const {
  check_station(station);
  if (station == first_station(direction_of(station))) {
    raise(ErrorCode::kInvalidArgument,
          "no running segment ends at the first station " + std::to_string(station));
  }
  return params_.pure_run_time[static_cast<std::size_t>(station - 1)];
}

double LineTopology::running_time(int station) const {
  return pure_run_time(station) + accel_penalty_ + decel_penalty_;
}

double LineTopology::dwell_time(int station) const {
  check_station(station);
  return params_.dwell_time[static_cast<std::size_t>(station - 1)];
}

double LineTopology::min_turnaround(int station) const {
  check_station(station);
  return params_.min_turnaround[static_cast<std::size_t>(station - 1)];
}

std::array<Depot, 4> LineTopology::depots() const {
  return {Depot{1, 1}, Depot{2, n_}, Depot{3, params_.short_turn_start},
          Depot{4, params_.short_turn_end}};
}

double LineTopology::traversal_time(Direction direction) const {
  double total = 0.0;
  for (int s = first_station(direction); s <= last_station(direction); ++s) {
    if (s != first_station(direction)) total += running_time(s);
    if (s != first_station(direction) && s != last_station(direction)) total += dwell_time(s);
  }
  return total;
}

RunningTimeParts decompose_running_time(double distance, const KinematicParams& k) {
  k.validate();
  const double accel_distance = k.v_max * k.v_max / (2.0 * k.v_acc);
  const double decel_distance = k.v_max * k.v_max / (2.0 * k.v_dec);
  if (!std::isfinite(distance) || distance < accel_distance + decel_distance) {
    raise(ErrorCode::kDistanceTooShort,
          "segment of " + std::to_string(distance) + " m is shorter than the " +
              std::to_string(accel_distance + decel_distance) +
              " m needed to reach v_max and stop");
  }
  return RunningTimeParts{distance / k.v_max, k.v_max / (2.0 * k.v_acc),
                          k.v_max / (2.0 * k.v_dec)};
}

double compute_running_time(double distance, const KinematicParams& k) {
  k.validate();
  const double accel_distance = k.v_max * k.v_max / (2.0 * k.v_acc);
  const double decel_distance = k.v_max * k.v_max / (2.0 * k.v_dec);
  if (!std::isfinite(distance) || distance < accel_distance + decel_distance) {
    raise(ErrorCode::kDistanceTooShort,
          "segment of " + std::to_string(distance) + " m is shorter than the " +
              std::to_string(accel_distance + decel_distance) +
              " m needed to reach v_max and stop");
  }
  const double time_acc = k.v_max / k.v_acc;
  const double time_dec = k.v_max / k.v_dec;
  const double time_pure = (distance - accel_distance - decel_distance) / k.v_max;
  return time_acc + time_dec + time_pure;
}

double compute_crowdedness(const OdMatrix& od, int station) {
  if (!od.is_station(station)) {
    raise(ErrorCode::kUnknownStation, "station " + std::to_string(station));
  }
  double total = 0.0;
  for (int other = 1; other <= od.station_count(); ++other) {
    total += od.count(other, station) + od.count(station, other);
  }
  return total;
}

std::vector<double> assign_dwell_times(const OdMatrix& od, const DwellPolicy& policy) {
  policy.validate();
  std::vector<double> dwell(static_cast<std::size_t>(od.station_count()));
  for (int s = 1; s <= od.station_count(); ++s) {
    const int group = policy.group_of(compute_crowdedness(od, s));
    dwell[static_cast<std::size_t>(s - 1)] =
        policy.group_dwell[static_cast<std::size_t>(group)];
  }
  return dwell;
}

int required_services(double total_demand, double capacity, double load_factor) {
  if (!finite_positive(capacity)) {
    raise(ErrorCode::kNonPositiveCapacity, "train capacity must be positive");
  }
  if (!(load_factor > 0.0 && load_factor <= 1.0)) {
    raise(ErrorCode::kInvalidArgument, "load factor must lie in (0, 1]");
  }
  if (!(total_demand >= 0.0) || !std::isfinite(total_demand)) {
    raise(ErrorCode::kInvalidArgument, "demand must be finite and non-negative");
  }
  const double quotient = total_demand / (capacity * load_factor);
  // Absorb representation error so exact multiples do not round up.
  return static_cast<int>(std::ceil(quotient - 1e-9 * std::max(1.0, quotient)));
}

std::pair<int, int> site_intermediate_depots(const OdMatrix& od, int min_span,
                                             Direction direction) {
  if (min_span < 4) {
    raise(ErrorCode::kInvalidArgument, "sub-segments contain at least four stations");
  }
  const int n = od.stations_per_direction();
  if (n < min_span) {
    raise(ErrorCode::kLineTooShort, "direction has " + std::to_string(n) +
                                        " stations, fewer than min_span " +
                                        std::to_string(min_span));
  }
  const int offset = direction == Direction::kUp ? 0 : n;
  // inner[m][e]: flow of pairs (i, j) with m <= i < j <= e, built by extending
  // each window one station to the right.
  std::vector<std::vector<double>> inner(static_cast<std::size_t>(n + 2),
                                         std::vector<double>(static_cast<std::size_t>(n + 2), 0.0));
  for (int m = 1; m <= n; ++m) {
    double running = 0.0;
    for (int e = m + 1; e <= n; ++e) {
      for (int i = m; i < e; ++i) running += od.count(offset + i, offset + e);
      inner[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)] = running;
    }
  }
  int best_m = 1;
  int best_n = n;
  double best_flow = inner[1][static_cast<std::size_t>(n)];
  for (int m = 1; m <= n; ++m) {
    for (int e = m + min_span - 1; e <= n; ++e) {
      const double flow = inner[static_cast<std::size_t>(m)][static_cast<std::size_t>(e)];
      const double tol = 1e-12 * std::max({1.0, std::abs(flow), std::abs(best_flow)});
      const int width = e - m;
      const int best_width = best_n - best_m;
      bool better = false;
      if (flow > best_flow + tol) {
        better = true;
      } else if (flow >= best_flow - tol) {
        better = width < best_width || (width == best_width && m < best_m);
      }
      if (better) {
        best_flow = flow;
        best_m = m;
        best_n = e;
      }
    }
  }
  if (best_flow <= 0.0) return {offset + 1, offset + n};
  return {offset + best_m, offset + best_n};
}

}  // namespace metrott
