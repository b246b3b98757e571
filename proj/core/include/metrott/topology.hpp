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

#ifndef METROTT_TOPOLOGY_HPP_
#define METROTT_TOPOLOGY_HPP_

#include <array>
#include <utility>
#include <vector>

#include "metrott/demand.hpp"
#include "metrott/types.hpp"

namespace metrott {

struct Station {
  int index = 0;  // 1-based global id
  bool is_turnaround = false;
  int dwell_group = 0;
};

struct KinematicParams {
  double v_max = 0.0;  // m/s
  double v_acc = 0.0;  // m/s^2
  double v_dec = 0.0;  // m/s^2

  void validate() const;
};

// Running time split the way the timetable constraints use it: the pure
// cruising time distance / v_max plus the extra time lost to accelerating
// (v_max / 2a) and braking (v_max / 2d). The sum equals
// compute_running_time() for the same segment.
struct RunningTimeParts {
  double pure = 0.0;
  double accel_penalty = 0.0;
  double decel_penalty = 0.0;

  double total() const { return pure + accel_penalty + decel_penalty; }
};

// Stations are grouped by crowdedness; thresholds are ascending break points
// and group_dwell holds one dwell (seconds) per group.
struct DwellPolicy {
  std::vector<double> thresholds;
  std::vector<double> group_dwell;

  void validate() const;
  // Index of the first threshold exceeding the crowdedness. A crowdedness
  // equal to a threshold joins the higher group.
  int group_of(double crowdedness) const;
};

struct Depot {
  int id = 0;            // 1..4
  int host_station = 0;  // upstream station hosting the depot
};

// A bidirectional line of 2N stations. Each direction has exactly four
// turnaround stations: its two terminals and two intermediate stations. The
// downstream layout mirrors the upstream one (station s and 2N+1-s are the
// same platform pair), so a train finishing an upstream service at m can start
// a downstream service at 2N+1-m.
class LineTopology {
 public:
  struct Params {
    int stations_per_direction = 0;
    // Upstream intermediate turnaround stations a < b with 1 < a < b < N.
    int short_turn_start = 0;
    int short_turn_end = 0;
    // pure_run_time[j-1] is Rt_j, the pure running time from j-1 to j. Entries
    // for the first station of each direction are ignored.
    std::vector<double> pure_run_time;
    double accel_penalty = 0.0;
    double decel_penalty = 0.0;
    std::vector<double> dwell_time;      // e_i, one per station
    std::vector<double> min_turnaround;  // delta_min_m, one per station
    std::vector<int> dwell_group;        // optional, one per station
  };

  explicit LineTopology(Params params);

  int stations_per_direction() const { return n_; }
  int station_count() const { return 2 * n_; }
  const std::vector<Station>& stations() const { return stations_; }
  const Station& station(int index) const;

  bool is_station(int index) const { return index >= 1 && index <= 2 * n_; }
  Direction direction_of(int station) const;
  int first_station(Direction direction) const;
  int last_station(Direction direction) const;
  std::vector<int> stations_of(Direction direction) const;

  // Ascending; includes both terminals of the direction.
  std::array<int, 4> turnaround_stations(Direction direction) const;
  int short_turn_start(Direction direction) const;
  int short_turn_end(Direction direction) const;
  int paired_station(int station) const { return 2 * n_ + 1 - station; }

  double pure_run_time(int station) const;
  double accel_penalty() const { return accel_penalty_; }
  double decel_penalty() const { return decel_penalty_; }
  // r_{j-1,j} = Rt_j + R_a + R_d
  double running_time(int station) const;
  double dwell_time(int station) const;
  double min_turnaround(int station) const;

  // Depot 1 at station 1 (= 2N), depot 2 at N (= N+1), depot 3 at the
  // upstream short-turn start, depot 4 at the upstream short-turn end.
  std::array<Depot, 4> depots() const;

  // Time from the first departure to the last arrival of a service that
  // stops everywhere in the direction.
  double traversal_time(Direction direction) const;

  const Params& params() const { return params_; }

 private:
  void check_station(int station) const;

  Params params_;
  int n_ = 0;
  double accel_penalty_ = 0.0;
  double decel_penalty_ = 0.0;
  std::vector<Station> stations_;
};

double compute_running_time(double distance, const KinematicParams& kinematics);
RunningTimeParts decompose_running_time(double distance,
                                        const KinematicParams& kinematics);

// Passengers arriving at s plus passengers leaving s over the horizon.
double compute_crowdedness(const OdMatrix& od, int station);

// Dwell seconds for every station 1..2N (index 0 is station 1).
std::vector<double> assign_dwell_times(const OdMatrix& od, const DwellPolicy& policy);

// Upper bound on services for an interval: ceil(demand / (capacity * load)).
int required_services(double total_demand, double capacity, double load_factor);

// Contiguous window [m, n] of one direction (global ids) with at least
// min_span stations maximizing the internal OD flow sum_{m<=i<j<=n} p_{i,j}.
// Ties prefer the narrowest window, then the leftmost one; without any
// internal flow the whole direction is returned.
std::pair<int, int> site_intermediate_depots(const OdMatrix& od, int min_span,
                                             Direction direction = Direction::kUp);

}  // namespace metrott

#endif  // METROTT_TOPOLOGY_HPP_
