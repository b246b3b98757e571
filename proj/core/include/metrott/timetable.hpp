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

#ifndef METROTT_TIMETABLE_HPP_
#define METROTT_TIMETABLE_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "metrott/milp.hpp"
#include "metrott/model.hpp"
#include "metrott/topology.hpp"
#include "metrott/types.hpp"

namespace metrott {

// Where the train of a service comes from, or goes to after it.
struct Handover {
  std::optional<int> depot;          // depot id when pulled out / pulled in
  std::optional<ServiceId> service;  // linked service in the other direction
  int station = 0;                   // turnaround station of the link (end side)
};

// Realized plan of one potential service. Times are kept for every station of
// the direction, including stations outside the zone, so that consecutive
// services differ by exactly their headway everywhere.
struct ServicePlan {
  ServiceId id;
  bool selected = false;
  Zone zone;
  std::vector<double> arrival;    // by position along the direction
  std::vector<double> departure;  // by position along the direction
  std::vector<bool> stops;        // by position along the direction
  int train = 0;                  // 1-based train number, 0 when unselected
  Handover source;
  Handover sink;
};

class Timetable {
 public:
  explicit Timetable(int stations_per_direction);

  int stations_per_direction() const { return n_; }
  int first_station(Direction direction) const { return direction == Direction::kUp ? 1 : n_ + 1; }
  int position(int station) const;

  // Adds a plan; the vectors must hold one entry per station of the direction.
  void add(ServicePlan plan);
  const std::vector<ServicePlan>& services() const { return services_; }
  std::vector<const ServicePlan*> services(Direction direction) const;
  const ServicePlan& service(ServiceId id) const;
  bool contains(ServiceId id) const;

  double arrival(ServiceId id, int station) const;
  double departure(ServiceId id, int station) const;
  bool stops(ServiceId id, int station) const;

 private:
  int n_;
  std::vector<ServicePlan> services_;
};

// Builds the timetable encoded in an assignment of an assembled instance.
Timetable extract_timetable(const MilpInstance& instance, std::span<const double> values,
                            const LineTopology& topo);

// Copy of the instance with zone, stop, linkage and depot binaries and all
// times fixed to the timetable; flow variables stay free.
MilpInstance fix_to_timetable(const MilpInstance& instance, const Timetable& timetable,
                              const LineTopology& topo);

// Latest arrival at a zone end over the selected services.
double finish_time(const Timetable& timetable);

// CSV with columns service,station,arrival,departure,stops. Services without
// any stop are read back as unselected; zones span the first to last stop.
void write_timetable_csv(std::ostream& out, const Timetable& timetable);
Timetable read_timetable_csv(std::istream& in, int stations_per_direction);

// Arrival/departure times of a service run with the given stop pattern and no
// slack: run Rt + R_a (if the previous station is served) + R_d (if this one
// is served), dwell e_i at served stations and zero elsewhere.
struct RunProfile {
  std::vector<double> arrival;
  std::vector<double> departure;
};
RunProfile tight_profile(const LineTopology& topo, Direction direction,
                         const std::vector<bool>& stops, double first_departure);

// Time saved on the zone by skipping relative to stopping everywhere in it.
double skip_saving(const LineTopology& topo, const Zone& zone, const std::vector<bool>& stops);

}  // namespace metrott

#endif  // METROTT_TIMETABLE_HPP_
