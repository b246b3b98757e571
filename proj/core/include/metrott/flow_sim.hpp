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

#ifndef METROTT_FLOW_SIM_HPP_
#define METROTT_FLOW_SIM_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "metrott/demand.hpp"
#include "metrott/milp.hpp"
#include "metrott/model.hpp"
#include "metrott/timetable.hpp"
#include "metrott/topology.hpp"

namespace metrott {

// A group of passengers reaching the platform of `origin` at one instant.
struct Cohort {
  int origin = 0;
  int destination = 0;
  double time = 0.0;
  double amount = 0.0;
};

// Per (service, origin, destination) quantities.
struct StreamRecord {
  ServiceId service;
  int origin = 0;
  int destination = 0;
  double waiting = 0.0;   // w: passengers of the stream on the platform
  double eligible = 0.0;  // w^b: waiting passengers this service may carry
  double boarded = 0.0;   // n^b
  double leftover = 0.0;  // v
  // FIFO bookkeeping: latest platform arrival among those who boarded and
  // earliest platform arrival among those left behind (NaN when none).
  double last_boarded_arrival = 0.0;
  double first_left_arrival = 0.0;
};

// Per (service, station) quantities.
struct StationRecord {
  ServiceId service;
  int station = 0;
  double departure = 0.0;
  bool stops = false;
  double eligible = 0.0;  // w^b_i
  double boarded = 0.0;   // n^b_i
  double alighted = 0.0;  // n^a
  double onboard = 0.0;   // n, after departure
};

struct FlowTrace {
  double capacity = 0.0;
  std::vector<StreamRecord> streams;
  std::vector<StationRecord> stations;
  double waiting_time = 0.0;  // passenger-seconds of the boarded passengers
  double boarded = 0.0;
  double stranded = 0.0;  // passengers still waiting after the last service
};

// Replays a timetable with strict first-in first-out boarding. Rates of `od`
// arrive as a uniform fluid starting `initial_accumulation` seconds before
// the first service at each station; `lumps` add instantaneous cohorts.
FlowTrace simulate(const Timetable& timetable, const OdMatrix& od, double capacity,
                   double initial_accumulation, std::span<const Cohort> lumps = {});

double total_waiting_time(const FlowTrace& trace);

void write_trace_csv(std::ostream& out, const FlowTrace& trace);

struct FamilyGap {
  std::string family;
  double max_abs_diff = 0.0;
  std::string worst;  // variable attaining the maximum
  bool flagged = false;
};

struct DiscrepancyReport {
  std::vector<FamilyGap> families;  // w, wb, nb, na, n, v
  // Largest residual of the leftover-split rows evaluated on the simulated
  // flows, that is how far FIFO boarding is from the linear allocation.
  double allocation_gap = 0.0;
  std::string allocation_worst;
  double tolerance = 1e-6;

  bool agrees() const;
  const FamilyGap& family(const std::string& name) const;
};

// Compares simulated flows with the flow variables of an assignment. Throws
// TimetableMismatch when the departures or stops of the assignment differ
// from the simulated timetable.
DiscrepancyReport compare_with_milp(const FlowTrace& trace, const MilpInstance& instance,
                                    std::span<const double> values, double tolerance = 1e-6);

// Residual of the leftover-split identity on the simulated flows.
double allocation_gap(const FlowTrace& trace);

struct TimetableIssue {
  std::string what;
  double amount = 0.0;
};

// Independent check of the operating rules on a realized timetable: headway
// window between consecutive selected services, turnaround gaps, capacity,
// skip cap (peak), coverage and zone-end service.
std::vector<TimetableIssue> check_timetable(const Timetable& timetable, const LineTopology& topo,
                                            const ModelConfig& cfg, const FlowTrace* trace,
                                            double tolerance = 1e-6);

}  // namespace metrott

#endif  // METROTT_FLOW_SIM_HPP_
