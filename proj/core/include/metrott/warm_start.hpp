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


#ifndef METROTT_WARM_START_HPP_
#define METROTT_WARM_START_HPP_

#include <optional>
#include <vector>

#include "metrott/milp.hpp"
#include "metrott/model.hpp"
#include "metrott/timetable.hpp"
#include "metrott/topology.hpp"

namespace metrott {

// Shape of a regular timetable in one direction: the first `count` potential
// services run at a constant headway, odd ones over the full line and even
// ones over `alternate` when given (full line otherwise). Later potential
// services stay unselected.
struct RegularPattern {
  int count = 1;
  std::optional<Zone> alternate;
  double headway = 0.0;
};

// Timetable of two regular patterns with every service stopping throughout
// its zone. Trains are linked greedily at handover stations whenever the
// minimum turnaround time allows; the remaining services use depots.
// Returns nothing when a departure limit is violated or the fleet is too
// small for the unlinked services.
std::optional<Timetable> regular_timetable(const ModelConfig& cfg, const LineTopology& topo,
                                           const RegularPattern& up, const RegularPattern& down);

struct WarmStartOptions {
  double time_limit = 60.0;  // seconds over all candidate completions
  int candidates = 4;
};

// Assignment for an assembled instance built from the best regular
// timetables: candidates are ranked by turnaround links and service count,
// their flows completed by a solve with the timetable fixed, and the best
// objective returned. Empty when no candidate completes.
std::optional<std::vector<double>> construct_start(const MilpInstance& instance,
                                                   const ModelConfig& cfg, const LineTopology& topo,
                                                   const WarmStartOptions& options = {});

}  // namespace metrott

#endif  // METROTT_WARM_START_HPP_
