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

#ifndef METROTT_TESTS_ENUMERATION_HPP_
#define METROTT_TESTS_ENUMERATION_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "metrott/milp.hpp"
#include "metrott/model.hpp"
#include "metrott/solver.hpp"
#include "metrott/topology.hpp"

namespace metrott::testing {

// A train handed from service `from` to service `to` at station `station`.
struct Link {
  ServiceId from;
  ServiceId to;
  int station = 0;
};

// One assignment of the structural decisions: the zone of every potential
// service (index into operation_zones, -1 when unselected) and the train
// links between services.
struct Pattern {
  std::vector<ServiceId> services;
  std::vector<int> zone;
  std::vector<Link> links;
  int selected() const;
};

// Lists every zone assignment together with every set of links that gives
// each service at most one predecessor and one successor, where a link
// joins a service ending at m to an opposite service starting at the paired
// station. Patterns needing more depot pull-outs than the fleet are skipped.
std::vector<Pattern> enumerate_patterns(const ModelConfig& cfg, const LineTopology& topo);

// Copy of `instance` with the zone, stop, link and depot binaries fixed to
// the pattern. Unlinked services use the intermediate depots, which carry no
// gate rows, so the choice of depot never restricts the remaining problem.
MilpInstance fix_pattern(const MilpInstance& instance, const ModelConfig& cfg, const LineTopology& topo,
                         const Pattern& pattern);

// Solves the problem left after fixing a pattern. Returns the objective of
// `objective` when feasible.
std::optional<double> residual_optimum(const MilpInstance& instance, const ModelConfig& cfg,
                                       const LineTopology& topo, const Pattern& pattern,
                                       const Objective& objective, double time_limit = 60.0);

}  // namespace metrott::testing

#endif  // METROTT_TESTS_ENUMERATION_HPP_
