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

#ifndef METROTT_PARETO_HPP_
#define METROTT_PARETO_HPP_

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "metrott/demand.hpp"
#include "metrott/model.hpp"
#include "metrott/solver.hpp"
#include "metrott/topology.hpp"

namespace metrott {

// obj1 counts turnarounds (larger is better); obj2 is passenger time
// (smaller is better).
struct ParetoPoint {
  double obj1 = 0.0;
  double obj2 = 0.0;
  int services_up = 0;
  int services_down = 0;
  std::array<double, 4> trains{};  // rolling stock per depot
  double wall_time = 0.0;
  MilpSolution solution;
};

enum class SweepDirection {
  kQualityPrimary,  // minimize obj2 under obj1 >= level, raise the level
  kCostPrimary,     // maximize obj1 under obj2 <= bound, lower the bound
};

struct SweepOptions {
  double epsilon = 1.0;
  SweepDirection direction = SweepDirection::kQualityPrimary;
  SolverOptions solver;          // time_limit is the budget of the whole sweep
  int expected_points = 0;       // 0: fleet size + 1
  int max_iterations = 10000;

  void validate() const;
};

struct SweepResult {
  std::vector<ParetoPoint> visited;   // one per successful iteration
  std::vector<ParetoPoint> frontier;  // visited points after filtering
  bool complete = true;               // false when a limit cut the sweep short
  int iterations = 0;
};

// Epsilon-constraint sweep over a bi-objective configuration. Throws
// ModeMismatch for other objectives and EmptyFrontier when the unrestricted
// model has no solution.
SweepResult sweep(const ModelConfig& cfg, const LineTopology& topo, const OdMatrix& od,
                  const SweepOptions& options = {});

// Keeps the points no other point weakly dominates, ordered by obj1
// descending. Identical points are kept once.
std::vector<ParetoPoint> filter_nondominated(std::vector<ParetoPoint> points);

bool dominates(const ParetoPoint& a, const ParetoPoint& b);

void write_frontier_csv(std::ostream& out, const std::string& instance,
                        const std::vector<ParetoPoint>& points);

}  // namespace metrott

#endif  // METROTT_PARETO_HPP_
