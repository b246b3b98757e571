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

#ifndef METROTT_SOLVER_HPP_
#define METROTT_SOLVER_HPP_

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metrott/milp.hpp"

namespace metrott {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimeLimit };
enum class BranchingRule { kMostFractional, kFirstIndex };

std::string to_string(SolveStatus status);
std::string to_string(BranchingRule rule);
std::optional<BranchingRule> parse_branching_rule(std::string_view text);
// Process exit code: 0 optimal, 2 infeasible, 3 stopped by a limit.
int exit_code(SolveStatus status);

struct SolverOptions {
  double time_limit = 14400.0;  // seconds
  double absolute_gap = 1e-6;
  BranchingRule branching = BranchingRule::kMostFractional;
  long node_limit = std::numeric_limits<long>::max();
  int threads = 1;
  // Nodes solved per round; fixed so results do not depend on threads.
  int batch_size = 4;
  double integrality_tolerance = 1e-6;
  double feasibility_tolerance = 1e-6;
  // Full assignment used as a MIP start; its binaries are fixed and the
  // continuous part re-optimized.
  std::optional<std::vector<double>> initial_solution;

  void validate() const;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;  // incumbent objective (instance sense)
  double bound = 0.0;      // best proven bound (instance sense)
  std::vector<double> values;  // empty when no incumbent was found
  double wall_time = 0.0;
  long nodes = 0;
  long lp_iterations = 0;

  bool has_solution() const { return !values.empty(); }
  double value(const MilpInstance& instance, std::string_view name) const;
};

MilpSolution solve(const MilpInstance& instance, const SolverOptions& options = {});

// Re-optimizes the continuous variables with every binary fixed to the
// rounded value in `values`. Returns nothing when that is infeasible or the
// result fails the row check.
std::optional<std::vector<double>> complete_assignment(const MilpInstance& instance,
                                                       const std::vector<double>& values,
                                                       double tolerance = 1e-6);

// Plain-text solution: a header comment, then "name value" per line.
void write_solution(std::ostream& out, const MilpInstance& instance, const MilpSolution& solution);
// Reads "name value" lines into an assignment ordered like the instance.
std::vector<double> read_solution(std::istream& in, const MilpInstance& instance);

}  // namespace metrott

#endif  // METROTT_SOLVER_HPP_
