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

#ifndef METROTT_LP_HPP_
#define METROTT_LP_HPP_

#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metrott/milp.hpp"

namespace metrott {

enum class LpStatus { kOptimal, kInfeasible, kCutoff, kIterationLimit, kTimeLimit };
std::string to_string(LpStatus status);

struct LpOptions {
  double primal_tolerance = 1e-7;
  double dual_tolerance = 1e-7;
  long max_iterations = 2'000'000;
  int refactor_interval = 64;
  // Consecutive degenerate pivots before switching to lowest-index choices.
  int bland_threshold = 1000;
  // Stop early once the minimization-sense objective provably exceeds this.
  double cutoff = std::numeric_limits<double>::infinity();
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;      // in the sense of the objective that was solved
  std::vector<double> values;  // structural variables, unscaled
  long iterations = 0;
};

enum class BasisStatus : std::uint8_t { kBasic, kAtLower, kAtUpper };

// Bounded dual simplex over the LP relaxation of an instance. Every row gets a
// logical variable boxed by the bounds the columns imply, so all variables
// are boxed and any basis is made dual feasible by moving nonbasics to the
// proper bound. The basis is kept between solves, so re-solving after bound
// changes starts warm.
class DualSimplex {
 public:
  explicit DualSimplex(const MilpInstance& instance);
  DualSimplex(const MilpInstance& instance, const Objective& objective);
  DualSimplex(const DualSimplex& other);
  DualSimplex& operator=(const DualSimplex& other);
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;
  ~DualSimplex();

  int num_structural() const;
  int num_rows() const;

  // Unscaled structural bounds.
  void set_bounds(int var, double lower, double upper);
  double lower(int var) const;
  double upper(int var) const;
  void reset_bounds();

  // Statuses of structurals followed by row logicals.
  std::vector<BasisStatus> basis() const;
  // Ignored (slack basis used) when the status vector is inconsistent.
  void set_basis(const std::vector<BasisStatus>& statuses);

  LpResult solve(const LpOptions& options = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LpResult solve_lp_relaxation(const MilpInstance& instance, const LpOptions& options = {});

}  // namespace metrott

#endif  // METROTT_LP_HPP_
