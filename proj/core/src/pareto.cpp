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

#include "metrott/pareto.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <ostream>

#include "metrott/error.hpp"

namespace metrott {
namespace {

constexpr double kValueTol = 1e-6;

std::string fmt(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

const Objective& named(const MilpInstance& instance, std::string_view name) {
  auto it = instance.named_objectives().find(std::string(name));
  if (it == instance.named_objectives().end()) {
    raise(ErrorCode::kConfigMismatch, "instance lacks objective " + std::string(name));
  }
  return it->second;
}

ParetoPoint make_point(const MilpInstance& instance, const MilpSolution& sol, const ModelConfig& cfg) {
  ParetoPoint p;
  p.obj1 = instance.evaluate(named(instance, kCostObjective), sol.values);
  p.obj2 = instance.evaluate(named(instance, kQualityObjective), sol.values);
  for (Direction dir : kDirections) {
    int count = 0;
    for (int k = 1; k <= cfg.services(dir); ++k) {
      count += sol.value(instance, names::tau(ServiceId{dir, k})) > 0.5 ? 1 : 0;
    }
    (dir == Direction::kUp ? p.services_up : p.services_down) = count;
  }
  for (int dp = 1; dp <= 4; ++dp) p.trains[static_cast<std::size_t>(dp - 1)] = sol.value(instance, names::rs(dp));
  p.wall_time = sol.wall_time;
  p.solution = sol;
  return p;
}

Constraint cut_row(const std::string& rule, int iteration, const Objective& obj, RowSense sense, double level) {
  Constraint row;
  row.name = "cut." + rule + "[" + std::to_string(iteration) + "]";
  row.terms = obj.terms;
  row.sense = sense;
  row.rhs = level - obj.constant;
  return row;
}

}  // namespace

void SweepOptions::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) raise(ErrorCode::kInvalidArgument, "epsilon must be positive");
  if (expected_points < 0) raise(ErrorCode::kInvalidArgument, "expected point count must be non-negative");
  if (max_iterations < 1) raise(ErrorCode::kInvalidArgument, "at least one iteration is required");
  solver.validate();
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  const bool no_worse = a.obj1 >= b.obj1 - kValueTol && a.obj2 <= b.obj2 + kValueTol;
  const bool better = a.obj1 > b.obj1 + kValueTol || a.obj2 < b.obj2 - kValueTol;
  return no_worse && better;
}

std::vector<ParetoPoint> filter_nondominated(std::vector<ParetoPoint> points) {
  std::vector<ParetoPoint> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      if (j != i && dominates(points[j], points[i])) dominated = true;
    }
    if (dominated) continue;
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const ParetoPoint& q) {
      return std::abs(q.obj1 - points[i].obj1) <= kValueTol && std::abs(q.obj2 - points[i].obj2) <= kValueTol;
    });
    if (!duplicate) kept.push_back(std::move(points[i]));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.obj1 > b.obj1;
  });
  return kept;
}

SweepResult sweep(const ModelConfig& cfg, const LineTopology& topo, const OdMatrix& od,
                  const SweepOptions& options) {
  options.validate();
  if (cfg.objective != ObjectiveKind::kBiObjective) {
    raise(ErrorCode::kModeMismatch, "the sweep needs a bi-objective configuration");
  }
  const MilpInstance base = assemble(cfg, topo, od);
  const Objective& f1 = named(base, kCostObjective);
  const Objective& f2 = named(base, kQualityObjective);
  const bool quality_primary = options.direction == SweepDirection::kQualityPrimary;

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double total = options.solver.time_limit;
  const int expected = options.expected_points > 0 ? options.expected_points : cfg.fleet_size + 1;
  const double per_iteration = total / static_cast<double>(expected);

  SweepResult result;
  MilpInstance work = base;
  work.set_objective(quality_primary ? f2 : f1);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double left = total - elapsed();
    if (left <= 0.0) {
      result.complete = false;
      break;
    }
    SolverOptions so = options.solver;
    so.time_limit = std::min(per_iteration, left);
    so.initial_solution.reset();
    const MilpSolution sol = solve(work, so);
    result.iterations = it;
    if (!sol.has_solution()) {
      if (sol.status != SolveStatus::kInfeasible) result.complete = false;
      if (it == 1 && sol.status == SolveStatus::kInfeasible) {
        raise(ErrorCode::kEmptyFrontier, "the bi-objective model has no feasible solution");
      }
      break;
    }
    if (sol.status != SolveStatus::kOptimal) result.complete = false;
    ParetoPoint point = make_point(base, sol, cfg);
    if (quality_primary) {
      work.add_constraint(cut_row("obj1_level", it, f1, RowSense::kGreaterEqual, point.obj1 + options.epsilon));
    } else {
      work.add_constraint(cut_row("obj2_bound", it, f2, RowSense::kLessEqual, point.obj2 - options.epsilon));
    }
    result.visited.push_back(std::move(point));
  }
  if (result.visited.empty() && result.complete) {
    raise(ErrorCode::kEmptyFrontier, "the sweep produced no point");
  }
  result.frontier = filter_nondominated(result.visited);
  return result;
}

void write_frontier_csv(std::ostream& out, const std::string& instance, const std::vector<ParetoPoint>& points) {
  out << "instance,obj1,obj2,services_up,services_down,rs1,rs2,rs3,rs4\n";
  for (const ParetoPoint& p : points) {
    out << instance << ',' << fmt(p.obj1) << ',' << fmt(p.obj2) << ',' << p.services_up << ','
        << p.services_down;
    for (double t : p.trains) out << ',' << fmt(t);
    out << '\n';
  }
}

}  // namespace metrott
