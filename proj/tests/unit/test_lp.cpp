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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "metrott/lp.hpp"

namespace metrott {
namespace {

TEST(DualSimplex, SingleBoundedVariable) {
  MilpInstance m;
  const int x = m.add_variable("x", VarKind::kContinuous, 0.0, 1.0);
  m.set_objective({ObjSense::kMaximize, {{x, 1.0}}, 0.0});
  const LpResult r = solve_lp_relaxation(m);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 1.0, 1e-9);
  EXPECT_NEAR(r.values[0], 1.0, 1e-9);
}

TEST(DualSimplex, DetectsInfeasibility) {
  MilpInstance m;
  const int x = m.add_variable("x", VarKind::kContinuous, 0.0, 1.0);
  const int y = m.add_variable("y", VarKind::kContinuous, 0.0, 1.0);
  m.add_constraint({"r.sum", {{x, 1.0}, {y, 1.0}}, RowSense::kGreaterEqual, 3.0});
  EXPECT_EQ(solve_lp_relaxation(m).status, LpStatus::kInfeasible);
}

TEST(DualSimplex, EqualityRowsAndObjectiveConstant) {
  MilpInstance m;
  const int x = m.add_variable("x", VarKind::kContinuous, -5.0, 5.0);
  const int y = m.add_variable("y", VarKind::kContinuous, 0.0, 10.0);
  m.add_constraint({"r.eq", {{x, 1.0}, {y, 2.0}}, RowSense::kEqual, 4.0});
  m.set_objective({ObjSense::kMinimize, {{x, 1.0}, {y, 1.0}}, 7.0});
  const LpResult r = solve_lp_relaxation(m);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  // x = 4 - 2y, so x + y = 4 - y is smallest at y = 4.5 where x = -5.
  EXPECT_NEAR(r.objective, 7.0 - 0.5, 1e-9);
  EXPECT_NEAR(r.values[1], 4.5, 1e-9);
}

TEST(DualSimplex, WarmResolveAfterBoundChange) {
  MilpInstance m;
  const int x = m.add_variable("x", VarKind::kBinary, 0.0, 1.0);
  const int y = m.add_variable("y", VarKind::kBinary, 0.0, 1.0);
  m.add_constraint({"r.cap", {{x, 2.0}, {y, 2.0}}, RowSense::kLessEqual, 3.0});
  m.set_objective({ObjSense::kMaximize, {{x, 3.0}, {y, 2.0}}, 0.0});
  DualSimplex lp(m);
  LpResult r = lp.solve();
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 4.0, 1e-9);
  lp.set_bounds(x, 0.0, 0.0);
  r = lp.solve();
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-9);
  lp.reset_bounds();
  EXPECT_NEAR(lp.solve().objective, 4.0, 1e-9);
}

// Value of max c.x s.t. Ax <= b, 0 <= x <= 1 with two rows, through its dual
// min b.l + sum_j max(0, c_j - a_j.l) over l >= 0. The dual is convex and
// piecewise linear, so some breakpoint of the line arrangement minimizes it.
double two_row_oracle(const std::vector<double>& c, const std::vector<std::array<double, 2>>& a,
                      const std::array<double, 2>& b) {
  struct Line {
    double p, q, r;  // p l1 + q l2 = r
  };
  std::vector<Line> lines{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  for (std::size_t j = 0; j < c.size(); ++j) lines.push_back({a[j][0], a[j][1], c[j]});
  auto dual = [&](double l1, double l2) {
    double v = b[0] * l1 + b[1] * l2;
    for (std::size_t j = 0; j < c.size(); ++j) v += std::max(0.0, c[j] - a[j][0] * l1 - a[j][1] * l2);
    return v;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < lines.size(); ++s) {
    for (std::size_t t = s + 1; t < lines.size(); ++t) {
      const double det = lines[s].p * lines[t].q - lines[s].q * lines[t].p;
      if (std::abs(det) < 1e-12) continue;
      const double l1 = (lines[s].r * lines[t].q - lines[s].q * lines[t].r) / det;
      const double l2 = (lines[s].p * lines[t].r - lines[s].r * lines[t].p) / det;
      if (l1 < -1e-12 || l2 < -1e-12) continue;
      best = std::min(best, dual(std::max(l1, 0.0), std::max(l2, 0.0)));
    }
  }
  return best;
}

TEST(DualSimplex, RandomTwoRowBoxProgramsMatchDualOracle) {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> coef(-1.0, 3.0);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    MilpInstance m;
    std::vector<double> c;
    std::vector<std::array<double, 2>> a;
    Objective obj{ObjSense::kMaximize, {}, 0.0};
    Constraint r0{"r.zero", {}, RowSense::kLessEqual, 0.0};
    Constraint r1{"r.one", {}, RowSense::kLessEqual, 0.0};
    for (int j = 0; j < 20; ++j) {
      const int v = m.add_variable("x" + std::to_string(j), VarKind::kContinuous, 0.0, 1.0);
      c.push_back(coef(rng));
      a.push_back({weight(rng), weight(rng)});
      obj.terms.push_back({v, c.back()});
      r0.terms.push_back({v, a.back()[0]});
      r1.terms.push_back({v, a.back()[1]});
    }
    const std::array<double, 2> b{2.0 + 6.0 * weight(rng), 2.0 + 6.0 * weight(rng)};
    r0.rhs = b[0];
    r1.rhs = b[1];
    m.add_constraint(r0);
    m.add_constraint(r1);
    m.set_objective(obj);
    const LpResult r = solve_lp_relaxation(m);
    ASSERT_EQ(r.status, LpStatus::kOptimal) << trial;
    EXPECT_NEAR(r.objective, two_row_oracle(c, a, b), 1e-7) << trial;
    EXPECT_TRUE(m.violations(r.values, 1e-7).empty()) << trial;
  }
}

}  // namespace
}  // namespace metrott
