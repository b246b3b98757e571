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

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "metrott/error.hpp"
#include "metrott/fixtures.hpp"
#include "metrott/model.hpp"
#include "metrott/solver.hpp"
#include "metrott/timetable.hpp"
#include "metrott/warm_start.hpp"

namespace metrott {
namespace {

const Instance& tiny() {
  static const Instance inst = generate_fixture("tiny8");
  return inst;
}

double value(const MilpInstance& m, const std::vector<double>& v, const std::string& name) {
  return v[static_cast<std::size_t>(m.variable_index(name))];
}

void fix(MilpInstance& m, const std::string& name, double v) { m.set_bounds(m.variable_index(name), v, v); }

const ServiceId u1{Direction::kUp, 1};
const ServiceId u2{Direction::kUp, 2};
const ServiceId u3{Direction::kUp, 3};
const ServiceId d1{Direction::kDown, 1};
const ServiceId d2{Direction::kDown, 2};

TEST(ModelConfig, Validation) {
  ModelConfig cfg = tiny().config;
  EXPECT_NO_THROW(cfg.validate_against(tiny().topology));
  cfg.h_min = 400.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = tiny().config;
  cfg.last_departure_up = cfg.first_departure_up;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = tiny().config;
  cfg.fleet_size = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = tiny().config;
  cfg.big_m = 10.0;
  EXPECT_THROW(cfg.validate_against(tiny().topology), Error);
}

TEST(ModelIds, NamesAndConfiguration) {
  for (const char* name : {"1a", "1b", "2a", "2b", "3a", "3b"}) {
    const auto id = parse_model_id(name);
    ASSERT_TRUE(id);
    EXPECT_EQ(to_string(*id), name);
  }
  EXPECT_FALSE(parse_model_id("4a"));
  EXPECT_EQ(mode_of(ModelId::k2b), OperatingMode::kPeak);
  EXPECT_EQ(objective_of(ModelId::k3a), ObjectiveKind::kBiObjective);
  const ModelConfig c = configure(tiny().config, ModelId::k1b);
  EXPECT_EQ(c.mode, OperatingMode::kPeak);
  EXPECT_EQ(c.objective, ObjectiveKind::kCost);
}

TEST(Zones, FourPerDirection) {
  const auto up = operation_zones(tiny().topology, Direction::kUp);
  ASSERT_EQ(up.size(), 4u);
  EXPECT_EQ(up[0].start, 1);
  EXPECT_EQ(up[0].end, 8);
  EXPECT_EQ(up[1].end, 6);
  EXPECT_EQ(up[2].start, 3);
  EXPECT_EQ(up[3].start, 3);
  EXPECT_EQ(up[3].end, 6);
  const auto dn = operation_zones(tiny().topology, Direction::kDown);
  EXPECT_EQ(dn[0].start, 9);
  EXPECT_EQ(dn[3].start, 11);
  EXPECT_EQ(dn[3].end, 14);
}

TEST(Assemble, BinaryCountMatchesHandEnumeration) {
  const Instance& t = tiny();
  const ModelConfig cfg = configure(t.config, ModelId::k1a);
  const MilpInstance m = assemble(cfg, t.topology, t.demand);
  const int k = cfg.services_up + cfg.services_down;
  const int n = t.topology.stations_per_direction();
  int origins = 0;  // (service, station) pairs with outgoing demand
  for (Direction dir : kDirections) {
    std::set<int> from;
    for (const auto& [i, j] : t.demand.active_pairs(dir)) from.insert(i);
    origins += cfg.services(dir) * static_cast<int>(from.size());
  }
  const int expected = k * (1 + 4)                                      // tau, z
                       + k * n                                          // x
                       + 2 * cfg.services_up * cfg.services_down * 2    // y: two handovers each way
                       + 2 * k * 2                                      // alpha, beta
                       + origins;                                       // min indicators
  EXPECT_EQ(m.num_binaries(), expected);
}

TEST(Assemble, FamiliesAndModes) {
  const Instance& t = tiny();
  const std::set<std::string> known = {"zone",     "timetable", "headway",   "turnaround",    "rolling_stock",
                                       "demand",   "skip_stop", "linearization", "objective_link"};
  const MilpInstance a2 = assemble(configure(t.config, ModelId::k2a), t.topology, t.demand);
  const MilpInstance b2 = assemble(configure(t.config, ModelId::k2b), t.topology, t.demand);
  for (const auto& row : a2.constraints()) EXPECT_TRUE(known.count(std::string(row.family()))) << row.name;
  EXPECT_EQ(a2.family_counts().count("skip_stop"), 0u);
  EXPECT_GT(b2.family_counts().at("skip_stop"), 0);
  const MilpInstance a3 = assemble(configure(t.config, ModelId::k3a), t.topology, t.demand);
  EXPECT_EQ(a3.named_objectives().size(), 2u);
  EXPECT_EQ(a3.num_constraints(), a2.num_constraints());
  const MilpInstance a1 = assemble(configure(t.config, ModelId::k1a), t.topology, t.demand);
  EXPECT_EQ(a1.objective().sense, ObjSense::kMaximize);
  EXPECT_EQ(a2.objective().sense, ObjSense::kMinimize);
}

TEST(Assemble, SkipStopRowsNeedPeakMode) {
  const Instance& t = tiny();
  const ModelConfig cfg = configure(t.config, ModelId::k1a);
  MilpInstance m;
  const VariableCatalog cat = VariableCatalog::declare(cfg, t.topology, t.demand, m);
  try {
    build_skipstop_constraints(cfg, t.topology, cat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModeMismatch);
  }
}

TEST(Demand, FirstServiceAccumulatesInitialWindow) {
  Instance t = tiny();
  t.demand.set_rate(1, 3, 0.5);
  const MilpInstance m = assemble(configure(t.config, ModelId::k1a), t.topology, t.demand);
  bool found = false;
  for (const auto& row : m.constraints()) {
    if (row.name == "demand.accumulate_first[u1][1][3]") {
      found = true;
      EXPECT_DOUBLE_EQ(row.rhs, 60.0);
    }
  }
  EXPECT_TRUE(found);
}

// Feasible assignment of a regular timetable with flows completed.
std::vector<double> regular_assignment(const MilpInstance& m, const ModelConfig& cfg, const RegularPattern& up,
                                       const RegularPattern& dn) {
  const auto tt = regular_timetable(cfg, tiny().topology, up, dn);
  EXPECT_TRUE(tt);
  if (!tt) return {};
  const MilpSolution sol = solve(fix_to_timetable(m, *tt, tiny().topology));
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  return sol.values;
}

TEST(Objectives, CostEqualsServicesMinusPullOuts) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1a);
  const MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  const auto v = regular_assignment(m, cfg, {2, std::nullopt, 150.0}, {1, std::nullopt, 150.0});
  ASSERT_FALSE(v.empty());
  double selected = 0.0;
  double pull_outs = 0.0;
  for (Direction dir : kDirections) {
    for (int k = 1; k <= cfg.services(dir); ++k) {
      selected += value(m, v, names::tau({dir, k}));
      for (int dp : depot_roles(dir).sources) pull_outs += value(m, v, names::alpha({dir, k}, dp));
    }
  }
  EXPECT_NEAR(m.evaluate(m.objective(), v), selected - pull_outs, 1e-9);
}

TEST(Objectives, QualityAuxiliariesAreExact) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k2a);
  const MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> h(cfg.h_min, cfg.h_max);
  int checked = 0;
  for (int t = 0; t < 12; ++t) {
    const auto zones = operation_zones(tiny().topology, Direction::kUp);
    const auto dzones = operation_zones(tiny().topology, Direction::kDown);
    const RegularPattern up{1 + t % 2, zones[static_cast<std::size_t>(1 + t % 3)], std::round(h(rng))};
    const RegularPattern dn{1 + (t / 2) % 2, dzones[static_cast<std::size_t>(1 + (t / 3) % 3)], std::round(h(rng))};
    const auto tt = regular_timetable(cfg, tiny().topology, up, dn);
    if (!tt) continue;
    const MilpSolution sol = solve(fix_to_timetable(m, *tt, tiny().topology));
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    const double linear = m.evaluate(m.named_objectives().at(std::string(kQualityObjective)), sol.values);
    EXPECT_NEAR(linear, evaluate_quality(m, cfg, tiny().topology, sol.values), 1e-6);
    ++checked;
  }
  EXPECT_GE(checked, 6);
}

TEST(Timetable, OffPeakDwellIsExact) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1a);
  const MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  const auto v = regular_assignment(m, cfg, {2, std::nullopt, 150.0}, {1, std::nullopt, 150.0});
  ASSERT_FALSE(v.empty());
  for (int i = 1; i <= 8; ++i) {
    EXPECT_NEAR(value(m, v, names::d(u1, i)) - value(m, v, names::a(u1, i)), tiny().topology.dwell_time(i), 1e-9);
  }
}

TEST(Headway, ChainAtMinimumHeadway) {
  Instance t = tiny();
  t.config.services_up = 3;
  t.config.fleet_size = 4;
  const ModelConfig cfg = configure(t.config, ModelId::k1a);
  const MilpInstance m = assemble(cfg, t.topology, t.demand);
  const auto tt = regular_timetable(cfg, t.topology, {3, std::nullopt, cfg.h_min}, {1, std::nullopt, cfg.h_min});
  ASSERT_TRUE(tt);
  for (int i = 1; i <= 8; ++i) EXPECT_NEAR(tt->departure(u3, i) - tt->departure(u1, i), 2 * cfg.h_min, 1e-9);
  EXPECT_EQ(solve(fix_to_timetable(m, *tt, t.topology)).status, SolveStatus::kOptimal);
  // Moving the third service one second earlier breaks the minimum headway.
  Timetable early(tt->stations_per_direction());
  for (ServicePlan plan : tt->services()) {
    if (plan.id == u3) {
      for (double& x : plan.arrival) x -= 1.0;
      for (double& x : plan.departure) x -= 1.0;
    }
    early.add(std::move(plan));
  }
  EXPECT_EQ(solve(fix_to_timetable(m, early, t.topology)).status, SolveStatus::kInfeasible);
}

TEST(Headway, UnselectedServiceCopiesItsPredecessor) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1a);
  MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  fix(m, names::tau(u2), 0.0);
  const MilpSolution sol = solve(m);
  ASSERT_TRUE(sol.has_solution());
  EXPECT_NEAR(value(m, sol.values, names::h(u2)), 0.0, 1e-9);
  for (int i = 1; i <= 8; ++i) {
    EXPECT_NEAR(value(m, sol.values, names::d(u2, i)), value(m, sol.values, names::d(u1, i)), 1e-6);
  }
}

TEST(Turnaround, LinkRespectsMinimumTime) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1a);
  MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  fix(m, names::y(u1, d2, 6), 1.0);
  Objective gap;
  gap.sense = ObjSense::kMinimize;
  gap.terms = {{m.variable_index(names::a(d2, 11)), 1.0}, {m.variable_index(names::d(u1, 6)), -1.0}};
  m.set_objective(gap);
  const MilpSolution sol = solve(m);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 135.0, 1e-6);
}

TEST(Turnaround, IncompatibleZonesForbidLink) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1a);
  MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  fix(m, names::y(u1, d2, 6), 1.0);
  fix(m, names::z(u1, 1, 8), 1.0);  // u1 runs through 6 to the terminal
  EXPECT_EQ(solve(m).status, SolveStatus::kInfeasible);
}

TEST(RollingStock, TerminalDepotNeedsTerminalStart) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1a);
  MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  fix(m, names::alpha(u2, 1), 1.0);
  fix(m, names::z(u2, 3, 8), 1.0);
  EXPECT_EQ(solve(m).status, SolveStatus::kInfeasible);
}

TEST(RollingStock, FleetLimitsPullOuts) {
  Instance t = tiny();
  t.config.fleet_size = 1;
  const ModelConfig cfg = configure(t.config, ModelId::k1a);
  MilpInstance m = assemble(cfg, t.topology, t.demand);
  // Both first services must run, so a single train cannot cover them
  // unless it is handed over.
  fix(m, names::tau(u1), 1.0);
  fix(m, names::tau(d1), 1.0);
  for (int j = 0; j < m.num_variables(); ++j) {
    if (m.variable(j).name.rfind("y[", 0) == 0) m.set_bounds(j, 0.0, 0.0);
  }
  EXPECT_EQ(solve(m).status, SolveStatus::kInfeasible);
}

TEST(SkipStop, SkipCapBoundsStops) {
  for (int cap : {0, 2}) {
    Instance t = tiny();
    t.config.max_skips = cap;
    const ModelConfig cfg = configure(t.config, ModelId::k1b);
    MilpInstance m = assemble(cfg, t.topology, t.demand);
    fix(m, names::tau(u2), 0.0);
    fix(m, names::z(u1, 1, 8), 1.0);
    Objective stops;
    stops.sense = ObjSense::kMinimize;
    for (int i = 1; i <= 8; ++i) stops.terms.push_back({m.variable_index(names::x(u1, i)), 1.0});
    m.set_objective(stops);
    const MilpSolution sol = solve(m);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    EXPECT_NEAR(sol.objective, 8 - cap, 1e-9);
  }
}

TEST(SkipStop, SkippedSegmentsRunWithoutPenalties) {
  const ModelConfig cfg = configure(tiny().config, ModelId::k1b);
  MilpInstance m = assemble(cfg, tiny().topology, tiny().demand);
  fix(m, names::z(u1, 1, 8), 1.0);
  fix(m, names::tau(u2), 0.0);
  fix(m, names::tau(d2), 0.0);
  fix(m, names::x(u1, 3), 0.0);
  fix(m, names::x(u1, 4), 0.0);
  const MilpSolution sol = solve(m);
  ASSERT_TRUE(sol.has_solution());
  EXPECT_NEAR(value(m, sol.values, names::a(u1, 4)) - value(m, sol.values, names::d(u1, 3)),
              tiny().topology.pure_run_time(4), 1e-6);
  EXPECT_NEAR(value(m, sol.values, names::a(u1, 3)) - value(m, sol.values, names::d(u1, 2)),
              tiny().topology.pure_run_time(3) + tiny().topology.accel_penalty(), 1e-6);
}

}  // namespace
}  // namespace metrott
