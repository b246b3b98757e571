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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "metrott/error.hpp"
#include "metrott/fixtures.hpp"
#include "metrott/flow_sim.hpp"
#include "metrott/solver.hpp"
#include "metrott/warm_start.hpp"

namespace metrott {
namespace {

LineTopology line(int n) {
  LineTopology::Params p;
  p.stations_per_direction = n;
  p.short_turn_start = 2;
  p.short_turn_end = n - 1;
  p.pure_run_time.assign(static_cast<std::size_t>(2 * n), 60.0);
  p.accel_penalty = 5.0;
  p.decel_penalty = 5.0;
  p.dwell_time.assign(static_cast<std::size_t>(2 * n), 20.0);
  p.min_turnaround.assign(static_cast<std::size_t>(2 * n), 120.0);
  return LineTopology(std::move(p));
}

void add_service(Timetable& tt, const LineTopology& topo, int index, std::vector<bool> stops, double start) {
  ServicePlan plan;
  plan.id = ServiceId{Direction::kUp, index};
  const RunProfile prof = tight_profile(topo, Direction::kUp, stops, start);
  plan.arrival = prof.arrival;
  plan.departure = prof.departure;
  plan.stops = std::move(stops);
  plan.selected = true;
  plan.zone = Zone{1, topo.stations_per_direction()};
  plan.train = index;
  tt.add(std::move(plan));
}

const StationRecord& at(const FlowTrace& trace, int service, int station) {
  for (const StationRecord& r : trace.stations) {
    if (r.service.direction == Direction::kUp && r.service.index == service && r.station == station) return r;
  }
  throw std::runtime_error("no record");
}

TEST(Simulate, SkipStopExampleFixtures) {
  const Instance std_fix = generate_fixture("fig5-standard");
  const Instance skip_fix = generate_fixture("fig5-skip");
  const FlowTrace a = simulate(*std_fix.timetable, std_fix.demand, std_fix.config.capacity, 0.0, std_fix.lumps);
  const FlowTrace b = simulate(*skip_fix.timetable, skip_fix.demand, skip_fix.config.capacity, 0.0, skip_fix.lumps);
  EXPECT_DOUBLE_EQ(total_waiting_time(a), 5400.0);
  EXPECT_DOUBLE_EQ(total_waiting_time(b), 4700.0);
  EXPECT_DOUBLE_EQ(finish_time(*std_fix.timetable), 13.0);
  EXPECT_DOUBLE_EQ(finish_time(*skip_fix.timetable), 12.0);
  EXPECT_NEAR(100.0 * (5400.0 - 4700.0) / 5400.0, 12.96, 0.01);
  EXPECT_NEAR(100.0 * (13.0 - 12.0) / 13.0, 7.69, 0.01);
}

TEST(Simulate, ZeroDemandGivesZeroTrace) {
  const LineTopology topo = line(5);
  Timetable tt(5);
  add_service(tt, topo, 1, std::vector<bool>(5, true), 0.0);
  add_service(tt, topo, 2, std::vector<bool>(5, true), 200.0);
  const FlowTrace trace = simulate(tt, OdMatrix(5, 0.0, 1000.0), 250.0, 120.0);
  EXPECT_DOUBLE_EQ(trace.waiting_time, 0.0);
  EXPECT_DOUBLE_EQ(trace.stranded, 0.0);
  for (const StationRecord& r : trace.stations) EXPECT_DOUBLE_EQ(r.onboard, 0.0);
}

TEST(Simulate, SingleCohort) {
  const LineTopology topo = line(4);
  Timetable tt(4);
  add_service(tt, topo, 1, std::vector<bool>(4, true), 50.0);
  const std::vector<Cohort> lumps{{1, 3, 40.0, 100.0}};
  const FlowTrace trace = simulate(tt, OdMatrix(4, 0.0, 1000.0), 250.0, 0.0, lumps);
  EXPECT_DOUBLE_EQ(total_waiting_time(trace), 1000.0);
  EXPECT_DOUBLE_EQ(at(trace, 1, 3).alighted, 100.0);
}

TEST(Simulate, UniformRateOverGap) {
  const LineTopology topo = line(4);
  Timetable tt(4);
  add_service(tt, topo, 1, std::vector<bool>(4, true), 0.0);
  add_service(tt, topo, 2, std::vector<bool>(4, true), 120.0);
  OdMatrix od(4, -1000.0, 1000.0);
  od.set_rate(1, 2, 1.0);
  const FlowTrace trace = simulate(tt, od, 1000.0, 0.0);
  EXPECT_NEAR(total_waiting_time(trace), 7200.0, 1e-9);
  EXPECT_NEAR(at(trace, 2, 1).boarded, 120.0, 1e-9);
}

TEST(Simulate, CapacityCutsBoarding) {
  const LineTopology topo = line(4);
  Timetable tt(4);
  add_service(tt, topo, 1, std::vector<bool>(4, true), 100.0);
  const std::vector<Cohort> lumps{{1, 2, 0.0, 30.0}, {1, 3, 0.0, 170.0}, {2, 3, 0.0, 120.0}};
  const FlowTrace trace = simulate(tt, OdMatrix(4, 0.0, 1000.0), 250.0, 0.0, lumps);
  EXPECT_DOUBLE_EQ(at(trace, 1, 1).onboard, 200.0);
  EXPECT_DOUBLE_EQ(at(trace, 1, 2).alighted, 30.0);
  EXPECT_DOUBLE_EQ(at(trace, 1, 2).boarded, 80.0);
  EXPECT_DOUBLE_EQ(at(trace, 1, 2).onboard, 250.0);
  EXPECT_DOUBLE_EQ(trace.stranded, 40.0);
}

TEST(Simulate, SkippedStationsNeitherBoardNorAlight) {
  const LineTopology topo = line(4);
  Timetable tt(4);
  add_service(tt, topo, 1, {true, false, true, true}, 0.0);
  add_service(tt, topo, 2, {true, true, true, true}, 200.0);
  const std::vector<Cohort> lumps{{1, 2, 0.0, 10.0}, {2, 4, 0.0, 10.0}};
  const FlowTrace trace = simulate(tt, OdMatrix(4, -100.0, 1000.0), 250.0, 0.0, lumps);
  EXPECT_DOUBLE_EQ(at(trace, 1, 1).boarded, 0.0);
  EXPECT_DOUBLE_EQ(at(trace, 1, 2).boarded, 0.0);
  EXPECT_DOUBLE_EQ(at(trace, 2, 1).boarded, 10.0);
  EXPECT_DOUBLE_EQ(at(trace, 2, 2).boarded, 10.0);
}

TEST(Simulate, RejectsDecreasingDepartures) {
  const LineTopology topo = line(4);
  Timetable tt(4);
  add_service(tt, topo, 1, std::vector<bool>(4, true), 0.0);
  ServicePlan bad = tt.service({Direction::kUp, 1});
  bad.id = ServiceId{Direction::kUp, 2};
  bad.departure[2] = bad.departure[1] - 10.0;
  Timetable broken(4);
  broken.add(tt.service({Direction::kUp, 1}));
  broken.add(bad);
  try {
    simulate(broken, OdMatrix(4, 0.0, 100.0), 250.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleTimetable);
  }
}

struct RandomCase {
  LineTopology topo = line(7);
  Timetable tt{7};
  OdMatrix od{7, 0.0, 3600.0};
};

RandomCase random_case(std::uint64_t seed, bool single_origin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rate(0.0, 0.2);
  std::uniform_real_distribution<double> gap(160.0, 320.0);
  std::bernoulli_distribution skip(0.25);
  RandomCase c;
  for (int i = 1; i <= 7; ++i) {
    if (single_origin && i > 1) break;
    for (int j = i + 1; j <= 7; ++j) c.od.set_rate(i, j, rate(rng));
  }
  double start = 0.0;
  for (int k = 1; k <= 8; ++k) {
    std::vector<bool> stops(7, true);
    for (int p = 1; p < 6; ++p) stops[static_cast<std::size_t>(p)] = !skip(rng);
    add_service(c.tt, c.topo, k, stops, start);
    start += gap(rng);
  }
  return c;
}

TEST(SimulateProperties, ConservationCapacityAndFifo) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RandomCase c = random_case(seed, false);
    const double capacity = 40.0 + 10.0 * static_cast<double>(seed % 5);
    const FlowTrace trace = simulate(c.tt, c.od, capacity, 120.0);
    for (int k = 1; k <= 8; ++k) {
      double boarded = 0.0;
      double alighted = 0.0;
      double previous = 0.0;
      for (int i = 1; i <= 7; ++i) {
        const StationRecord& r = at(trace, k, i);
        EXPECT_LE(r.onboard, capacity + 1e-9);
        EXPECT_GE(r.onboard, -1e-9);
        EXPECT_NEAR(r.onboard, previous - r.alighted + r.boarded, 1e-9);
        if (!r.stops) EXPECT_EQ(r.boarded + r.alighted, 0.0);
        previous = r.onboard;
        boarded += r.boarded;
        alighted += r.alighted;
      }
      EXPECT_NEAR(previous, 0.0, 1e-9) << "seed " << seed;
      EXPECT_NEAR(boarded, alighted, 1e-9);
    }
    for (const StreamRecord& s : trace.streams) {
      EXPECT_GE(s.leftover, -1e-9);
      EXPECT_LE(s.boarded, s.eligible + 1e-9);
      if (s.boarded > 1e-9 && !std::isnan(s.first_left_arrival)) {
        EXPECT_LE(s.last_boarded_arrival, s.first_left_arrival + 1e-9) << "seed " << seed;
      }
    }
  }
}

TEST(SimulateProperties, MoreCapacityNeverWaitsLonger) {
  // With one origin every passenger boards no later when trains are larger.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RandomCase c = random_case(seed, true);
    double last = std::numeric_limits<double>::infinity();
    double last_stranded = std::numeric_limits<double>::infinity();
    for (double capacity : {20.0, 40.0, 80.0, 160.0, 1000.0}) {
      const FlowTrace trace = simulate(c.tt, c.od, capacity, 120.0);
      // Passengers left at the end would have waited at least until then.
      if (trace.stranded <= 1e-9 && last_stranded <= 1e-9) EXPECT_LE(trace.waiting_time, last + 1e-6);
      EXPECT_LE(trace.stranded, last_stranded + 1e-9);
      last = trace.waiting_time;
      last_stranded = trace.stranded;
    }
  }
}

TEST(CompareWithMilp, AgreesWithFlowVariables) {
  const Instance t = generate_fixture("tiny8");
  const ModelConfig cfg = configure(t.config, ModelId::k2a);
  const MilpInstance m = assemble(cfg, t.topology, t.demand);
  const auto tt = regular_timetable(cfg, t.topology, {2, std::nullopt, 150.0}, {1, std::nullopt, 150.0});
  ASSERT_TRUE(tt);
  const MilpSolution sol = solve(fix_to_timetable(m, *tt, t.topology));
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  const FlowTrace trace = simulate(*tt, t.demand, cfg.capacity, cfg.initial_accumulation);
  const DiscrepancyReport report = compare_with_milp(trace, m, sol.values);
  for (const FamilyGap& f : report.families) EXPECT_LT(f.max_abs_diff, 1e-6) << f.family << " " << f.worst;
  EXPECT_TRUE(report.agrees());
  EXPECT_TRUE(check_timetable(*tt, t.topology, cfg, &trace).empty());
}

TEST(CompareWithMilp, MismatchedTimetableIsRejected) {
  const Instance t = generate_fixture("tiny8");
  const ModelConfig cfg = configure(t.config, ModelId::k2a);
  const MilpInstance m = assemble(cfg, t.topology, t.demand);
  const auto a = regular_timetable(cfg, t.topology, {2, std::nullopt, 150.0}, {1, std::nullopt, 150.0});
  const auto b = regular_timetable(cfg, t.topology, {2, std::nullopt, 200.0}, {1, std::nullopt, 150.0});
  ASSERT_TRUE(a && b);
  const MilpSolution sol = solve(fix_to_timetable(m, *a, t.topology));
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  const FlowTrace trace = simulate(*b, t.demand, cfg.capacity, cfg.initial_accumulation);
  try {
    compare_with_milp(trace, m, sol.values);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimetableMismatch);
  }
}

}  // namespace
}  // namespace metrott
