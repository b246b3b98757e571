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

#include <gtest/gtest.h>

#include "metrott/fixtures.hpp"
#include "metrott/flow_sim.hpp"
#include "metrott/warm_start.hpp"

namespace metrott {
namespace {

TEST(RegularTimetable, SatisfiesOperatingRules) {
  const Instance t = generate_fixture("tiny8");
  const ModelConfig cfg = configure(t.config, ModelId::k1a);
  const auto up_zones = operation_zones(t.topology, Direction::kUp);
  const auto dn_zones = operation_zones(t.topology, Direction::kDown);
  int built = 0;
  for (int ku = 1; ku <= 2; ++ku) {
    for (int kd = 1; kd <= 2; ++kd) {
      for (double h : {90.0, 150.0, 300.0}) {
        const auto tt = regular_timetable(cfg, t.topology, {ku, up_zones[3], h}, {kd, dn_zones[3], h});
        if (!tt) continue;
        ++built;
        const FlowTrace trace = simulate(*tt, t.demand, cfg.capacity, cfg.initial_accumulation);
        for (const TimetableIssue& issue : check_timetable(*tt, t.topology, cfg, &trace)) {
          ADD_FAILURE() << ku << "/" << kd << " h=" << h << ": " << issue.what << " " << issue.amount;
        }
        int trains = 0;
        for (const ServicePlan& plan : tt->services()) trains = std::max(trains, plan.train);
        EXPECT_LE(trains, cfg.fleet_size);
      }
    }
  }
  EXPECT_GE(built, 6);
}

TEST(RegularTimetable, RespectsDepartureWindow) {
  const Instance t = generate_fixture("tiny8");
  const ModelConfig cfg = configure(t.config, ModelId::k1a);
  // Two up services 700 s apart cannot both leave before 600.
  EXPECT_FALSE(regular_timetable(cfg, t.topology, {2, std::nullopt, 700.0}, {1, std::nullopt, 150.0}));
}

TEST(ConstructStart, GivesFeasibleAssignment) {
  const Instance t = generate_fixture("tiny8");
  for (ModelId id : {ModelId::k1a, ModelId::k2a, ModelId::k1b}) {
    const ModelConfig cfg = configure(t.config, id);
    const MilpInstance m = assemble(cfg, t.topology, t.demand);
    WarmStartOptions opts;
    opts.time_limit = 30.0;
    const auto start = construct_start(m, cfg, t.topology, opts);
    ASSERT_TRUE(start) << to_string(id);
    EXPECT_TRUE(m.violations(*start, 1e-6).empty()) << to_string(id);
  }
}

}  // namespace
}  // namespace metrott
