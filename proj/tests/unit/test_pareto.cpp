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
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "metrott/error.hpp"
#include "metrott/fixtures.hpp"
#include "metrott/pareto.hpp"

namespace metrott {
namespace {

ParetoPoint point(double obj1, double obj2) {
  ParetoPoint p;
  p.obj1 = obj1;
  p.obj2 = obj2;
  return p;
}

std::vector<std::pair<double, double>> pairs(const std::vector<ParetoPoint>& points) {
  std::vector<std::pair<double, double>> out;
  for (const ParetoPoint& p : points) out.emplace_back(p.obj1, p.obj2);
  return out;
}

using Pairs = std::vector<std::pair<double, double>>;

TEST(Filter, WeakDominationIsRemoved) {
  EXPECT_EQ(pairs(filter_nondominated({point(1, 100), point(2, 100)})), (Pairs{{2, 100}}));
  EXPECT_EQ(pairs(filter_nondominated({point(1, 100), point(1, 90)})), (Pairs{{1, 90}}));
}

TEST(Filter, TradeOffsAreKept) {
  // More turnarounds at a higher passenger cost is a genuine trade-off.
  EXPECT_EQ(pairs(filter_nondominated({point(1, 90), point(2, 100)})), (Pairs{{2, 100}, {1, 90}}));
  // (2, 90) is at least as good in both objectives as (1, 100).
  EXPECT_EQ(pairs(filter_nondominated({point(1, 100), point(2, 90)})), (Pairs{{2, 90}}));
}

TEST(Filter, DuplicatesAndEmpty) {
  EXPECT_TRUE(filter_nondominated({}).empty());
  EXPECT_EQ(pairs(filter_nondominated({point(3, 5), point(3, 5)})), (Pairs{{3, 5}}));
  EXPECT_TRUE(dominates(point(2, 5), point(1, 5)));
  EXPECT_FALSE(dominates(point(2, 5), point(2, 5)));
  EXPECT_FALSE(dominates(point(2, 6), point(1, 5)));
}

TEST(Filter, RandomSetsMatchQuadraticOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> o1(0, 6);
  std::uniform_int_distribution<int> o2(0, 40);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ParetoPoint> pts;
    const int n = 1 + trial % 15;
    for (int i = 0; i < n; ++i) pts.push_back(point(o1(rng), o2(rng)));
    Pairs expected;
    for (const ParetoPoint& p : pts) {
      bool dominated = false;
      for (const ParetoPoint& q : pts) {
        dominated = dominated || ((q.obj1 >= p.obj1 && q.obj2 <= p.obj2) && (q.obj1 > p.obj1 || q.obj2 < p.obj2));
      }
      if (!dominated) expected.emplace_back(p.obj1, p.obj2);
    }
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    const auto got = filter_nondominated(pts);
    EXPECT_EQ(pairs(got), expected) << trial;
    for (const ParetoPoint& a : got) {
      for (const ParetoPoint& b : got) EXPECT_FALSE(dominates(a, b));
    }
  }
}

TEST(Sweep, RejectsSingleObjectiveModels) {
  const Instance t = generate_fixture("tiny8");
  try {
    sweep(configure(t.config, ModelId::k2a), t.topology, t.demand);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModeMismatch);
  }
  SweepOptions bad;
  bad.epsilon = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Sweep, FrontierCsvHeader) {
  std::ostringstream out;
  write_frontier_csv(out, "tiny8", {point(1, 1395), point(0, 0)});
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "instance,obj1,obj2,services_up,services_down,rs1,rs2,rs3,rs4");
  EXPECT_NE(text.find("\ntiny8,1,1395,"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

}  // namespace
}  // namespace metrott
