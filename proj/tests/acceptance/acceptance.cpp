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

// Acceptance runner: prints one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "enumeration.hpp"
#include "metrott/fixtures.hpp"
#include "metrott/flow_sim.hpp"
#include "metrott/model.hpp"
#include "metrott/mps.hpp"
#include "metrott/pareto.hpp"
#include "metrott/solver.hpp"
#include "metrott/timetable.hpp"
#include "metrott/topology.hpp"
#include "metrott/warm_start.hpp"

namespace fs = std::filesystem;
using namespace metrott;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------
// Shared tiny8 data: the Model 1a optimum and the per-pattern evaluation of
// the structural enumeration.

const Instance& tiny8() {
  static const Instance inst = generate_fixture("tiny8");
  return inst;
}

struct Solved {
  ModelConfig cfg;
  MilpInstance milp;
  MilpSolution solution;
};

const Solved& tiny8_1a() {
  static const Solved s = [] {
    const ModelConfig cfg = configure(tiny8().config, ModelId::k1a);
    MilpInstance milp = assemble(cfg, tiny8().topology, tiny8().demand);
    SolverOptions opts;
    opts.time_limit = 600.0;
    MilpSolution sol = solve(milp, opts);
    return Solved{cfg, std::move(milp), std::move(sol)};
  }();
  return s;
}

struct PatternValue {
  int links = 0;
  double obj2 = 0.0;
};

// Minimum quality objective of every feasible structural pattern (the
// quality rows are shared by Models 2a and 3a).
const std::vector<PatternValue>& tiny8_pattern_values() {
  static const std::vector<PatternValue> values = [] {
    const ModelConfig cfg = configure(tiny8().config, ModelId::k2a);
    const MilpInstance milp = assemble(cfg, tiny8().topology, tiny8().demand);
    const Objective& obj2 = milp.named_objectives().at(std::string(kQualityObjective));
    std::vector<PatternValue> out;
    for (const auto& p : testing::enumerate_patterns(cfg, tiny8().topology)) {
      if (auto v = testing::residual_optimum(milp, cfg, tiny8().topology, p, obj2)) {
        out.push_back({static_cast<int>(p.links.size()), *v});
      }
    }
    return out;
  }();
  return values;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  double wait[2];
  double finish[2];
  int slot = 0;
  for (const char* name : {"fig5-standard", "fig5-skip"}) {
    const Instance inst = generate_fixture(name);
    const FlowTrace trace = simulate(*inst.timetable, inst.demand, inst.config.capacity,
                                     inst.config.initial_accumulation, inst.lumps);
    wait[slot] = total_waiting_time(trace);
    finish[slot] = finish_time(*inst.timetable);
    ++slot;
  }
  const double wait_cut = 100.0 * (wait[0] - wait[1]) / wait[0];
  const double finish_cut = 100.0 * (finish[0] - finish[1]) / finish[0];
  const double elapsed = since(t0);
  const bool pass = wait[0] == 5400.0 && wait[1] == 4700.0 && finish[0] == 13.0 && finish[1] == 12.0 &&
                    std::abs(wait_cut - 12.96) <= 0.01 && std::abs(finish_cut - 7.69) <= 0.01 && elapsed < 1.0;
  return {pass, "waiting " + fmt(wait[0]) + "/" + fmt(wait[1]) + ", finish " + fmt(finish[0]) + "/" +
                    fmt(finish[1]) + ", reductions " + fmt(wait_cut, 4) + "% and " + fmt(finish_cut, 3) + "%, " +
                    fmt(elapsed, 3) + " s"};
}

Outcome criterion2() {
  bool pass = required_services(700, 1000, 0.70) == 1 && required_services(1500, 250, 0.8) == 8;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> demand(0, 20000);
  std::uniform_int_distribution<long> capacity(50, 2000);
  std::uniform_int_distribution<long> percent(30, 100);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const long d = demand(rng);
    const long c = capacity(rng);
    const long p = percent(rng);
    // ceil(d / (c * p / 100)) in integers
    const long den = c * p;
    const long expected = (d * 100 + den - 1) / den;
    if (required_services(static_cast<double>(d), static_cast<double>(c), static_cast<double>(p) / 100.0) !=
        expected) {
      ++mismatches;
    }
  }
  pass = pass && mismatches == 0;
  return {pass, "fixed examples 1 and 8, " + std::to_string(mismatches) + " mismatches over 1000 random triples"};
}

enum class CaseKind { kFree, kSingleDestination, kMultiDestination };

OdMatrix random_demand(CaseKind kind, std::mt19937_64& rng, const OdMatrix& shape) {
  OdMatrix od(shape.stations_per_direction(), shape.horizon_start(), shape.horizon_end());
  const int n = shape.stations_per_direction();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Direction dir : kDirections) {
    const int first = dir == Direction::kUp ? 1 : n + 1;
    for (int i = first; i < first + n - 1; ++i) {
      if (kind == CaseKind::kSingleDestination) {
        std::uniform_int_distribution<int> dest(i + 1, first + n - 1);
        od.set_rate(i, dest(rng), 0.3 + 0.9 * unit(rng));
        continue;
      }
      for (int j = i + 1; j < first + n; ++j) {
        const double scale = kind == CaseKind::kFree ? 0.012 : 0.25;
        if (unit(rng) < 0.8) od.set_rate(i, j, scale * (0.2 + unit(rng)));
      }
    }
  }
  return od;
}

bool capacity_binds(const FlowTrace& trace) {
  return std::any_of(trace.streams.begin(), trace.streams.end(),
                     [](const StreamRecord& r) { return r.eligible - r.boarded > 1e-6; });
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const Instance& base = tiny8();
  const LineTopology& topo = base.topology;
  const ModelConfig cfg = configure(base.config, ModelId::k1a);
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_pattern = [&](Direction dir) {
    RegularPattern p;
    p.count = 1 + static_cast<int>(unit(rng) * cfg.services(dir));
    p.count = std::min(p.count, cfg.services(dir));
    const auto zones = operation_zones(topo, dir);
    const int alt = static_cast<int>(unit(rng) * 4.0);
    if (alt > 0 && alt < 4) p.alternate = zones[static_cast<std::size_t>(alt)];
    p.headway = std::round(cfg.h_min + unit(rng) * (cfg.h_max - cfg.h_min));
    return p;
  };

  int free_ok = 0;
  int free_bad = 0;
  int single_ok = 0;
  int single_bad = 0;
  int multi = 0;
  int multi_infeasible = 0;
  double multi_gap = 0.0;
  double multi_family = 0.0;
  double worst_free = 0.0;
  std::string first_failure;
  SolverOptions opts;
  opts.time_limit = 60.0;

  for (int attempt = 0; attempt < 2000; ++attempt) {
    const bool done_free = free_ok + free_bad >= 100;
    const bool done_single = single_ok + single_bad >= 20;
    const bool done_multi = multi >= 10;
    if (done_free && done_single && done_multi) break;
    const CaseKind kind = !done_free     ? CaseKind::kFree
                          : !done_single ? CaseKind::kSingleDestination
                                         : CaseKind::kMultiDestination;
    const OdMatrix od = random_demand(kind, rng, base.demand);
    const auto tt = regular_timetable(cfg, topo, random_pattern(Direction::kUp), random_pattern(Direction::kDown));
    if (!tt) continue;
    const FlowTrace trace = simulate(*tt, od, cfg.capacity, cfg.initial_accumulation);
    const bool binds = capacity_binds(trace);
    if (binds != (kind != CaseKind::kFree)) continue;

    const MilpInstance milp = assemble(cfg, topo, od);
    const MilpInstance fixed = fix_to_timetable(milp, *tt, topo);
    const MilpSolution sol = solve(fixed, opts);
    if (kind == CaseKind::kMultiDestination) {
      ++multi;
      multi_gap = std::max(multi_gap, allocation_gap(trace));
      if (!sol.has_solution()) {
        ++multi_infeasible;
        continue;
      }
      const DiscrepancyReport rep = compare_with_milp(trace, fixed, sol.values);
      for (const auto& f : rep.families) multi_family = std::max(multi_family, f.max_abs_diff);
      continue;
    }
    bool ok = sol.status == SolveStatus::kOptimal;
    std::string why = "fixed model " + to_string(sol.status);
    if (ok) {
      const DiscrepancyReport rep = compare_with_milp(trace, fixed, sol.values);
      ok = rep.agrees();
      for (const auto& f : rep.families) {
        if (kind == CaseKind::kFree) worst_free = std::max(worst_free, f.max_abs_diff);
        if (f.flagged) why = f.family + " differs by " + fmt(f.max_abs_diff) + " at " + f.worst;
      }
    }
    if (!ok && first_failure.empty()) first_failure = why;
    if (kind == CaseKind::kFree) {
      (ok ? free_ok : free_bad)++;
    } else {
      (ok ? single_ok : single_bad)++;
    }
  }
  const double elapsed = since(t0);
  const bool pass = free_ok >= 100 && free_bad == 0 && single_ok >= 20 && single_bad == 0 && multi >= 10 &&
                    elapsed < 300.0;
  std::string detail = "non-binding " + std::to_string(free_ok) + "/" + std::to_string(free_ok + free_bad) +
                       " agree (max diff " + fmt(worst_free, 3) + "), single-destination binding " +
                       std::to_string(single_ok) + "/" + std::to_string(single_ok + single_bad) +
                       " agree; multi-destination binding: " + std::to_string(multi) + " cases, " +
                       std::to_string(multi_infeasible) + " infeasible under the leftover split, largest FIFO " +
                       "allocation gap " + fmt(multi_gap, 4) + ", largest flow difference when feasible " +
                       fmt(multi_family, 4) + "; " + fmt(elapsed, 3) + " s";
  if (!first_failure.empty()) detail += "; first failure: " + first_failure;
  return {pass, detail};
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  const Instance& inst = tiny8();
  const LineTopology& topo = inst.topology;

  // Model 1a: best link count over all feasible patterns, checked from the
  // largest count downwards.
  const Solved& s1 = tiny8_1a();
  const auto patterns = testing::enumerate_patterns(s1.cfg, topo);
  int decision_binaries = 0;
  for (const auto& v : s1.milp.variables()) {
    const bool structural = v.name.rfind("tau[", 0) == 0 || v.name.rfind("z[", 0) == 0;
    decision_binaries += structural && v.kind == VarKind::kBinary ? 1 : 0;
  }
  std::map<int, std::vector<const testing::Pattern*>, std::greater<>> by_links;
  for (const auto& p : patterns) by_links[static_cast<int>(p.links.size())].push_back(&p);
  std::optional<int> oracle1;
  for (const auto& [links, list] : by_links) {
    for (const auto* p : list) {
      if (testing::residual_optimum(s1.milp, s1.cfg, topo, *p, s1.milp.objective())) {
        oracle1 = links;
        break;
      }
    }
    if (oracle1) break;
  }
  const bool ok1 = s1.solution.status == SolveStatus::kOptimal && oracle1 &&
                   std::abs(s1.solution.objective - *oracle1) < 1e-9;

  // Model 2a, alone and with the turnaround count bounded from below.
  const auto& values = tiny8_pattern_values();
  const ModelConfig cfg2 = configure(inst.config, ModelId::k2a);
  MilpInstance m2 = assemble(cfg2, topo, inst.demand);
  SolverOptions opts;
  opts.time_limit = 300.0;
  const MilpSolution s2 = solve(m2, opts);
  double oracle2 = std::numeric_limits<double>::infinity();
  double oracle2_cut = std::numeric_limits<double>::infinity();
  for (const auto& v : values) {
    oracle2 = std::min(oracle2, v.obj2);
    if (v.links >= 1) oracle2_cut = std::min(oracle2_cut, v.obj2);
  }
  Constraint cut{"objective_link.level", m2.named_objectives().at(std::string(kCostObjective)).terms,
                 RowSense::kGreaterEqual, 1.0};
  m2.add_constraint(cut);
  const MilpSolution s2cut = solve(m2, opts);
  const bool ok2 = s2.status == SolveStatus::kOptimal && relative_gap(s2.objective, oracle2) <= 1e-6 &&
                   s2cut.status == SolveStatus::kOptimal && relative_gap(s2cut.objective, oracle2_cut) <= 1e-6;
  const double elapsed = since(t0);
  return {ok1 && ok2 && decision_binaries <= 20 && elapsed < 600.0,
          std::to_string(decision_binaries) + " zone decision binaries, " + std::to_string(patterns.size()) +
              " patterns; 1a solver " + fmt(s1.solution.objective) + " vs enumeration " +
              (oracle1 ? std::to_string(*oracle1) : std::string("none")) + "; 2a solver " + fmt(s2.objective) +
              " vs " + fmt(oracle2) + ", with obj1 >= 1 solver " + fmt(s2cut.objective) + " vs " +
              fmt(oracle2_cut) + "; " + fmt(elapsed, 3) + " s (shared tiny8 solves included)"};
}

// Rule checker written against the realized timetable only.
std::vector<std::string> independent_check(const Timetable& tt, const LineTopology& topo, const ModelConfig& cfg,
                                           const FlowTrace& trace) {
  std::vector<std::string> bad;
  const double tol = 1e-6;
  for (Direction dir : kDirections) {
    const auto plans = tt.services(dir);
    const ServicePlan* prev_selected = nullptr;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const ServicePlan& p = *plans[k];
      if (!p.selected) continue;
      if (prev_selected) {
        for (std::size_t s = 0; s < p.departure.size(); ++s) {
          const double h = p.departure[s] - prev_selected->departure[s];
          if (h < 90.0 - tol || h > 360.0 + tol) bad.push_back("headway " + fmt(h) + " before " + p.id.name());
        }
      }
      prev_selected = &p;
      if (k > 0) {
        const ServicePlan& q = *plans[k - 1];
        for (std::size_t s = 0; s < p.stops.size(); ++s) {
          if (!p.stops[s] && !(q.selected && q.stops[s])) bad.push_back("coverage gap at " + p.id.name());
        }
      }
      if (cfg.mode == OperatingMode::kPeak) {
        int skips = 0;
        for (int i = p.zone.start; i <= p.zone.end; ++i) skips += tt.stops(p.id, i) ? 0 : 1;
        if (skips > 4) bad.push_back(std::to_string(skips) + " skips on " + p.id.name());
      }
      if (p.sink.service) {
        const int m = p.zone.end;
        const double gap = tt.arrival(*p.sink.service, topo.paired_station(m)) - tt.departure(p.id, m);
        if (gap < 135.0 - tol) bad.push_back("turnaround gap " + fmt(gap) + " after " + p.id.name());
      }
    }
  }
  for (const StationRecord& r : trace.stations) {
    if (r.onboard > 250.0 + tol) bad.push_back("onboard " + fmt(r.onboard) + " on " + r.service.name());
  }
  return bad;
}

Outcome criterion5() {
  const Instance inst = generate_fixture("santiago16");
  std::string detail;
  bool pass = true;
  for (ModelId id : {ModelId::k1a, ModelId::k1b}) {
    const ModelConfig cfg = configure(inst.config, id);
    const MilpInstance milp = assemble(cfg, inst.topology, inst.demand);
    SolverOptions opts;
    opts.time_limit = 40.0;
    WarmStartOptions ws;
    ws.time_limit = 40.0;
    opts.initial_solution = construct_start(milp, cfg, inst.topology, ws);
    const MilpSolution sol = solve(milp, opts);
    if (!detail.empty()) detail += "; ";
    detail += to_string(id) + " " + to_string(sol.status);
    if (!sol.has_solution()) {
      pass = false;
      detail += " without a timetable";
      continue;
    }
    const Timetable tt = extract_timetable(milp, sol.values, inst.topology);
    const FlowTrace trace = simulate(tt, inst.demand, cfg.capacity, cfg.initial_accumulation);
    const auto bad = independent_check(tt, inst.topology, cfg, trace);
    const auto issues = check_timetable(tt, inst.topology, cfg, &trace);
    int selected = 0;
    for (const auto& p : tt.services()) selected += p.selected ? 1 : 0;
    detail += " obj " + fmt(sol.objective) + ", " + std::to_string(selected) + " services, " +
              std::to_string(bad.size()) + " rule violations";
    if (!bad.empty()) detail += " (" + bad.front() + ")";
    pass = pass && bad.empty() && issues.empty();
  }
  return {pass, detail};
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  double worst = 0.0;
  for (const char* name : {"tiny8", "santiago16"}) {
    const Instance inst = generate_fixture(name);
    const LineTopology& topo = inst.topology;
    const auto& prm = topo.params();
    for (Direction dir : kDirections) {
      const auto stations = topo.stations_of(dir);
      const auto zones = operation_zones(topo, dir);
      for (int t = 0; t < 250; ++t) {
        const Zone& zone = zones[static_cast<std::size_t>(unit(rng) * 4.0) % 4];
        std::vector<bool> stops(stations.size(), false);
        std::vector<bool> all(stations.size(), false);
        double expected = 0.0;
        for (std::size_t p = 0; p < stations.size(); ++p) {
          const int s = stations[p];
          if (!zone.contains(s)) continue;
          all[p] = true;
          const bool end = s == zone.start || s == zone.end;
          stops[p] = end || unit(rng) < 0.6;
          if (!stops[p]) {
            expected += prm.accel_penalty + prm.decel_penalty + prm.dwell_time[static_cast<std::size_t>(s - 1)];
          }
        }
        const double t0 = std::floor(1000.0 * unit(rng));
        const RunProfile full = tight_profile(topo, dir, all, t0);
        const RunProfile skip = tight_profile(topo, dir, stops, t0);
        const auto last = static_cast<std::size_t>(zone.end - stations.front());
        const double saved_profile = full.arrival[last] - skip.arrival[last];
        const double saved = skip_saving(topo, zone, stops);
        worst = std::max({worst, std::abs(saved_profile - expected), std::abs(saved - expected)});
        ++checked;
      }
    }
  }
  return {worst == 0.0, std::to_string(checked) + " random stop patterns, largest deviation " + fmt(worst)};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const Instance& inst = tiny8();
  // Brute-force frontier from the enumerated patterns.
  std::vector<PatternValue> pts = tiny8_pattern_values();
  std::vector<PatternValue> oracle;
  for (const auto& a : pts) {
    bool dominated = false;
    for (const auto& b : pts) {
      const bool ge = b.links >= a.links && b.obj2 <= a.obj2 + 1e-9;
      const bool strict = b.links > a.links || b.obj2 < a.obj2 - 1e-9;
      dominated = dominated || (ge && strict);
    }
    const bool seen = std::any_of(oracle.begin(), oracle.end(), [&](const PatternValue& o) {
      return o.links == a.links && std::abs(o.obj2 - a.obj2) <= 1e-9;
    });
    if (!dominated && !seen) oracle.push_back(a);
  }
  std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) { return a.links > b.links; });

  const ModelConfig cfg = configure(inst.config, ModelId::k3a);
  SweepOptions sw;
  sw.epsilon = 1.0;
  sw.solver.time_limit = 1500.0;
  const SweepResult res = sweep(cfg, inst.topology, inst.demand, sw);
  const auto& front = res.frontier;

  bool same = res.complete && front.size() == oracle.size();
  for (std::size_t i = 0; same && i < front.size(); ++i) {
    same = std::abs(front[i].obj1 - oracle[i].links) < 1e-9 && relative_gap(front[i].obj2, oracle[i].obj2) <= 1e-6;
  }
  bool mutual = true;
  for (const auto& a : front) {
    for (const auto& b : front) {
      if (&a != &b && dominates(a, b)) mutual = false;
    }
  }
  bool monotone = true;
  for (std::size_t i = 1; i < front.size(); ++i) {
    monotone = monotone && front[i].obj1 < front[i - 1].obj1 && front[i].obj2 < front[i - 1].obj2;
  }
  const MilpInstance milp = assemble(cfg, inst.topology, inst.demand);
  bool rows_ok = true;
  for (const auto& p : front) rows_ok = rows_ok && milp.violations(p.solution.values, 1e-6).empty();
  std::string listing;
  for (const auto& p : front) listing += " (" + fmt(p.obj1) + ", " + fmt(p.obj2) + ")";
  std::string oracle_listing;
  for (const auto& p : oracle) oracle_listing += " (" + std::to_string(p.links) + ", " + fmt(p.obj2) + ")";
  const double elapsed = since(t0);
  return {same && mutual && monotone && rows_ok && elapsed < 1800.0,
          "sweep" + listing + " vs enumeration" + oracle_listing + "; non-dominated " + (mutual ? "yes" : "no") +
              ", monotone " + (monotone ? "yes" : "no") + ", row check " + (rows_ok ? "ok" : "failed") + "; " +
              fmt(elapsed, 3) + " s"};
}

Outcome criterion8() {
  // Three trains on the tiny8 line.
  Instance inst = generate_fixture("tiny8");
  inst.config.fleet_size = 3;
  const ModelConfig cfg = configure(inst.config, ModelId::k1a);
  const MilpInstance base = assemble(cfg, inst.topology, inst.demand);
  const Zone high{inst.topology.short_turn_start(Direction::kUp), inst.topology.short_turn_end(Direction::kUp)};

  auto run = [&](bool full_only) {
    MilpInstance milp = base;
    if (full_only) {
      for (Direction dir : kDirections) {
        const auto zones = operation_zones(inst.topology, dir);
        for (int k = 1; k <= cfg.services(dir); ++k) {
          for (std::size_t z = 1; z < zones.size(); ++z) {
            milp.set_bounds(milp.variable_index(names::z({dir, k}, zones[z].start, zones[z].end)), 0.0, 0.0);
          }
        }
      }
    }
    SolverOptions opts;
    opts.time_limit = 600.0;
    const MilpSolution sol = solve(milp, opts);
    int served = 0;
    if (sol.has_solution()) {
      const Timetable tt = extract_timetable(milp, sol.values, inst.topology);
      for (const auto& p : tt.services()) {
        const int s = p.id.direction == Direction::kUp ? high.start : inst.topology.paired_station(high.end);
        const int e = p.id.direction == Direction::kUp ? high.end : inst.topology.paired_station(high.start);
        served += p.selected && p.zone.contains(s) && p.zone.contains(e) ? 1 : 0;
      }
    }
    return std::make_pair(sol, served);
  };
  const auto [short_sol, short_served] = run(false);
  const auto [full_sol, full_served] = run(true);
  const bool pass = short_sol.status == SolveStatus::kOptimal && full_sol.status == SolveStatus::kOptimal &&
                    short_served > full_served;
  return {pass, "high-demand zone services " + std::to_string(short_served) + " with short-turning (obj " +
                    fmt(short_sol.objective) + ") vs " + std::to_string(full_served) + " full-length only (obj " +
                    fmt(full_sol.objective) + ")"};
}

std::optional<double> external_optimum(const fs::path& mps) {
  if (std::system("python3 -c 'import highspy' >/dev/null 2>&1") != 0) return std::nullopt;
  const fs::path script = fs::temp_directory_path() / "metrott_highs.py";
  const fs::path result = fs::temp_directory_path() / "metrott_highs.out";
  {
    std::ofstream py(script);
    py << "import sys, highspy\n"
          "h = highspy.Highs()\n"
          "h.setOptionValue('output_flag', False)\n"
          "h.setOptionValue('time_limit', 300.0)\n"
          "h.readModel(sys.argv[1])\n"
          "h.run()\n"
          "ok = h.getModelStatus() == highspy.HighsModelStatus.kOptimal\n"
          "open(sys.argv[2], 'w').write(repr(h.getInfo().objective_function_value) if ok else 'none')\n";
  }
  const std::string cmd = "python3 " + script.string() + " " + mps.string() + " " + result.string();
  if (std::system(cmd.c_str()) != 0) return std::nullopt;
  std::ifstream in(result);
  std::string text;
  in >> text;
  if (text.empty() || text == "none") return std::nullopt;
  return std::stod(text);
}

Outcome criterion9() {
  bool pass = true;
  std::string detail;
  const fs::path dir = fs::temp_directory_path() / "metrott_acceptance";
  fs::create_directories(dir);
  for (const char* name : {"tiny8", "santiago16"}) {
    const Instance inst = generate_fixture(name);
    for (ModelId id : {ModelId::k1a, ModelId::k1b, ModelId::k3a}) {
      const MilpInstance milp = assemble(configure(inst.config, id), inst.topology, inst.demand);
      std::ostringstream first;
      write_mps(first, milp, name);
      std::istringstream in(first.str());
      const MilpInstance back = read_mps(in);
      std::ostringstream second;
      write_mps(second, back, name);
      const bool same = first.str() == second.str();
      pass = pass && same;
      if (!same) detail += std::string(name) + " " + to_string(id) + " round trip differs; ";
    }
  }
  detail += "round trips byte-identical for 6 models";

  // Row check of the built-in tiny8 optimum against the re-read model.
  const Solved& s = tiny8_1a();
  const fs::path mps = dir / "tiny8-1a.mps";
  write_mps(mps, s.milp, "tiny8");
  const MilpInstance back = read_mps(mps);
  std::vector<double> values(static_cast<std::size_t>(back.num_variables()), 0.0);
  for (int j = 0; j < back.num_variables(); ++j) {
    values[static_cast<std::size_t>(j)] =
        s.solution.values[static_cast<std::size_t>(s.milp.variable_index(back.variable(j).name))];
  }
  const auto violations = back.violations(values, 1e-6);
  const double obj = back.evaluate(back.objective(), values);
  const bool rows_ok = violations.empty() && std::abs(obj - s.solution.objective) < 1e-9;
  pass = pass && rows_ok && s.solution.status == SolveStatus::kOptimal;
  detail += "; built-in optimum " + fmt(s.solution.objective) + " re-checked on the re-read model: " +
            (rows_ok ? "ok" : std::to_string(violations.size()) + " violations");

  if (auto ext = external_optimum(mps)) {
    const bool agree = std::abs(*ext - s.solution.objective) <= 1e-6;
    pass = pass && agree;
    detail += "; external solver optimum " + fmt(*ext) + (agree ? " matches" : " differs");
  } else {
    detail += "; no external solver available, external comparison skipped";
  }
  return {pass, detail};
}

Outcome criterion10() {
  // Twice the santiago16 horizon and fleet, with a short limit standing in
  // for the four-hour one.
  const Instance inst = generate_line_instance({10, 16, 60}, Period::kMorning, OperatingMode::kOffPeak);
  const ModelConfig cfg = configure(inst.config, ModelId::k1a);
  const MilpInstance milp = assemble(cfg, inst.topology, inst.demand);
  SolverOptions opts;
  opts.time_limit = 30.0;
  WarmStartOptions ws;
  ws.time_limit = 60.0;
  opts.initial_solution = construct_start(milp, cfg, inst.topology, ws);
  const MilpSolution sol = solve(milp, opts);
  const bool rows_ok = sol.has_solution() && milp.violations(sol.values, 1e-6).empty();
  const bool pass = sol.status == SolveStatus::kTimeLimit && rows_ok;
  return {pass, inst.name + " with " + std::to_string(milp.num_binaries()) + " binaries: status " +
                    to_string(sol.status) + ", incumbent " + (sol.has_solution() ? fmt(sol.objective) : "none") +
                    ", bound " + fmt(sol.bound) + ", " + fmt(sol.wall_time, 3) + " s" +
                    (rows_ok ? ", incumbent passes the row check" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                           criterion5, criterion6, criterion7, criterion8,
                                                           criterion9, criterion10};
  std::set<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.insert(std::atoi(argv[a]));
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int number = static_cast<int>(c) + 1;
    if (!wanted.empty() && !wanted.count(number)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << number << ": " << (o.pass ? "PASS" : "FAIL") << " [" << fmt(since(t0), 3)
              << " s] " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
