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


#include "metrott/warm_start.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <tuple>

#include "metrott/solver.hpp"

namespace metrott {
namespace {

constexpr double kTimeTolerance = 1e-9;

std::size_t at(int i) { return static_cast<std::size_t>(i); }

std::optional<std::vector<ServicePlan>> direction_plans(const ModelConfig& cfg, const LineTopology& topo,
                                                        Direction dir, const RegularPattern& pattern) {
  const int services = cfg.services(dir);
  const int count = std::clamp(pattern.count, 1, std::max(1, services));
  const auto stations = topo.stations_of(dir);
  const std::size_t n = stations.size();
  const int first = topo.first_station(dir);
  const Zone full{first, topo.last_station(dir)};
  const bool peak = cfg.mode == OperatingMode::kPeak;
  const RunProfile ref = tight_profile(topo, dir, std::vector<bool>(n, true), 0.0);
  const int limit_pos = topo.short_turn_start(dir) - first;
  const double last = cfg.last_departure(dir);

  std::vector<ServicePlan> plans;
  for (int k = 1; k <= services; ++k) {
    ServicePlan plan;
    plan.id = ServiceId{dir, k};
    plan.stops.assign(n, false);
    if (k <= count) {
      plan.selected = true;
      plan.zone = (k % 2 == 0 && pattern.alternate) ? *pattern.alternate : full;
      const double offset = cfg.first_departure(dir) + (k - 1) * pattern.headway;
      plan.departure.resize(n);
      for (std::size_t q = 0; q < n; ++q) {
        plan.stops[q] = plan.zone.contains(stations[q]);
        plan.departure[q] = ref.departure[q] + offset;
      }
      if (plan.departure[0] > last + kTimeTolerance || plan.departure[at(limit_pos)] > last + kTimeTolerance) {
        return std::nullopt;
      }
    } else {
      plan.departure = plans.back().departure;
    }
    plan.arrival.resize(n);
    plan.arrival[0] = plan.departure[0] - (plan.stops[0] || !peak ? topo.dwell_time(stations[0]) : 0.0);
    for (std::size_t q = 1; q < n; ++q) {
      const int i = stations[q];
      if (peak) {
        double run = topo.pure_run_time(i);
        if (plan.stops[q - 1]) run += topo.accel_penalty();
        if (plan.stops[q]) run += topo.decel_penalty();
        plan.arrival[q] = plan.departure[q - 1] + run;
      } else {
        plan.arrival[q] = plan.departure[q] - topo.dwell_time(i);
      }
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

// Links services ending at m to services of the other direction starting at
// the paired station, earliest ready train first.
void link(const LineTopology& topo, std::vector<ServicePlan>& from, std::vector<ServicePlan>& to, int m) {
  const Direction dir = topo.direction_of(m);
  const int p = topo.paired_station(m);
  const int m_pos = m - topo.first_station(dir);
  const int p_pos = p - topo.first_station(opposite(dir));
  const double delta = topo.min_turnaround(m);
  std::vector<std::pair<double, std::size_t>> ready;
  std::vector<std::pair<double, std::size_t>> starts;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i].selected && from[i].zone.end == m) ready.emplace_back(from[i].departure[at(m_pos)] + delta, i);
  }
  for (std::size_t i = 0; i < to.size(); ++i) {
    if (to[i].selected && to[i].zone.start == p) starts.emplace_back(to[i].arrival[at(p_pos)], i);
  }
  std::sort(ready.begin(), ready.end());
  std::sort(starts.begin(), starts.end());
  std::deque<std::size_t> pool;
  std::size_t next = 0;
  for (const auto& [start, li] : starts) {
    while (next < ready.size() && ready[next].first <= start + kTimeTolerance) pool.push_back(ready[next++].second);
    if (pool.empty()) continue;
    const std::size_t ki = pool.front();
    pool.pop_front();
    from[ki].sink = Handover{std::nullopt, to[li].id, m};
    to[li].source = Handover{std::nullopt, from[ki].id, m};
  }
}

struct Candidate {
  RegularPattern up;
  RegularPattern down;
  int links = 0;
  int selected = 0;
};

std::vector<RegularPattern> patterns(const ModelConfig& cfg, const LineTopology& topo, Direction dir) {
  const auto zones = operation_zones(topo, dir);
  std::vector<std::optional<Zone>> alternates{std::nullopt};
  for (std::size_t z = 1; z < zones.size(); ++z) alternates.emplace_back(zones[z]);
  const auto stations = topo.stations_of(dir);
  const RunProfile ref = tight_profile(topo, dir, std::vector<bool>(stations.size(), true), 0.0);
  const double lead = ref.departure[at(topo.short_turn_start(dir) - topo.first_station(dir))];
  const double room = cfg.last_departure(dir) - cfg.first_departure(dir) - lead;

  std::vector<RegularPattern> out;
  out.push_back(RegularPattern{1, std::nullopt, cfg.h_min});
  for (int count = 2; count <= cfg.services(dir); ++count) {
    std::vector<double> headways{cfg.h_min, 0.5 * (cfg.h_min + cfg.h_max), cfg.h_max};
    const double fit = room / (count - 1);
    if (fit >= cfg.h_min && fit <= cfg.h_max) headways.push_back(fit);
    for (double h : headways) {
      for (const auto& alt : alternates) out.push_back(RegularPattern{count, alt, h});
    }
  }
  return out;
}

}  // namespace

std::optional<Timetable> regular_timetable(const ModelConfig& cfg, const LineTopology& topo,
                                           const RegularPattern& up, const RegularPattern& down) {
  auto ups = direction_plans(cfg, topo, Direction::kUp, up);
  auto downs = direction_plans(cfg, topo, Direction::kDown, down);
  if (!ups || !downs) return std::nullopt;
  std::vector<int> ends_up;
  std::vector<int> ends_down;
  for (const Zone& zone : operation_zones(topo, Direction::kUp)) ends_up.push_back(zone.end);
  for (const Zone& zone : operation_zones(topo, Direction::kDown)) ends_down.push_back(zone.end);
  for (auto* ends : {&ends_up, &ends_down}) {
    std::sort(ends->begin(), ends->end());
    ends->erase(std::unique(ends->begin(), ends->end()), ends->end());
  }
  for (int m : ends_up) link(topo, *ups, *downs, m);
  for (int m : ends_down) link(topo, *downs, *ups, m);

  int pulled_out = 0;
  for (auto* plans : {&*ups, &*downs}) {
    for (ServicePlan& plan : *plans) {
      if (!plan.selected) continue;
      const Direction dir = plan.id.direction;
      const auto roles = depot_roles(dir);
      if (!plan.source.service) {
        ++pulled_out;
        const bool terminal = plan.zone.start == topo.first_station(dir);
        plan.source = Handover{terminal ? roles.sources[0] : roles.sources[1], std::nullopt, plan.zone.start};
      }
      if (!plan.sink.service) {
        const bool terminal = plan.zone.end == topo.last_station(dir);
        plan.sink = Handover{terminal ? roles.sinks[0] : roles.sinks[1], std::nullopt, plan.zone.end};
      }
    }
  }
  if (pulled_out > cfg.fleet_size) return std::nullopt;

  // Number trains along their chains, earliest pull-out first.
  std::vector<ServicePlan*> all;
  for (auto* plans : {&*ups, &*downs}) {
    for (ServicePlan& plan : *plans) all.push_back(&plan);
  }
  std::vector<ServicePlan*> heads;
  for (ServicePlan* plan : all) {
    if (plan->selected && plan->source.depot) heads.push_back(plan);
  }
  std::sort(heads.begin(), heads.end(), [](const ServicePlan* a, const ServicePlan* b) {
    return std::tie(a->departure[0], a->id) < std::tie(b->departure[0], b->id);
  });
  auto find = [&](ServiceId id) {
    for (ServicePlan* plan : all) {
      if (plan->id == id) return plan;
    }
    return static_cast<ServicePlan*>(nullptr);
  };
  int train = 0;
  for (ServicePlan* plan : heads) {
    ++train;
    for (ServicePlan* cur = plan; cur != nullptr;) {
      cur->train = train;
      cur = cur->sink.service ? find(*cur->sink.service) : nullptr;
    }
  }

  Timetable out(topo.stations_per_direction());
  for (auto* plans : {&*ups, &*downs}) {
    for (ServicePlan& plan : *plans) out.add(std::move(plan));
  }
  return out;
}

std::optional<std::vector<double>> construct_start(const MilpInstance& instance,
                                                   const ModelConfig& cfg, const LineTopology& topo,
                                                   const WarmStartOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const bool maximize = instance.objective().sense == ObjSense::kMaximize;

  std::vector<Candidate> ranked;
  const auto ups = patterns(cfg, topo, Direction::kUp);
  const auto downs = patterns(cfg, topo, Direction::kDown);
  for (const RegularPattern& up : ups) {
    for (const RegularPattern& down : downs) {
      const auto timetable = regular_timetable(cfg, topo, up, down);
      if (!timetable) continue;
      Candidate c{up, down, 0, 0};
      for (const ServicePlan& plan : timetable->services()) {
        if (!plan.selected) continue;
        ++c.selected;
        if (plan.sink.service) ++c.links;
      }
      ranked.push_back(c);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [&](const Candidate& a, const Candidate& b) {
    if (maximize) return std::tie(b.links, b.selected) < std::tie(a.links, a.selected);
    return std::tie(a.selected, b.links) < std::tie(b.selected, a.links);
  });

  // One candidate per combination of service counts and headways.
  std::vector<Candidate> distinct;
  for (const Candidate& c : ranked) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const Candidate& d) {
      return d.up.count == c.up.count && d.down.count == c.down.count && d.up.headway == c.up.headway &&
             d.down.headway == c.down.headway;
    });
    if (!seen) distinct.push_back(c);
  }
  ranked.swap(distinct);

  std::optional<std::vector<double>> best;
  double best_z = 0.0;
  int completed = 0;
  const int attempts = 3 * std::max(1, options.candidates);
  for (int i = 0; i < attempts && i < static_cast<int>(ranked.size()) && completed < options.candidates; ++i) {
    const double left = options.time_limit - elapsed();
    if (left <= 0.0) break;
    const auto timetable = regular_timetable(cfg, topo, ranked[at(i)].up, ranked[at(i)].down);
    const MilpInstance fixed = fix_to_timetable(instance, *timetable, topo);
    SolverOptions sub;
    sub.time_limit = left / std::max(1, options.candidates - completed);
    const MilpSolution sol = solve(fixed, sub);
    if (!sol.has_solution() || !instance.violations(sol.values, sub.feasibility_tolerance).empty()) continue;
    ++completed;
    const double z = instance.evaluate(instance.objective(), sol.values);
    if (!best || (maximize ? z > best_z : z < best_z)) {
      best = sol.values;
      best_z = z;
    }
  }
  return best;
}

}  // namespace metrott
