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

#include "metrott/timetable.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "metrott/error.hpp"

namespace metrott {
namespace {

constexpr double kOn = 0.5;

std::string fmt(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

bool on(std::span<const double> values, int index) { return values[static_cast<std::size_t>(index)] > kOn; }

int count_services(const MilpInstance& instance, Direction dir) {
  int k = 0;
  while (instance.find_variable(names::tau(ServiceId{dir, k + 1}))) ++k;
  return k;
}

void fix(MilpInstance& instance, const std::string& name, double value) {
  if (auto idx = instance.find_variable(name)) instance.set_bounds(*idx, value, value);
}

void assign_trains(Timetable& timetable, std::vector<ServicePlan>& plans) {
  std::map<ServiceId, std::size_t> where;
  for (std::size_t i = 0; i < plans.size(); ++i) where[plans[i].id] = i;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (plans[i].selected && !plans[i].source.service) starts.push_back(i);
  }
  auto start_time = [&](std::size_t i) {
    const ServicePlan& p = plans[i];
    return p.departure[static_cast<std::size_t>(timetable.position(p.zone.start))];
  };
  std::stable_sort(starts.begin(), starts.end(), [&](std::size_t lhs, std::size_t rhs) {
    const double tl = start_time(lhs);
    const double tr = start_time(rhs);
    if (tl != tr) return tl < tr;
    return plans[lhs].id < plans[rhs].id;
  });
  int train = 0;
  for (std::size_t s : starts) {
    ++train;
    std::size_t cur = s;
    std::set<std::size_t> seen;
    while (seen.insert(cur).second) {
      plans[cur].train = train;
      if (!plans[cur].sink.service) break;
      auto it = where.find(*plans[cur].sink.service);
      if (it == where.end()) break;
      cur = it->second;
    }
  }
}

}  // namespace

Timetable::Timetable(int stations_per_direction) : n_(stations_per_direction) {
  if (n_ < 2) raise(ErrorCode::kLineTooShort, "a timetable needs at least two stations per direction");
}

int Timetable::position(int station) const {
  if (station < 1 || station > 2 * n_) {
    raise(ErrorCode::kUnknownStation, "station " + std::to_string(station) + " is not on the line");
  }
  return station <= n_ ? station - 1 : station - n_ - 1;
}

void Timetable::add(ServicePlan plan) {
  const auto n = static_cast<std::size_t>(n_);
  if (plan.arrival.size() != n || plan.departure.size() != n || plan.stops.size() != n) {
    raise(ErrorCode::kInvalidArgument, "service " + plan.id.name() + " needs one entry per station");
  }
  if (contains(plan.id)) raise(ErrorCode::kInvalidArgument, "duplicate service " + plan.id.name());
  services_.push_back(std::move(plan));
  std::stable_sort(services_.begin(), services_.end(),
                   [](const ServicePlan& l, const ServicePlan& r) { return l.id < r.id; });
}

std::vector<const ServicePlan*> Timetable::services(Direction direction) const {
  std::vector<const ServicePlan*> out;
  for (const auto& s : services_) {
    if (s.id.direction == direction) out.push_back(&s);
  }
  return out;
}

bool Timetable::contains(ServiceId id) const {
  return std::any_of(services_.begin(), services_.end(), [&](const ServicePlan& s) { return s.id == id; });
}

const ServicePlan& Timetable::service(ServiceId id) const {
  for (const auto& s : services_) {
    if (s.id == id) return s;
  }
  raise(ErrorCode::kInvalidArgument, "unknown service " + id.name());
}

double Timetable::arrival(ServiceId id, int station) const {
  return service(id).arrival[static_cast<std::size_t>(position(station))];
}

double Timetable::departure(ServiceId id, int station) const {
  return service(id).departure[static_cast<std::size_t>(position(station))];
}

bool Timetable::stops(ServiceId id, int station) const {
  return service(id).stops[static_cast<std::size_t>(position(station))];
}

Timetable extract_timetable(const MilpInstance& instance, std::span<const double> values,
                            const LineTopology& topo) {
  if (values.size() != static_cast<std::size_t>(instance.num_variables())) {
    raise(ErrorCode::kInvalidArgument, "assignment size does not match the instance");
  }
  Timetable out(topo.stations_per_direction());
  std::vector<ServicePlan> plans;
  std::map<ServiceId, std::size_t> where;
  for (Direction dir : kDirections) {
    const int count = count_services(instance, dir);
    const auto stations = topo.stations_of(dir);
    const auto zones = operation_zones(topo, dir);
    const auto roles = depot_roles(dir);
    for (int kk = 1; kk <= count; ++kk) {
      const ServiceId k{dir, kk};
      ServicePlan plan;
      plan.id = k;
      plan.selected = on(values, instance.variable_index(names::tau(k)));
      for (int i : stations) {
        plan.arrival.push_back(values[static_cast<std::size_t>(instance.variable_index(names::a(k, i)))]);
        plan.departure.push_back(values[static_cast<std::size_t>(instance.variable_index(names::d(k, i)))]);
        plan.stops.push_back(plan.selected && on(values, instance.variable_index(names::x(k, i))));
      }
      if (plan.selected) {
        for (const Zone& zone : zones) {
          if (on(values, instance.variable_index(names::z(k, zone.start, zone.end)))) plan.zone = zone;
        }
        for (int dp : roles.sources) {
          if (on(values, instance.variable_index(names::alpha(k, dp)))) plan.source.depot = dp;
        }
        for (int dp : roles.sinks) {
          if (on(values, instance.variable_index(names::beta(k, dp)))) plan.sink.depot = dp;
        }
      }
      where[k] = plans.size();
      plans.push_back(std::move(plan));
    }
  }
  for (Direction dir : kDirections) {
    const Direction back = opposite(dir);
    const int kd = count_services(instance, dir);
    const int kb = count_services(instance, back);
    const auto ts = topo.turnaround_stations(dir);
    for (int kk = 1; kk <= kd; ++kk) {
      for (int ll = 1; ll <= kb; ++ll) {
        const ServiceId k{dir, kk};
        const ServiceId l{back, ll};
        for (int m : ts) {
          auto idx = instance.find_variable(names::y(k, l, m));
          if (!idx || !on(values, *idx)) continue;
          plans[where[k]].sink.service = l;
          plans[where[k]].sink.station = m;
          plans[where[l]].source.service = k;
          plans[where[l]].source.station = m;
        }
      }
    }
  }
  assign_trains(out, plans);
  for (auto& p : plans) out.add(std::move(p));
  return out;
}

MilpInstance fix_to_timetable(const MilpInstance& instance, const Timetable& timetable,
                              const LineTopology& topo) {
  MilpInstance fixed = instance;
  for (const ServicePlan& plan : timetable.services()) {
    const ServiceId k = plan.id;
    const Direction dir = k.direction;
    fix(fixed, names::tau(k), plan.selected ? 1.0 : 0.0);
    for (const Zone& zone : operation_zones(topo, dir)) {
      const bool chosen = plan.selected && plan.zone.start == zone.start && plan.zone.end == zone.end;
      fix(fixed, names::z(k, zone.start, zone.end), chosen ? 1.0 : 0.0);
    }
    const auto roles = depot_roles(dir);
    for (int dp : roles.sources) fix(fixed, names::alpha(k, dp), plan.source.depot == dp ? 1.0 : 0.0);
    for (int dp : roles.sinks) fix(fixed, names::beta(k, dp), plan.sink.depot == dp ? 1.0 : 0.0);
    const auto stations = topo.stations_of(dir);
    for (std::size_t p = 0; p < stations.size(); ++p) {
      fix(fixed, names::x(k, stations[p]), plan.stops[p] ? 1.0 : 0.0);
      fix(fixed, names::a(k, stations[p]), plan.arrival[p]);
      fix(fixed, names::d(k, stations[p]), plan.departure[p]);
    }
    if (k.index >= 2 && timetable.contains(ServiceId{dir, k.index - 1})) {
      const double h = plan.departure[0] - timetable.service(ServiceId{dir, k.index - 1}).departure[0];
      fix(fixed, names::h(k), h);
    }
    for (const ServicePlan* other : timetable.services(opposite(dir))) {
      for (int m : topo.turnaround_stations(dir)) {
        const bool linked = plan.sink.service == other->id && plan.sink.station == m;
        fix(fixed, names::y(k, other->id, m), linked ? 1.0 : 0.0);
      }
    }
  }
  return fixed;
}

double finish_time(const Timetable& timetable) {
  double latest = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const ServicePlan& plan : timetable.services()) {
    if (!plan.selected) continue;
    any = true;
    latest = std::max(latest, plan.arrival[static_cast<std::size_t>(timetable.position(plan.zone.end))]);
  }
  if (!any) raise(ErrorCode::kInfeasibleTimetable, "timetable has no selected service");
  return latest;
}

void write_timetable_csv(std::ostream& out, const Timetable& timetable) {
  out << "service,station,arrival,departure,stops\n";
  for (const ServicePlan& plan : timetable.services()) {
    const int first = timetable.first_station(plan.id.direction);
    for (std::size_t p = 0; p < plan.arrival.size(); ++p) {
      out << plan.id.name() << ',' << first + static_cast<int>(p) << ',' << fmt(plan.arrival[p]) << ','
          << fmt(plan.departure[p]) << ',' << (plan.stops[p] ? 1 : 0) << '\n';
    }
  }
}

Timetable read_timetable_csv(std::istream& in, int stations_per_direction) {
  Timetable out(stations_per_direction);
  const auto n = static_cast<std::size_t>(stations_per_direction);
  std::map<ServiceId, ServicePlan> plans;
  std::map<ServiceId, std::vector<bool>> seen;
  std::string line;
  int line_no = 0;
  bool header = false;
  auto fail = [&](const std::string& what) {
    raise(ErrorCode::kParseError, "timetable line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "service,station,arrival,departure,stops") fail("unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) fail("expected 5 columns");
    auto id = ServiceId::parse(cells[0]);
    if (!id) fail("bad service '" + cells[0] + "'");
    auto number = [&](const std::string& text, double& value) {
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        fail("bad number '" + text + "'");
      }
    };
    double station_value = 0.0;
    double arrival = 0.0;
    double departure = 0.0;
    number(cells[1], station_value);
    number(cells[2], arrival);
    number(cells[3], departure);
    if (cells[4] != "0" && cells[4] != "1") fail("stops must be 0 or 1");
    const int station = static_cast<int>(station_value);
    if (station != station_value || station < 1 || station > 2 * stations_per_direction) {
      fail("bad station '" + cells[1] + "'");
    }
    const Direction dir = station <= stations_per_direction ? Direction::kUp : Direction::kDown;
    if (dir != id->direction) fail("station " + cells[1] + " is not on the direction of " + cells[0]);
    auto& plan = plans[*id];
    auto& mark = seen[*id];
    if (plan.arrival.empty()) {
      plan.id = *id;
      plan.arrival.assign(n, 0.0);
      plan.departure.assign(n, 0.0);
      plan.stops.assign(n, false);
      mark.assign(n, false);
    }
    const auto p = static_cast<std::size_t>(out.position(station));
    if (mark[p]) fail("duplicate row for " + cells[0] + " at station " + cells[1]);
    mark[p] = true;
    plan.arrival[p] = arrival;
    plan.departure[p] = departure;
    plan.stops[p] = cells[4] == "1";
  }
  if (!header) raise(ErrorCode::kParseError, "timetable is empty");
  for (auto& [id, plan] : plans) {
    const auto& mark = seen[id];
    if (std::find(mark.begin(), mark.end(), false) != mark.end()) {
      raise(ErrorCode::kParseError, "timetable misses stations of service " + id.name());
    }
    const int first = out.first_station(id.direction);
    for (std::size_t p = 0; p < n; ++p) {
      if (!plan.stops[p]) continue;
      if (!plan.selected) plan.zone.start = first + static_cast<int>(p);
      plan.selected = true;
      plan.zone.end = first + static_cast<int>(p);
    }
    out.add(std::move(plan));
  }
  return out;
}

RunProfile tight_profile(const LineTopology& topo, Direction direction,
                         const std::vector<bool>& stops, double first_departure) {
  const auto stations = topo.stations_of(direction);
  if (stops.size() != stations.size()) {
    raise(ErrorCode::kInvalidArgument, "stop pattern needs one entry per station");
  }
  RunProfile out;
  out.arrival.resize(stations.size());
  out.departure.resize(stations.size());
  out.departure[0] = first_departure;
  out.arrival[0] = first_departure - (stops[0] ? topo.dwell_time(stations[0]) : 0.0);
  for (std::size_t p = 1; p < stations.size(); ++p) {
    const int i = stations[p];
    double run = topo.pure_run_time(i);
    if (stops[p - 1]) run += topo.accel_penalty();
    if (stops[p]) run += topo.decel_penalty();
    out.arrival[p] = out.departure[p - 1] + run;
    out.departure[p] = out.arrival[p] + (stops[p] ? topo.dwell_time(i) : 0.0);
  }
  return out;
}

double skip_saving(const LineTopology& topo, const Zone& zone, const std::vector<bool>& stops) {
  const Direction dir = topo.direction_of(zone.start);
  const int first = topo.first_station(dir);
  if (stops.size() != static_cast<std::size_t>(topo.stations_per_direction())) {
    raise(ErrorCode::kInvalidArgument, "stop pattern needs one entry per station");
  }
  double saved = 0.0;
  for (int i = zone.start + 1; i < zone.end; ++i) {
    if (stops[static_cast<std::size_t>(i - first)]) continue;
    saved += topo.dwell_time(i) + topo.accel_penalty() + topo.decel_penalty();
  }
  return saved;
}

}  // namespace metrott
