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

#include "metrott/model.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numeric>

#include "metrott/error.hpp"

namespace metrott {
namespace {

std::string bracket(std::initializer_list<std::string> parts) {
  std::string out;
  for (const std::string& p : parts) {
    out += '[';
    out += p;
    out += ']';
  }
  return out;
}

std::string row_name(std::string_view fam, std::string_view rule,
                     std::initializer_list<std::string> idx) {
  std::string out(fam);
  out += '.';
  out += rule;
  out += bracket(idx);
  return out;
}

std::string str(int v) { return std::to_string(v); }

Constraint make_row(std::string name, std::vector<Term> terms, RowSense sense, double rhs) {
  Constraint c;
  c.name = std::move(name);
  c.terms = std::move(terms);
  c.sense = sense;
  c.rhs = rhs;
  return c;
}

constexpr RowSense kLe = RowSense::kLessEqual;
constexpr RowSense kEq = RowSense::kEqual;
constexpr RowSense kGe = RowSense::kGreaterEqual;

double max_dwell(const LineTopology& topo, Direction dir) {
  double out = 0.0;
  for (int i : topo.stations_of(dir)) out = std::max(out, topo.dwell_time(i));
  return out;
}

// Longest time a stopping-everywhere service needs from its first departure
// to its last departure.
double full_span(const LineTopology& topo, Direction dir) {
  double out = 0.0;
  const int first = topo.first_station(dir);
  for (int i : topo.stations_of(dir)) {
    if (i != first) out += topo.running_time(i);
    out += topo.dwell_time(i);
  }
  return out;
}

double time_upper(const ModelConfig& cfg, const LineTopology& topo, Direction dir) {
  return cfg.last_departure(dir) + full_span(topo, dir);
}

double time_lower(const ModelConfig& cfg, const LineTopology& topo, Direction dir) {
  return cfg.first_departure(dir) - max_dwell(topo, dir);
}

// Departure-to-departure time between stations m < n of one service.
double stopping_travel(const LineTopology& topo, int m, int n) {
  double out = 0.0;
  for (int i = m + 1; i <= n; ++i) out += topo.running_time(i) + topo.dwell_time(i);
  return out;
}

double pure_travel(const LineTopology& topo, int m, int n) {
  double out = 0.0;
  for (int i = m + 1; i <= n; ++i) out += topo.pure_run_time(i);
  return out;
}

}  // namespace

std::string to_string(OperatingMode mode) {
  return mode == OperatingMode::kOffPeak ? "off_peak" : "peak";
}

std::string to_string(ObjectiveKind objective) {
  switch (objective) {
    case ObjectiveKind::kCost: return "cost";
    case ObjectiveKind::kQuality: return "quality";
    case ObjectiveKind::kBiObjective: return "bi_objective";
  }
  return "cost";
}

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::k1a: return "1a";
    case ModelId::k1b: return "1b";
    case ModelId::k2a: return "2a";
    case ModelId::k2b: return "2b";
    case ModelId::k3a: return "3a";
    case ModelId::k3b: return "3b";
  }
  return "1a";
}

std::optional<ModelId> parse_model_id(std::string_view text) {
  for (ModelId id : {ModelId::k1a, ModelId::k1b, ModelId::k2a, ModelId::k2b, ModelId::k3a,
                     ModelId::k3b}) {
    if (text == to_string(id)) return id;
  }
  return std::nullopt;
}

OperatingMode mode_of(ModelId id) {
  switch (id) {
    case ModelId::k1b:
    case ModelId::k2b:
    case ModelId::k3b: return OperatingMode::kPeak;
    default: return OperatingMode::kOffPeak;
  }
}

ObjectiveKind objective_of(ModelId id) {
  switch (id) {
    case ModelId::k1a:
    case ModelId::k1b: return ObjectiveKind::kCost;
    case ModelId::k2a:
    case ModelId::k2b: return ObjectiveKind::kQuality;
    default: return ObjectiveKind::kBiObjective;
  }
}

void ModelConfig::validate() const {
  if (services_up < 1 || services_down < 1) {
    raise(ErrorCode::kConfigMismatch, "at least one potential service per direction is required");
  }
  if (!(h_min > 0.0) || !(h_min <= h_max)) {
    raise(ErrorCode::kConfigMismatch, "headway bounds must satisfy 0 < h_min <= h_max");
  }
  for (Direction dir : kDirections) {
    if (!(first_departure(dir) < last_departure(dir))) {
      raise(ErrorCode::kConfigMismatch,
            "first departure must precede the last-departure bound (" + std::string(to_string(dir)) + ")");
    }
  }
  if (!(capacity > 0.0)) raise(ErrorCode::kNonPositiveCapacity, "train capacity must be positive");
  if (fleet_size < 1) raise(ErrorCode::kConfigMismatch, "fleet size must be at least 1");
  if (max_skips < 0) raise(ErrorCode::kConfigMismatch, "skip cap must be non-negative");
  if (!(initial_accumulation >= 0.0)) {
    raise(ErrorCode::kConfigMismatch, "initial accumulation must be non-negative");
  }
}

void ModelConfig::validate_against(const LineTopology& topo) const {
  validate();
  if (big_m) {
    for (Direction dir : kDirections) {
      if (*big_m < time_upper(*this, topo, dir)) {
        raise(ErrorCode::kConfigMismatch,
              "big_M must be at least the last departure plus the full-line travel time");
      }
    }
  }
}

ModelConfig configure(ModelConfig base, ModelId id) {
  base.mode = mode_of(id);
  base.objective = objective_of(id);
  return base;
}

std::vector<Zone> operation_zones(const LineTopology& topo, Direction direction) {
  const int first = topo.first_station(direction);
  const int last = topo.last_station(direction);
  const int s = topo.short_turn_start(direction);
  const int e = topo.short_turn_end(direction);
  return {Zone{first, last}, Zone{first, e}, Zone{s, last}, Zone{s, e}};
}

DepotRoles depot_roles(Direction direction) {
  if (direction == Direction::kUp) return DepotRoles{{1, 3}, {2, 4}};
  return DepotRoles{{2, 4}, {1, 3}};
}

namespace names {
std::string tau(ServiceId k) { return "tau" + bracket({k.name()}); }
std::string z(ServiceId k, int m, int n) { return "z" + bracket({k.name(), str(m), str(n)}); }
std::string x(ServiceId k, int i) { return "x" + bracket({k.name(), str(i)}); }
std::string y(ServiceId k, ServiceId l, int m) {
  return "y" + bracket({k.name(), l.name(), str(m)});
}
std::string alpha(ServiceId k, int depot) { return "alpha" + bracket({k.name(), str(depot)}); }
std::string beta(ServiceId k, int depot) { return "beta" + bracket({k.name(), str(depot)}); }
std::string h(ServiceId k) { return "h" + bracket({k.name()}); }
std::string a(ServiceId k, int i) { return "a" + bracket({k.name(), str(i)}); }
std::string d(ServiceId k, int i) { return "d" + bracket({k.name(), str(i)}); }
std::string rs(int depot) { return "RS" + bracket({str(depot)}); }
std::string w(ServiceId k, int i, int j) { return "w" + bracket({k.name(), str(i), str(j)}); }
std::string and_indicator(ServiceId k, int i, int j) {
  return "and" + bracket({k.name(), str(i), str(j)});
}
std::string wb(ServiceId k, int i, int j) { return "wb" + bracket({k.name(), str(i), str(j)}); }
std::string nb(ServiceId k, int i, int j) { return "nb" + bracket({k.name(), str(i), str(j)}); }
std::string v(ServiceId k, int i, int j) { return "v" + bracket({k.name(), str(i), str(j)}); }
std::string wb(ServiceId k, int i) { return "wb" + bracket({k.name(), str(i)}); }
std::string nb(ServiceId k, int i) { return "nb" + bracket({k.name(), str(i)}); }
std::string na(ServiceId k, int i) { return "na" + bracket({k.name(), str(i)}); }
std::string n(ServiceId k, int i) { return "n" + bracket({k.name(), str(i)}); }
std::string min_indicator(ServiceId k, int i) { return "minsel" + bracket({k.name(), str(i)}); }
std::string tt(ServiceId k, int m, int n) { return "tt" + bracket({k.name(), str(m), str(n)}); }
}  // namespace names

VariableCatalog VariableCatalog::declare(const ModelConfig& cfg, const LineTopology& topo,
                                         const OdMatrix& od, MilpInstance& instance) {
  cfg.validate_against(topo);
  if (od.stations_per_direction() != topo.stations_per_direction()) {
    raise(ErrorCode::kConfigMismatch, "demand matrix and topology disagree on the line length");
  }
  for (Direction dir : kDirections) {
    const auto ts = topo.turnaround_stations(dir);
    for (std::size_t t = 1; t < ts.size(); ++t) {
      if (ts[t] <= ts[t - 1]) {
        raise(ErrorCode::kConfigMismatch, "four distinct turnaround stations per direction required");
      }
    }
  }

  VariableCatalog cat;
  cat.instance_ = &instance;
  cat.n_ = topo.stations_per_direction();
  cat.k_up_ = cfg.services_up;
  cat.k_dn_ = cfg.services_down;
  cat.handover_up_ = {topo.short_turn_end(Direction::kUp), topo.last_station(Direction::kUp)};
  cat.handover_dn_ = {topo.short_turn_end(Direction::kDown), topo.last_station(Direction::kDown)};
  const int total = topo.station_count();
  cat.stream_bound_.assign(static_cast<std::size_t>(total * total), 0.0);
  cat.station_bound_.assign(static_cast<std::size_t>(total), 0.0);

  constexpr auto kBin = VarKind::kBinary;
  constexpr auto kCont = VarKind::kContinuous;

  for (Direction dir : kDirections) {
    const int di = static_cast<int>(dir);
    cat.zones_[static_cast<std::size_t>(di)] = operation_zones(topo, dir);
    cat.pairs_[static_cast<std::size_t>(di)] = od.active_pairs(dir);
    const double accumulation_span =
        cfg.initial_accumulation +
        std::min(cfg.last_departure(dir) - cfg.first_departure(dir),
                 static_cast<double>(cfg.services(dir) - 1) * cfg.h_max);
    for (const auto& [i, j] : cat.pairs_[static_cast<std::size_t>(di)]) {
      const double bound = od.rate(i, j) * accumulation_span;
      cat.stream_bound_[static_cast<std::size_t>((i - 1) * total + (j - 1))] = bound;
      cat.station_bound_[static_cast<std::size_t>(i - 1)] += bound;
    }
  }

  for (Direction dir : kDirections) {
    const auto& zones = cat.zones(dir);
    const auto roles = depot_roles(dir);
    const double lo_d = cfg.first_departure(dir);
    const double lo_a = time_lower(cfg, topo, dir);
    const double hi = time_upper(cfg, topo, dir);
    for (ServiceId k : cat.services(dir)) {
      instance.add_variable(names::tau(k), kBin, 0.0, 1.0);
      for (const Zone& zone : zones) instance.add_variable(names::z(k, zone.start, zone.end), kBin, 0.0, 1.0);
      for (int i : topo.stations_of(dir)) instance.add_variable(names::x(k, i), kBin, 0.0, 1.0);
      for (int dp : roles.sources) instance.add_variable(names::alpha(k, dp), kBin, 0.0, 1.0);
      for (int dp : roles.sinks) instance.add_variable(names::beta(k, dp), kBin, 0.0, 1.0);
      if (k.index >= 2) instance.add_variable(names::h(k), kCont, 0.0, cfg.h_max);
      for (int i : topo.stations_of(dir)) {
        instance.add_variable(names::a(k, i), kCont, lo_a, hi);
        instance.add_variable(names::d(k, i), kCont, lo_d, hi);
      }
    }
  }

  for (Direction dir : kDirections) {
    for (ServiceId k : cat.services(dir)) {
      for (ServiceId l : cat.services(opposite(dir))) {
        for (int m : cat.handover_stations(dir)) {
          instance.add_variable(names::y(k, l, m), kBin, 0.0, 1.0);
        }
      }
    }
  }
  for (int dp = 1; dp <= 4; ++dp) {
    instance.add_variable(names::rs(dp), kCont, 0.0, static_cast<double>(cfg.fleet_size));
  }

  for (Direction dir : kDirections) {
    const auto& pairs = cat.active_pairs(dir);
    for (ServiceId k : cat.services(dir)) {
      for (const auto& [i, j] : pairs) {
        const double bound = cat.stream_bound(i, j);
        instance.add_variable(names::w(k, i, j), kCont, 0.0, bound);
        instance.add_variable(names::and_indicator(k, i, j), kCont, 0.0, 1.0);
        instance.add_variable(names::wb(k, i, j), kCont, 0.0, bound);
        instance.add_variable(names::nb(k, i, j), kCont, 0.0, bound);
        instance.add_variable(names::v(k, i, j), kCont, 0.0, bound);
      }
      for (int i : topo.stations_of(dir)) {
        if (cat.has_outgoing(i)) {
          const double bound = cat.station_stream_bound(i);
          instance.add_variable(names::wb(k, i), kCont, 0.0, bound);
          instance.add_variable(names::nb(k, i), kCont, 0.0, std::min(bound, cfg.capacity));
          instance.add_variable(names::min_indicator(k, i), kBin, 0.0, 1.0);
        }
        instance.add_variable(names::na(k, i), kCont, 0.0, cfg.capacity);
        instance.add_variable(names::n(k, i), kCont, 0.0, cfg.capacity);
      }
    }
  }

  if (cfg.objective != ObjectiveKind::kCost) {
    for (Direction dir : kDirections) {
      for (ServiceId k : cat.services(dir)) {
        if (k.index < 2) continue;
        for (const Zone& zone : cat.zones(dir)) {
          instance.add_variable(names::tt(k, zone.start, zone.end), kCont, 0.0,
                                time_upper(cfg, topo, dir) - cfg.first_departure(dir) + cfg.h_max);
        }
      }
    }
  }
  return cat;
}

std::vector<ServiceId> VariableCatalog::services(Direction direction) const {
  const int count = direction == Direction::kUp ? k_up_ : k_dn_;
  std::vector<ServiceId> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) out.push_back(ServiceId{direction, k});
  return out;
}

const std::vector<Zone>& VariableCatalog::zones(Direction direction) const {
  return zones_[static_cast<std::size_t>(direction)];
}

const std::vector<std::pair<int, int>>& VariableCatalog::active_pairs(Direction direction) const {
  return pairs_[static_cast<std::size_t>(direction)];
}

bool VariableCatalog::has_outgoing(int station) const {
  return station_bound_.at(static_cast<std::size_t>(station - 1)) > 0.0;
}

double VariableCatalog::stream_bound(int origin, int destination) const {
  return stream_bound_.at(static_cast<std::size_t>((origin - 1) * 2 * n_ + (destination - 1)));
}

double VariableCatalog::station_stream_bound(int origin) const {
  return station_bound_.at(static_cast<std::size_t>(origin - 1));
}

std::array<int, 2> VariableCatalog::handover_stations(Direction direction) const {
  return direction == Direction::kUp ? handover_up_ : handover_dn_;
}

int VariableCatalog::lookup(const std::string& name) const {
  return instance_->variable_index(name);
}

int VariableCatalog::tau(ServiceId k) const { return lookup(names::tau(k)); }
int VariableCatalog::z(ServiceId k, const Zone& zone) const {
  return lookup(names::z(k, zone.start, zone.end));
}
int VariableCatalog::x(ServiceId k, int i) const { return lookup(names::x(k, i)); }
int VariableCatalog::y(ServiceId k, ServiceId l, int m) const { return lookup(names::y(k, l, m)); }
int VariableCatalog::alpha(ServiceId k, int depot) const { return lookup(names::alpha(k, depot)); }
int VariableCatalog::beta(ServiceId k, int depot) const { return lookup(names::beta(k, depot)); }
int VariableCatalog::h(ServiceId k) const { return lookup(names::h(k)); }
int VariableCatalog::a(ServiceId k, int i) const { return lookup(names::a(k, i)); }
int VariableCatalog::d(ServiceId k, int i) const { return lookup(names::d(k, i)); }
int VariableCatalog::rs(int depot) const { return lookup(names::rs(depot)); }
int VariableCatalog::w(ServiceId k, int i, int j) const { return lookup(names::w(k, i, j)); }
int VariableCatalog::and_indicator(ServiceId k, int i, int j) const {
  return lookup(names::and_indicator(k, i, j));
}
int VariableCatalog::wb(ServiceId k, int i, int j) const { return lookup(names::wb(k, i, j)); }
int VariableCatalog::nb(ServiceId k, int i, int j) const { return lookup(names::nb(k, i, j)); }
int VariableCatalog::v(ServiceId k, int i, int j) const { return lookup(names::v(k, i, j)); }
int VariableCatalog::wb(ServiceId k, int i) const { return lookup(names::wb(k, i)); }
int VariableCatalog::nb(ServiceId k, int i) const { return lookup(names::nb(k, i)); }
int VariableCatalog::na(ServiceId k, int i) const { return lookup(names::na(k, i)); }
int VariableCatalog::n(ServiceId k, int i) const { return lookup(names::n(k, i)); }
int VariableCatalog::min_indicator(ServiceId k, int i) const {
  return lookup(names::min_indicator(k, i));
}
int VariableCatalog::tt(ServiceId k, const Zone& zone) const {
  return lookup(names::tt(k, zone.start, zone.end));
}

std::vector<Constraint> build_zone_constraints(const ModelConfig& cfg, const LineTopology& topo,
                                               const VariableCatalog& cat) {
  std::vector<Constraint> rows;
  const auto fam = family::kZone;
  for (Direction dir : kDirections) {
    const auto& zones = cat.zones(dir);
    const auto stations = topo.stations_of(dir);
    const int first = topo.first_station(dir);
    const int last = topo.last_station(dir);
    for (ServiceId k : cat.services(dir)) {
      const std::string kn = k.name();
      const int tau = cat.tau(k);

      std::vector<Term> pick{{tau, -1.0}};
      for (const Zone& zone : zones) pick.push_back({cat.z(k, zone), 1.0});
      rows.push_back(make_row(row_name(fam, "one_zone", {kn}), pick, kEq, 0.0));

      if (k.index == 1) {
        rows.push_back(make_row(row_name(fam, "first_selected", {kn}), {{tau, 1.0}}, kEq, 1.0));
      }

      for (int i : stations) {
        rows.push_back(make_row(row_name(fam, "served_if_selected", {kn, str(i)}),
                                {{cat.x(k, i), 1.0}, {tau, -1.0}}, kLe, 0.0));
      }

      // No station before a zone start or after a zone end is served.
      std::vector<int> starts;
      std::vector<int> ends;
      for (const Zone& zone : zones) {
        if (zone.start != first && std::find(starts.begin(), starts.end(), zone.start) == starts.end()) {
          starts.push_back(zone.start);
        }
        if (zone.end != last && std::find(ends.begin(), ends.end(), zone.end) == ends.end()) {
          ends.push_back(zone.end);
        }
      }
      for (int m : starts) {
        const double big_m = static_cast<double>(m - first);
        std::vector<Term> terms;
        for (int i = first; i < m; ++i) terms.push_back({cat.x(k, i), 1.0});
        for (const Zone& zone : zones) {
          if (zone.start == m) terms.push_back({cat.z(k, zone), big_m});
        }
        rows.push_back(make_row(row_name(fam, "before_start", {kn, str(m)}), terms, kLe, big_m));
      }
      for (int n : ends) {
        const double big_m = static_cast<double>(last - n);
        std::vector<Term> terms;
        for (int i = n + 1; i <= last; ++i) terms.push_back({cat.x(k, i), 1.0});
        for (const Zone& zone : zones) {
          if (zone.end == n) terms.push_back({cat.z(k, zone), big_m});
        }
        rows.push_back(make_row(row_name(fam, "after_end", {kn, str(n)}), terms, kLe, big_m));
      }

      if (cfg.mode == OperatingMode::kOffPeak) {
        for (const Zone& zone : zones) {
          for (int i = zone.start; i <= zone.end; ++i) {
            rows.push_back(make_row(
                row_name(fam, "serve_zone", {kn, str(zone.start), str(zone.end), str(i)}),
                {{cat.x(k, i), 1.0}, {cat.z(k, zone), -1.0}}, kGe, 0.0));
          }
        }
      }

      if (k.index >= 2) {
        const ServiceId prev{dir, k.index - 1};
        for (int i : stations) {
          rows.push_back(make_row(row_name(fam, "coverage", {kn, str(i)}),
                                  {{cat.x(prev, i), 1.0}, {cat.x(k, i), 1.0}, {tau, -1.0}}, kGe,
                                  0.0));
        }
      }
    }
  }
  return rows;
}

std::vector<Constraint> build_timetable_constraints(const ModelConfig& cfg,
                                                    const LineTopology& topo,
                                                    const VariableCatalog& cat) {
  std::vector<Constraint> rows;
  const auto fam = family::kTimetable;
  const bool peak = cfg.mode == OperatingMode::kPeak;
  for (Direction dir : kDirections) {
    const auto stations = topo.stations_of(dir);
    const int first = topo.first_station(dir);
    for (ServiceId k : cat.services(dir)) {
      const std::string kn = k.name();
      for (int i : stations) {
        if (i != first) {
          if (peak) {
            rows.push_back(make_row(row_name(fam, "run", {kn, str(i)}),
                                    {{cat.a(k, i), 1.0},
                                     {cat.d(k, i - 1), -1.0},
                                     {cat.x(k, i - 1), -topo.accel_penalty()},
                                     {cat.x(k, i), -topo.decel_penalty()}},
                                    kEq, topo.pure_run_time(i)));
          } else {
            rows.push_back(make_row(row_name(fam, "run", {kn, str(i)}),
                                    {{cat.a(k, i), 1.0}, {cat.d(k, i - 1), -1.0}}, kEq,
                                    topo.running_time(i)));
          }
        }
        if (peak) {
          rows.push_back(make_row(row_name(fam, "dwell", {kn, str(i)}),
                                  {{cat.d(k, i), 1.0}, {cat.a(k, i), -1.0},
                                   {cat.x(k, i), -topo.dwell_time(i)}},
                                  kGe, 0.0));
        } else {
          rows.push_back(make_row(row_name(fam, "dwell", {kn, str(i)}),
                                  {{cat.d(k, i), 1.0}, {cat.a(k, i), -1.0}}, kEq,
                                  topo.dwell_time(i)));
        }
      }
      if (k.index == 1) {
        rows.push_back(make_row(row_name(fam, "first_departure", {kn}), {{cat.d(k, first), 1.0}},
                                kEq, cfg.first_departure(dir)));
      }
      rows.push_back(make_row(row_name(fam, "last_departure", {kn, str(first)}),
                              {{cat.d(k, first), 1.0}}, kLe, cfg.last_departure(dir)));
      const int s = topo.short_turn_start(dir);
      rows.push_back(make_row(row_name(fam, "last_departure", {kn, str(s)}),
                              {{cat.d(k, s), 1.0}}, kLe, cfg.last_departure(dir)));
    }
  }
  return rows;
}

std::vector<Constraint> build_headway_constraints(const ModelConfig& cfg,
                                                  const LineTopology& topo,
                                                  const VariableCatalog& cat) {
  std::vector<Constraint> rows;
  const auto fam = family::kHeadway;
  for (Direction dir : kDirections) {
    for (ServiceId k : cat.services(dir)) {
      if (k.index < 2) continue;
      const ServiceId prev{dir, k.index - 1};
      const std::string kn = k.name();
      const int h = cat.h(k);
      const int tau = cat.tau(k);
      rows.push_back(make_row(row_name(fam, "min", {kn}), {{h, 1.0}, {tau, -cfg.h_min}}, kGe, 0.0));
      rows.push_back(make_row(row_name(fam, "max", {kn}), {{h, 1.0}, {tau, -cfg.h_max}}, kLe, 0.0));
      for (int i : topo.stations_of(dir)) {
        rows.push_back(make_row(row_name(fam, "chain", {kn, str(i)}),
                                {{cat.d(k, i), 1.0}, {cat.d(prev, i), -1.0}, {h, -1.0}}, kEq, 0.0));
      }
    }
  }
  return rows;
}

std::vector<Constraint> build_turnaround_constraints(const ModelConfig& cfg,
                                                     const LineTopology& topo,
                                                     const VariableCatalog& cat) {
  std::vector<Constraint> rows;
  const auto fam = family::kTurnaround;
  for (Direction dir : kDirections) {
    const Direction back = opposite(dir);
    const double hi = time_upper(cfg, topo, dir);
    const double lo = time_lower(cfg, topo, back);
    for (ServiceId k : cat.services(dir)) {
      for (ServiceId l : cat.services(back)) {
        for (int m : cat.handover_stations(dir)) {
          const int p = topo.paired_station(m);
          const int y = cat.y(k, l, m);
          std::vector<Term> gate{{y, 2.0}};
          for (const Zone& zone : cat.zones(dir)) {
            if (zone.end == m) gate.push_back({cat.z(k, zone), -1.0});
          }
          for (const Zone& zone : cat.zones(back)) {
            if (zone.start == p) gate.push_back({cat.z(l, zone), -1.0});
          }
          rows.push_back(make_row(row_name(fam, "zone_match", {k.name(), l.name(), str(m)}), gate,
                                  kLe, 0.0));
          const double delta = topo.min_turnaround(m);
          const double big_m = delta + hi - lo;
          // a_l,p - d_k,m >= delta - M (1 - y)
          rows.push_back(make_row(row_name(fam, "min_time", {k.name(), l.name(), str(m)}),
                                  {{cat.a(l, p), 1.0}, {cat.d(k, m), -1.0}, {y, -big_m}}, kGe,
                                  delta - big_m));
        }
      }
    }
  }
  return rows;
}

std::vector<Constraint> build_rollingstock_constraints(const ModelConfig& cfg,
                                                       const LineTopology& topo,
                                                       const VariableCatalog& cat) {
  std::vector<Constraint> rows;
  const auto fam = family::kRollingStock;
  for (Direction dir : kDirections) {
    const Direction back = opposite(dir);
    const auto roles = depot_roles(dir);
    const int first = topo.first_station(dir);
    const int last = topo.last_station(dir);
    for (ServiceId k : cat.services(dir)) {
      const std::string kn = k.name();
      std::vector<Term> source{{cat.tau(k), -1.0}};
      for (ServiceId l : cat.services(back)) {
        for (int m : cat.handover_stations(back)) source.push_back({cat.y(l, k, m), 1.0});
      }
      for (int dp : roles.sources) source.push_back({cat.alpha(k, dp), 1.0});
      rows.push_back(make_row(row_name(fam, "source", {kn}), source, kEq, 0.0));

      std::vector<Term> sink{{cat.tau(k), -1.0}};
      for (ServiceId l : cat.services(back)) {
        for (int m : cat.handover_stations(dir)) sink.push_back({cat.y(k, l, m), 1.0});
      }
      for (int dp : roles.sinks) sink.push_back({cat.beta(k, dp), 1.0});
      rows.push_back(make_row(row_name(fam, "sink", {kn}), sink, kEq, 0.0));

      // A train from the terminal depot starts at the terminal, and a train
      // returning to the far terminal depot ends there.
      std::vector<Term> pull_out{{cat.alpha(k, roles.sources[0]), 1.0}};
      std::vector<Term> pull_in{{cat.beta(k, roles.sinks[0]), 1.0}};
      for (const Zone& zone : cat.zones(dir)) {
        if (zone.start == first) pull_out.push_back({cat.z(k, zone), -1.0});
        if (zone.end == last) pull_in.push_back({cat.z(k, zone), -1.0});
      }
      rows.push_back(make_row(row_name(fam, "pull_out_gate", {kn}), pull_out, kLe, 0.0));
      rows.push_back(make_row(row_name(fam, "pull_in_gate", {kn}), pull_in, kLe, 0.0));
    }
  }

  std::vector<Term> fleet;
  for (int dp = 1; dp <= 4; ++dp) fleet.push_back({cat.rs(dp), 1.0});
  rows.push_back(make_row(row_name(fam, "fleet", {}), fleet, kLe, static_cast<double>(cfg.fleet_size)));

  for (Direction dir : kDirections) {
    for (int dp : depot_roles(dir).sources) {
      std::vector<Term> terms{{cat.rs(dp), 1.0}};
      for (ServiceId k : cat.services(dir)) terms.push_back({cat.alpha(k, dp), -1.0});
      rows.push_back(make_row(row_name(fam, "depot_stock", {str(dp)}), terms, kGe, 0.0));
    }
  }
  return rows;
}

std::vector<Constraint> build_demand_constraints(const ModelConfig& cfg, const LineTopology& topo,
                                                 const OdMatrix& od, const VariableCatalog& cat) {
  std::vector<Constraint> rows;
  const auto dem = family::kDemand;
  const auto lin = family::kLinearization;
  for (Direction dir : kDirections) {
    const auto& pairs = cat.active_pairs(dir);
    const auto stations = topo.stations_of(dir);
    const int first = topo.first_station(dir);
    for (ServiceId k : cat.services(dir)) {
      const std::string kn = k.name();
      for (const auto& [i, j] : pairs) {
        const auto idx = {kn, str(i), str(j)};
        const double p = od.rate(i, j);
        const double bound = cat.stream_bound(i, j);
        const int w = cat.w(k, i, j);
        const int u = cat.and_indicator(k, i, j);
        const int wb = cat.wb(k, i, j);
        if (k.index == 1) {
          rows.push_back(make_row(row_name(dem, "accumulate_first", idx), {{w, 1.0}}, kEq,
                                  p * cfg.initial_accumulation));
        } else {
          const ServiceId prev{dir, k.index - 1};
          rows.push_back(make_row(row_name(dem, "accumulate", idx),
                                  {{w, 1.0},
                                   {cat.v(prev, i, j), -1.0},
                                   {cat.d(k, i), -p},
                                   {cat.d(prev, i), p}},
                                  kEq, 0.0));
        }
        // u = x_i AND x_j
        rows.push_back(make_row(row_name(lin, "and_origin", idx), {{u, 1.0}, {cat.x(k, i), -1.0}},
                                kLe, 0.0));
        rows.push_back(make_row(row_name(lin, "and_destination", idx),
                                {{u, 1.0}, {cat.x(k, j), -1.0}}, kLe, 0.0));
        rows.push_back(make_row(row_name(lin, "and_both", idx),
                                {{u, 1.0}, {cat.x(k, i), -1.0}, {cat.x(k, j), -1.0}}, kGe, -1.0));
        // wb = w * u
        rows.push_back(make_row(row_name(lin, "eligible_gate", idx), {{wb, 1.0}, {u, -bound}}, kLe,
                                0.0));
        rows.push_back(make_row(row_name(lin, "eligible_cap", idx), {{wb, 1.0}, {w, -1.0}}, kLe,
                                0.0));
        rows.push_back(make_row(row_name(lin, "eligible_floor", idx),
                                {{wb, 1.0}, {w, -1.0}, {u, -bound}}, kGe, -bound));
        // Every destination stream absorbs the station's boarding shortfall.
        if (cat.has_outgoing(i)) {
          rows.push_back(make_row(row_name(dem, "leftover_split", idx),
                                  {{cat.nb(k, i), 1.0},
                                   {cat.nb(k, i, j), -1.0},
                                   {cat.wb(k, i), -1.0},
                                   {wb, 1.0}},
                                  kEq, 0.0));
        }
        rows.push_back(make_row(row_name(dem, "leftover", idx),
                                {{cat.v(k, i, j), 1.0}, {w, -1.0}, {cat.nb(k, i, j), 1.0}}, kEq,
                                0.0));
      }

      for (int i : stations) {
        const auto idx = {kn, str(i)};
        // Alighting: every boarded stream ending here.
        std::vector<Term> alight{{cat.na(k, i), 1.0}};
        for (const auto& [o, dst] : pairs) {
          if (dst == i) alight.push_back({cat.nb(k, o, dst), -1.0});
        }
        rows.push_back(make_row(row_name(dem, "alight", idx), alight, kEq, 0.0));

        std::vector<Term> onboard{{cat.n(k, i), 1.0}, {cat.na(k, i), 1.0}};
        if (i != first) onboard.push_back({cat.n(k, i - 1), -1.0});
        if (cat.has_outgoing(i)) onboard.push_back({cat.nb(k, i), -1.0});
        rows.push_back(make_row(row_name(dem, "onboard", idx), onboard, kEq, 0.0));

        if (!cat.has_outgoing(i)) continue;
        std::vector<Term> total{{cat.wb(k, i), 1.0}};
        for (const auto& [o, dst] : pairs) {
          if (o == i) total.push_back({cat.wb(k, o, dst), -1.0});
        }
        rows.push_back(make_row(row_name(dem, "eligible_total", idx), total, kEq, 0.0));

        // nb = min(C - n_{i-1} + na, wb) with selector delta (1 picks the
        // capacity argument).
        const int nb = cat.nb(k, i);
        const int wbi = cat.wb(k, i);
        const int sel = cat.min_indicator(k, i);
        const double m1 = 2.0 * cfg.capacity;
        const double m2 = cat.station_stream_bound(i);
        std::vector<Term> cap{{nb, 1.0}, {cat.na(k, i), -1.0}};
        if (i != first) cap.push_back({cat.n(k, i - 1), 1.0});
        rows.push_back(make_row(row_name(lin, "min_capacity", idx), cap, kLe, cfg.capacity));
        rows.push_back(make_row(row_name(lin, "min_demand", idx), {{nb, 1.0}, {wbi, -1.0}}, kLe, 0.0));
        std::vector<Term> cap_floor = cap;
        cap_floor.push_back({sel, -m1});
        rows.push_back(make_row(row_name(lin, "min_capacity_floor", idx), cap_floor, kGe,
                                cfg.capacity - m1));
        rows.push_back(make_row(row_name(lin, "min_demand_floor", idx),
                                {{nb, 1.0}, {wbi, -1.0}, {sel, m2}}, kGe, 0.0));
      }
    }
  }
  return rows;
}

std::vector<Constraint> build_skipstop_constraints(const ModelConfig& cfg,
                                                   const LineTopology& topo,
                                                   const VariableCatalog& cat) {
  if (cfg.mode != OperatingMode::kPeak) {
    raise(ErrorCode::kModeMismatch, "skip-stop rows only apply to peak operation");
  }
  std::vector<Constraint> rows;
  const auto fam = family::kSkipStop;
  for (Direction dir : kDirections) {
    for (ServiceId k : cat.services(dir)) {
      const std::string kn = k.name();
      std::vector<Term> served;
      for (int i : topo.stations_of(dir)) served.push_back({cat.x(k, i), 1.0});
      for (const Zone& zone : cat.zones(dir)) {
        served.push_back({cat.z(k, zone), -static_cast<double>(zone.size())});
      }
      rows.push_back(make_row(row_name(fam, "max_skips", {kn}), served, kGe,
                              -static_cast<double>(cfg.max_skips)));
      // Trains reverse at zone ends, so both ends are always served.
      for (const Zone& zone : cat.zones(dir)) {
        const int z = cat.z(k, zone);
        rows.push_back(make_row(row_name(fam, "serve_start", {kn, str(zone.start), str(zone.end)}),
                                {{cat.x(k, zone.start), 1.0}, {z, -1.0}}, kGe, 0.0));
        rows.push_back(make_row(row_name(fam, "serve_end", {kn, str(zone.start), str(zone.end)}),
                                {{cat.x(k, zone.end), 1.0}, {z, -1.0}}, kGe, 0.0));
      }
    }
  }
  return rows;
}

Objective build_objective_cost(const VariableCatalog& cat) {
  Objective obj;
  obj.sense = ObjSense::kMaximize;
  for (Direction dir : kDirections) {
    for (ServiceId k : cat.services(dir)) {
      for (ServiceId l : cat.services(opposite(dir))) {
        for (int m : cat.handover_stations(dir)) obj.terms.push_back({cat.y(k, l, m), 1.0});
      }
    }
  }
  return obj;
}

QualityObjective build_objective_quality(const VariableCatalog& cat, const ModelConfig& cfg,
                                         const LineTopology& topo) {
  QualityObjective out;
  out.objective.sense = ObjSense::kMinimize;
  const auto fam = family::kObjectiveLink;
  const MilpInstance& inst = cat.instance();
  for (Direction dir : kDirections) {
    for (ServiceId k : cat.services(dir)) {
      for (int i : topo.stations_of(dir)) {
        if (!std::isfinite(inst.variable(cat.d(k, i)).upper)) {
          raise(ErrorCode::kUnboundedTime, "departure variable " + names::d(k, i) + " is unbounded");
        }
      }
    }
    const double span_max = time_upper(cfg, topo, dir) - cfg.first_departure(dir);
    for (ServiceId k : cat.services(dir)) {
      if (k.index < 2) continue;
      const ServiceId prev{dir, k.index - 1};
      const std::string kn = k.name();
      for (const Zone& zone : cat.zones(dir)) {
        // D = d_k,n - d_{k-1},m = h_k + travel of k-1 over the zone.
        double lo = 0.0;
        double hi = 0.0;
        if (cfg.mode == OperatingMode::kOffPeak) {
          lo = stopping_travel(topo, zone.start, zone.end);
          hi = lo + cfg.h_max;
        } else {
          lo = pure_travel(topo, zone.start, zone.end);
          hi = span_max + cfg.h_max;
        }
        const int tt = cat.tt(k, zone);
        const int z = cat.z(k, zone);
        const int dn = cat.d(k, zone.end);
        const int dm = cat.d(prev, zone.start);
        const auto idx = {kn, str(zone.start), str(zone.end)};
        out.rows.push_back(make_row(row_name(fam, "product_low", idx), {{tt, 1.0}, {z, -lo}}, kGe, 0.0));
        out.rows.push_back(make_row(row_name(fam, "product_high", idx), {{tt, 1.0}, {z, -hi}}, kLe, 0.0));
        // tt >= D - hi (1 - z)
        out.rows.push_back(make_row(row_name(fam, "product_floor", idx),
                                    {{tt, 1.0}, {dn, -1.0}, {dm, 1.0}, {z, -hi}}, kGe, -hi));
        // tt <= D - lo (1 - z)
        out.rows.push_back(make_row(row_name(fam, "product_ceiling", idx),
                                    {{tt, 1.0}, {dn, -1.0}, {dm, 1.0}, {z, -lo}}, kLe, -lo));
        out.objective.terms.push_back({tt, 1.0});
      }
      for (int i : topo.stations_of(dir)) {
        out.objective.terms.push_back({cat.d(k, i), 1.0});
        out.objective.terms.push_back({cat.d(prev, i), -1.0});
      }
    }
  }
  return out;
}

MilpInstance assemble(const ModelConfig& cfg, const LineTopology& topo, const OdMatrix& od) {
  MilpInstance inst;
  const VariableCatalog cat = VariableCatalog::declare(cfg, topo, od, inst);
  auto add_all = [&inst](std::vector<Constraint> rows) {
    for (Constraint& row : rows) inst.add_constraint(std::move(row));
  };
  add_all(build_zone_constraints(cfg, topo, cat));
  add_all(build_timetable_constraints(cfg, topo, cat));
  add_all(build_headway_constraints(cfg, topo, cat));
  add_all(build_turnaround_constraints(cfg, topo, cat));
  add_all(build_rollingstock_constraints(cfg, topo, cat));
  add_all(build_demand_constraints(cfg, topo, od, cat));
  if (cfg.mode == OperatingMode::kPeak) add_all(build_skipstop_constraints(cfg, topo, cat));

  const Objective cost = build_objective_cost(cat);
  inst.set_named_objective(std::string(kCostObjective), cost);
  if (cfg.objective == ObjectiveKind::kCost) {
    inst.set_objective(cost);
  } else {
    QualityObjective quality = build_objective_quality(cat, cfg, topo);
    add_all(std::move(quality.rows));
    inst.set_named_objective(std::string(kQualityObjective), quality.objective);
    inst.set_objective(cfg.objective == ObjectiveKind::kQuality ? quality.objective : cost);
  }

  auto& meta = inst.metadata();
  meta["mode"] = to_string(cfg.mode);
  meta["objective"] = to_string(cfg.objective);
  meta["services_up"] = std::to_string(cfg.services_up);
  meta["services_down"] = std::to_string(cfg.services_down);
  meta["stations_per_direction"] = std::to_string(topo.stations_per_direction());
  return inst;
}

double evaluate_quality(const MilpInstance& instance, const ModelConfig& cfg,
                        const LineTopology& topo, std::span<const double> values) {
  auto value = [&](const std::string& name) {
    return values[static_cast<std::size_t>(instance.variable_index(name))];
  };
  double total = 0.0;
  for (Direction dir : kDirections) {
    const auto zones = operation_zones(topo, dir);
    for (int kk = 2; kk <= cfg.services(dir); ++kk) {
      const ServiceId k{dir, kk};
      const ServiceId prev{dir, kk - 1};
      for (const Zone& zone : zones) {
        const double z = value(names::z(k, zone.start, zone.end));
        total += (value(names::d(k, zone.end)) - value(names::d(prev, zone.start))) * z;
      }
      for (int i : topo.stations_of(dir)) total += value(names::d(k, i)) - value(names::d(prev, i));
    }
  }
  return total;
}

}  // namespace metrott
