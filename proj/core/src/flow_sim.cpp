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

#include "metrott/flow_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "metrott/error.hpp"

namespace metrott {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTimeTol = 1e-9;

// Passengers spread uniformly over [begin, end]; a lump when begin == end.
struct Piece {
  double begin = 0.0;
  double end = 0.0;
  double amount = 0.0;

  bool lump() const { return end - begin <= 0.0; }
  double share(double from, double to) const {
    const double lo = std::max(begin, from);
    const double hi = std::min(end, to);
    if (hi <= lo) return 0.0;
    return amount * (hi - lo) / (end - begin);
  }
};

struct Stream {
  int origin = 0;
  int destination = 0;
  double rate = 0.0;
  std::vector<Cohort> lumps;  // sorted by time
  std::size_t next_lump = 0;
  std::vector<Piece> queue;   // sorted by begin

  double total() const {
    double s = 0.0;
    for (const auto& p : queue) s += p.amount;
    return s;
  }
  void push(Piece piece) {
    if (!(piece.amount > 0.0)) return;
    auto it = std::upper_bound(queue.begin(), queue.end(), piece.begin,
                               [](double t, const Piece& p) { return t < p.begin; });
    queue.insert(it, piece);
  }
};

struct BoardResult {
  double boarded = 0.0;
  double waiting = 0.0;
  double last_boarded = kNaN;
};

// Boards the part of `stream` that arrived before `cut`, plus `lump_budget`
// passengers of lumps arriving exactly at `cut`.
BoardResult board_before(Stream& stream, double cut, double& lump_budget, double departure) {
  BoardResult out;
  std::vector<Piece> rest;
  for (const Piece& p : stream.queue) {
    if (p.lump()) {
      double take = 0.0;
      if (p.begin < cut) {
        take = p.amount;
      } else if (p.begin == cut) {
        take = std::min(p.amount, std::max(lump_budget, 0.0));
        lump_budget -= take;
      }
      if (take > 0.0) {
        out.boarded += take;
        out.waiting += take * (departure - p.begin);
        out.last_boarded = std::isnan(out.last_boarded) ? p.begin : std::max(out.last_boarded, p.begin);
      }
      if (p.amount - take > 0.0) rest.push_back({p.begin, p.end, p.amount - take});
      continue;
    }
    if (cut >= p.end) {
      out.boarded += p.amount;
      out.waiting += p.amount * (departure - 0.5 * (p.begin + p.end));
      out.last_boarded = std::isnan(out.last_boarded) ? p.end : std::max(out.last_boarded, p.end);
    } else if (cut > p.begin) {
      const double part = p.share(p.begin, cut);
      out.boarded += part;
      out.waiting += part * (departure - 0.5 * (p.begin + cut));
      out.last_boarded = std::isnan(out.last_boarded) ? cut : std::max(out.last_boarded, cut);
      rest.push_back({cut, p.end, p.amount - part});
    } else {
      rest.push_back(p);
    }
  }
  stream.queue = std::move(rest);
  return out;
}

// First-in first-out boarding across the eligible streams of one station;
// `eligible` is ordered by destination so that simultaneous arrivals board
// in destination order.
std::vector<BoardResult> board(std::vector<Stream*>& eligible, double room, double departure) {
  std::vector<BoardResult> out(eligible.size());
  double total = 0.0;
  for (const Stream* s : eligible) total += s->total();
  double cut = std::numeric_limits<double>::infinity();
  double lump_budget = std::numeric_limits<double>::infinity();
  if (total > room) {
    std::vector<double> marks;
    for (const Stream* s : eligible) {
      for (const Piece& p : s->queue) {
        marks.push_back(p.begin);
        marks.push_back(p.end);
      }
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    double left = std::max(room, 0.0);
    bool found = false;
    for (std::size_t m = 0; m < marks.size() && !found; ++m) {
      const double t = marks[m];
      if (m > 0) {
        const double s0 = marks[m - 1];
        double mass = 0.0;
        for (const Stream* s : eligible) {
          for (const Piece& p : s->queue) {
            if (!p.lump()) mass += p.share(s0, t);
          }
        }
        if (mass > left) {
          cut = s0 + (left / mass) * (t - s0);
          lump_budget = 0.0;
          found = true;
          break;
        }
        left -= mass;
      }
      double lumps = 0.0;
      for (const Stream* s : eligible) {
        for (const Piece& p : s->queue) {
          if (p.lump() && p.begin == t) lumps += p.amount;
        }
      }
      if (lumps > left) {
        cut = t;
        lump_budget = left;
        found = true;
      } else {
        left -= lumps;
      }
    }
  }
  for (std::size_t e = 0; e < eligible.size(); ++e) {
    out[e] = board_before(*eligible[e], cut, lump_budget, departure);
  }
  return out;
}

void check_service(const ServicePlan& plan) {
  for (std::size_t p = 0; p < plan.arrival.size(); ++p) {
    const double a = plan.arrival[p];
    const double d = plan.departure[p];
    if (!std::isfinite(a) || !std::isfinite(d)) {
      raise(ErrorCode::kInfeasibleTimetable, "service " + plan.id.name() + " has a non-finite time");
    }
    if (d < a - kTimeTol) {
      raise(ErrorCode::kInfeasibleTimetable, "service " + plan.id.name() + " departs before it arrives at position " +
                                                 std::to_string(p + 1));
    }
    if (p > 0 && a < plan.departure[p - 1] - kTimeTol) {
      raise(ErrorCode::kInfeasibleTimetable, "service " + plan.id.name() + " arrives before leaving the previous station at position " +
                                                 std::to_string(p + 1));
    }
  }
}

std::string fmt(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

FlowTrace simulate(const Timetable& timetable, const OdMatrix& od, double capacity,
                   double initial_accumulation, std::span<const Cohort> lumps) {
  if (!(capacity > 0.0)) raise(ErrorCode::kNonPositiveCapacity, "capacity must be positive");
  if (!(initial_accumulation >= 0.0)) {
    raise(ErrorCode::kInvalidArgument, "initial accumulation must be non-negative");
  }
  const int n = timetable.stations_per_direction();
  if (od.stations_per_direction() != n) {
    raise(ErrorCode::kConfigMismatch, "demand and timetable disagree on the station count");
  }
  FlowTrace trace;
  trace.capacity = capacity;

  for (Direction dir : kDirections) {
    const auto plans = timetable.services(dir);
    for (const ServicePlan* plan : plans) check_service(*plan);
    const int first = timetable.first_station(dir);

    // streams[p] lists the streams leaving position p, by destination.
    std::vector<std::vector<Stream>> streams(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        Stream s;
        s.origin = first + p;
        s.destination = first + q;
        s.rate = od.rate(s.origin, s.destination);
        for (const Cohort& c : lumps) {
          if (c.origin == s.origin && c.destination == s.destination && c.amount > 0.0) s.lumps.push_back(c);
        }
        std::stable_sort(s.lumps.begin(), s.lumps.end(),
                         [](const Cohort& l, const Cohort& r) { return l.time < r.time; });
        if (s.rate > 0.0 || !s.lumps.empty()) streams[static_cast<std::size_t>(p)].push_back(std::move(s));
      }
    }
    for (const Cohort& c : lumps) {
      if (c.amount < 0.0 || !od.is_station(c.origin) || !od.is_station(c.destination) ||
          od.direction_of(c.origin) != od.direction_of(c.destination) || c.destination <= c.origin) {
        raise(ErrorCode::kInvalidArgument, "invalid passenger cohort");
      }
    }

    std::vector<double> last_visit(static_cast<std::size_t>(n), kNaN);
    for (const ServicePlan* plan : plans) {
      double onboard = 0.0;
      std::vector<double> alight(static_cast<std::size_t>(n), 0.0);
      for (int p = 0; p < n; ++p) {
        const auto pi = static_cast<std::size_t>(p);
        const int station = first + p;
        const double dep = plan->departure[pi];
        if (!std::isnan(last_visit[pi]) && dep < last_visit[pi] - kTimeTol) {
          raise(ErrorCode::kInfeasibleTimetable,
                "service " + plan->id.name() + " departs station " + std::to_string(station) +
                    " before its predecessor");
        }
        const double since = std::isnan(last_visit[pi]) ? dep - initial_accumulation : last_visit[pi];
        last_visit[pi] = std::max(dep, since);

        auto& here = streams[pi];
        std::vector<Stream*> eligible;
        std::vector<std::size_t> record_at;
        for (Stream& s : here) {
          if (dep > since) s.push({since, dep, s.rate * (dep - since)});
          while (s.next_lump < s.lumps.size() && s.lumps[s.next_lump].time <= dep + kTimeTol) {
            const Cohort& c = s.lumps[s.next_lump++];
            s.push({c.time, c.time, c.amount});
          }
          const bool ok = plan->stops[pi] && plan->stops[static_cast<std::size_t>(s.destination - first)];
          StreamRecord rec;
          rec.service = plan->id;
          rec.origin = s.origin;
          rec.destination = s.destination;
          rec.waiting = s.total();
          rec.eligible = ok ? rec.waiting : 0.0;
          rec.last_boarded_arrival = kNaN;
          record_at.push_back(trace.streams.size());
          trace.streams.push_back(rec);
          if (ok) eligible.push_back(&s);
        }

        StationRecord st;
        st.service = plan->id;
        st.station = station;
        st.departure = dep;
        st.stops = plan->stops[pi];
        st.alighted = alight[pi];
        onboard -= st.alighted;
        for (Stream* s : eligible) st.eligible += s->total();
        const double room = capacity - onboard;
        auto results = board(eligible, room, dep);
        std::size_t e = 0;
        for (std::size_t r = 0; r < here.size(); ++r) {
          StreamRecord& rec = trace.streams[record_at[r]];
          if (e < eligible.size() && eligible[e] == &here[r]) {
            rec.boarded = results[e].boarded;
            rec.last_boarded_arrival = results[e].last_boarded;
            trace.waiting_time += results[e].waiting;
            alight[static_cast<std::size_t>(here[r].destination - first)] += rec.boarded;
            st.boarded += rec.boarded;
            ++e;
          }
          rec.leftover = here[r].total();
          rec.first_left_arrival = here[r].queue.empty() ? kNaN : here[r].queue.front().begin;
        }
        onboard += st.boarded;
        st.onboard = onboard;
        trace.boarded += st.boarded;
        trace.stations.push_back(st);
      }
    }
    for (const auto& at : streams) {
      for (const Stream& s : at) trace.stranded += s.total();
    }
  }
  return trace;
}

double total_waiting_time(const FlowTrace& trace) { return trace.waiting_time; }

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
  out << "service,origin,destination,waiting,eligible,boarded,leftover\n";
  for (const StreamRecord& r : trace.streams) {
    out << r.service.name() << ',' << r.origin << ',' << r.destination << ',' << fmt(r.waiting) << ','
        << fmt(r.eligible) << ',' << fmt(r.boarded) << ',' << fmt(r.leftover) << '\n';
  }
}

bool DiscrepancyReport::agrees() const {
  return std::none_of(families.begin(), families.end(), [](const FamilyGap& f) { return f.flagged; });
}

const FamilyGap& DiscrepancyReport::family(const std::string& name) const {
  for (const auto& f : families) {
    if (f.family == name) return f;
  }
  raise(ErrorCode::kInvalidArgument, "unknown flow family " + name);
}

double allocation_gap(const FlowTrace& trace) {
  std::map<std::pair<ServiceId, int>, const StationRecord*> at;
  for (const StationRecord& s : trace.stations) at[{s.service, s.station}] = &s;
  double gap = 0.0;
  for (const StreamRecord& r : trace.streams) {
    const StationRecord* s = at.at({r.service, r.origin});
    const double lhs = s->eligible - s->boarded;
    const double rhs = r.eligible - r.boarded;
    gap = std::max(gap, std::abs(lhs - rhs));
  }
  return gap;
}

DiscrepancyReport compare_with_milp(const FlowTrace& trace, const MilpInstance& instance,
                                    std::span<const double> values, double tolerance) {
  if (values.size() != static_cast<std::size_t>(instance.num_variables())) {
    raise(ErrorCode::kInvalidArgument, "assignment size does not match the instance");
  }
  DiscrepancyReport report;
  report.tolerance = tolerance;
  std::map<std::string, FamilyGap> gaps;
  for (const char* fam : {"w", "wb", "nb", "na", "n", "v"}) gaps[fam].family = fam;
  auto value_of = [&](const std::string& name) -> std::optional<double> {
    auto idx = instance.find_variable(name);
    if (!idx) return std::nullopt;
    return values[static_cast<std::size_t>(*idx)];
  };
  auto note = [&](const std::string& fam, const std::string& name, double simulated) {
    auto v = value_of(name);
    // Streams without demand carry no variables; their simulated flow is zero.
    const double milp = v ? *v : 0.0;
    const double diff = std::abs(milp - simulated);
    FamilyGap& g = gaps[fam];
    if (g.worst.empty() || diff > g.max_abs_diff) {
      g.max_abs_diff = diff;
      g.worst = name;
    }
  };

  for (const StationRecord& s : trace.stations) {
    auto d = value_of(names::d(s.service, s.station));
    auto x = value_of(names::x(s.service, s.station));
    auto tau = value_of(names::tau(s.service));
    if (!d || !x || !tau) {
      raise(ErrorCode::kTimetableMismatch, "assignment has no service " + s.service.name());
    }
    const double scale = std::max(1.0, std::abs(s.departure));
    if (std::abs(*d - s.departure) > 1e-6 * scale) {
      raise(ErrorCode::kTimetableMismatch, "departure of " + s.service.name() + " at station " +
                                               std::to_string(s.station) + " differs");
    }
    const bool stops = *x > 0.5 && *tau > 0.5;
    if (stops != s.stops) {
      raise(ErrorCode::kTimetableMismatch, "stop of " + s.service.name() + " at station " +
                                               std::to_string(s.station) + " differs");
    }
    note("na", names::na(s.service, s.station), s.alighted);
    note("n", names::n(s.service, s.station), s.onboard);
    if (instance.find_variable(names::wb(s.service, s.station))) {
      note("wb", names::wb(s.service, s.station), s.eligible);
      note("nb", names::nb(s.service, s.station), s.boarded);
    }
  }
  for (const StreamRecord& r : trace.streams) {
    note("w", names::w(r.service, r.origin, r.destination), r.waiting);
    note("wb", names::wb(r.service, r.origin, r.destination), r.eligible);
    note("nb", names::nb(r.service, r.origin, r.destination), r.boarded);
    note("v", names::v(r.service, r.origin, r.destination), r.leftover);
  }
  for (const char* fam : {"w", "wb", "nb", "na", "n", "v"}) {
    FamilyGap g = gaps[fam];
    g.flagged = g.max_abs_diff > tolerance;
    report.families.push_back(g);
  }

  std::map<std::pair<ServiceId, int>, const StationRecord*> at;
  for (const StationRecord& s : trace.stations) at[{s.service, s.station}] = &s;
  for (const StreamRecord& r : trace.streams) {
    const StationRecord* s = at.at({r.service, r.origin});
    const double gap = std::abs((s->eligible - s->boarded) - (r.eligible - r.boarded));
    if (gap > report.allocation_gap) {
      report.allocation_gap = gap;
      report.allocation_worst = names::nb(r.service, r.origin, r.destination);
    }
  }
  return report;
}

std::vector<TimetableIssue> check_timetable(const Timetable& timetable, const LineTopology& topo,
                                            const ModelConfig& cfg, const FlowTrace* trace,
                                            double tolerance) {
  std::vector<TimetableIssue> issues;
  auto issue = [&](std::string what, double amount) { issues.push_back({std::move(what), amount}); };
  for (Direction dir : kDirections) {
    const auto plans = timetable.services(dir);
    const ServicePlan* last_selected = nullptr;
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const ServicePlan& plan = *plans[k];
      if (!plan.selected) continue;
      const std::string name = plan.id.name();
      const auto zp0 = static_cast<std::size_t>(timetable.position(plan.zone.start));
      const auto zp1 = static_cast<std::size_t>(timetable.position(plan.zone.end));
      if (!plan.stops[zp0] || !plan.stops[zp1]) issue("zone end not served by " + name, 1.0);
      if (last_selected) {
        const double h = plan.departure[0] - last_selected->departure[0];
        if (h < cfg.h_min - tolerance) issue("headway below minimum before " + name, cfg.h_min - h);
        if (h > cfg.h_max + tolerance) issue("headway above maximum before " + name, h - cfg.h_max);
      }
      last_selected = &plan;
      if (k > 0) {
        const ServicePlan& prev = *plans[k - 1];
        for (std::size_t p = 0; p < plan.stops.size(); ++p) {
          if (!plan.stops[p] && !(prev.selected && prev.stops[p])) {
            issue("station " + std::to_string(timetable.first_station(dir) + static_cast<int>(p)) +
                      " unserved by " + prev.id.name() + " and " + name,
                  1.0);
          }
        }
      }
      if (cfg.mode == OperatingMode::kPeak) {
        int skips = 0;
        for (std::size_t p = zp0; p <= zp1; ++p) skips += plan.stops[p] ? 0 : 1;
        if (skips > cfg.max_skips) issue("too many skips on " + name, skips - cfg.max_skips);
      } else {
        for (std::size_t p = zp0; p <= zp1; ++p) {
          if (!plan.stops[p]) issue("off-peak service " + name + " skips a zone station", 1.0);
        }
      }
      if (plan.sink.service) {
        const int m = plan.sink.station;
        const int q = topo.paired_station(m);
        if (!timetable.contains(*plan.sink.service)) {
          issue("service " + name + " hands over to an unknown service", 1.0);
        } else {
          const double gap = timetable.arrival(*plan.sink.service, q) - timetable.departure(plan.id, m);
          const double need = topo.min_turnaround(m);
          if (gap < need - tolerance) issue("turnaround after " + name + " too short", need - gap);
        }
      }
    }
  }
  if (trace) {
    for (const StationRecord& s : trace->stations) {
      if (s.onboard > trace->capacity + tolerance) {
        issue("overload on " + s.service.name() + " at station " + std::to_string(s.station),
              s.onboard - trace->capacity);
      }
    }
  }
  return issues;
}

}  // namespace metrott
