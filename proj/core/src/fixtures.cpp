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

#include "metrott/fixtures.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "metrott/error.hpp"

namespace metrott {
namespace {

struct PeriodProfile {
  double start;          // seconds of day
  double hourly_up;      // off-peak passengers per hour
  double hourly_down;
};

PeriodProfile profile(Period period) {
  switch (period) {
    case Period::kMorning: return {27000.0, 2800.0, 2000.0};
    case Period::kMidday: return {46800.0, 1800.0, 1800.0};
    case Period::kEvening: return {64800.0, 2000.0, 2800.0};
  }
  return {27000.0, 2800.0, 2000.0};
}

constexpr double kPeakDemandFactor = 1.75;
constexpr double kOffPeakLoadFactor = 0.8;
constexpr double kPeakLoadFactor = 1.0;

// Upstream segment j-1 -> j of a Santiago-like line, in seconds.
double segment_run(int j) { return 30.0 + 8.0 * static_cast<double>((j * 7) % 5); }
double station_dwell(int up_station) { return 15.0 + 5.0 * static_cast<double>((up_station * 2) % 3); }

LineTopology::Params line_params(int n, double accel, double decel, double turnaround) {
  LineTopology::Params p;
  p.stations_per_direction = n;
  p.short_turn_start = 3;
  p.short_turn_end = n - 2;
  p.accel_penalty = accel;
  p.decel_penalty = decel;
  const auto count = static_cast<std::size_t>(2 * n);
  p.pure_run_time.assign(count, 0.0);
  p.dwell_time.assign(count, 0.0);
  p.min_turnaround.assign(count, turnaround);
  for (int s = 1; s <= 2 * n; ++s) {
    const auto idx = static_cast<std::size_t>(s - 1);
    const int up = s <= n ? s : 2 * n + 1 - s;
    p.dwell_time[idx] = station_dwell(up);
    if (s == 1 || s == n + 1) continue;
    p.pure_run_time[idx] = segment_run(s <= n ? s : 2 * n + 2 - s);
  }
  return p;
}

Instance tiny8() {
  const int n = 8;
  LineTopology::Params p;
  p.stations_per_direction = n;
  p.short_turn_start = 3;
  p.short_turn_end = 6;
  p.pure_run_time.assign(2 * n, 60.0);
  p.pure_run_time[0] = 0.0;
  p.pure_run_time[n] = 0.0;
  p.accel_penalty = 5.0;
  p.decel_penalty = 5.0;
  p.dwell_time.assign(2 * n, 20.0);
  p.min_turnaround.assign(2 * n, 135.0);
  OdMatrix od = gravity_demand(n, 0.0, 1200.0, 150.0, 120.0, kDefaultDemandSeed);
  ModelConfig cfg;
  cfg.services_up = 2;
  cfg.services_down = 2;
  cfg.first_departure_up = 0.0;
  cfg.first_departure_down = 300.0;
  cfg.last_departure_up = 600.0;
  cfg.last_departure_down = 1200.0;
  cfg.fleet_size = 3;
  cfg.max_skips = 2;
  Instance inst{"tiny8", LineTopology(std::move(p)), std::move(od), cfg, kOffPeakLoadFactor, 1.0, {}, std::nullopt};
  inst.config.validate_against(inst.topology);
  return inst;
}

// Four-station line of the skip-stop waiting example: runs of 2, dwells of
// 1, no acceleration penalties, and three cohorts bound for station 4 that
// are all on the platform at t = 0.
Instance fig5(bool skip) {
  const int n = 4;
  LineTopology::Params p;
  p.stations_per_direction = n;
  p.short_turn_start = 2;
  p.short_turn_end = 3;
  p.pure_run_time.assign(2 * n, 2.0);
  p.pure_run_time[0] = 0.0;
  p.pure_run_time[n] = 0.0;
  p.dwell_time.assign(2 * n, 1.0);
  p.min_turnaround.assign(2 * n, 1.0);
  ModelConfig cfg;
  cfg.services_up = 2;
  cfg.services_down = 1;
  cfg.h_min = 1.0;
  cfg.h_max = 10.0;
  cfg.first_departure_up = 0.0;
  cfg.first_departure_down = 0.0;
  cfg.last_departure_up = 20.0;
  cfg.last_departure_down = 20.0;
  cfg.capacity = 600.0;
  cfg.fleet_size = 2;
  cfg.initial_accumulation = 0.0;
  cfg.mode = skip ? OperatingMode::kPeak : OperatingMode::kOffPeak;
  LineTopology topo(std::move(p));
  Timetable tt(n);
  auto add = [&](int index, std::vector<bool> stops, double first_departure) {
    ServicePlan plan;
    plan.id = ServiceId{Direction::kUp, index};
    const RunProfile prof = tight_profile(topo, Direction::kUp, stops, first_departure);
    plan.arrival = prof.arrival;
    plan.departure = prof.departure;
    // The train leaves the terminal once its dwell there is over.
    plan.departure.back() = plan.arrival.back() + topo.dwell_time(n);
    plan.stops = stops;
    plan.selected = true;
    plan.zone = Zone{1, n};
    plan.train = index;
    tt.add(std::move(plan));
  };
  if (skip) {
    add(1, {false, true, true, true}, 1.0);
    add(2, {true, false, true, true}, 5.0);
  } else {
    add(1, {true, true, true, true}, 2.0);
    add(2, {true, true, true, true}, 5.0);
  }
  OdMatrix od(n, 0.0, 20.0);
  std::vector<Cohort> lumps{{1, 4, 0.0, 200.0}, {2, 4, 0.0, 500.0}, {3, 4, 0.0, 200.0}};
  Instance inst{skip ? "fig5-skip" : "fig5-standard", std::move(topo), std::move(od), cfg, 1.0, 1.0,
                std::move(lumps), std::move(tt)};
  return inst;
}

}  // namespace

std::string to_string(Period period) {
  switch (period) {
    case Period::kMorning: return "M";
    case Period::kMidday: return "MD";
    case Period::kEvening: return "E";
  }
  return "M";
}

Period parse_period(std::string_view text) {
  if (text == "M") return Period::kMorning;
  if (text == "MD") return Period::kMidday;
  if (text == "E") return Period::kEvening;
  raise(ErrorCode::kInvalidArgument, "period must be M, MD or E (got '" + std::string(text) + "')");
}

InstanceIndex parse_instance_index(std::string_view text) {
  InstanceIndex out;
  int* fields[] = {&out.trains, &out.stations, &out.minutes};
  std::size_t pos = 0;
  for (int f = 0; f < 3; ++f) {
    const std::size_t dash = f < 2 ? text.find('-', pos) : text.size();
    if (dash == std::string_view::npos) raise(ErrorCode::kInvalidArgument, "instance index must look like 5-16-30");
    const auto part = text.substr(pos, dash - pos);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), *fields[f]);
    if (ec != std::errc() || ptr != part.data() + part.size() || *fields[f] < 1) {
      raise(ErrorCode::kInvalidArgument, "instance index must look like 5-16-30");
    }
    pos = dash + 1;
  }
  if (out.stations < 6) raise(ErrorCode::kLineTooShort, "generated lines need at least 6 stations");
  return out;
}

OdMatrix gravity_demand(int stations_per_direction, double horizon_start, double horizon_end,
                        double total_up, double total_down, std::uint64_t seed) {
  if (!(total_up >= 0.0) || !(total_down >= 0.0)) {
    raise(ErrorCode::kInvalidArgument, "demand totals must be non-negative");
  }
  OdMatrix od(stations_per_direction, horizon_start, horizon_end);
  std::mt19937_64 rng(seed);
  const int n = stations_per_direction;
  for (Direction dir : kDirections) {
    const int first = dir == Direction::kUp ? 1 : n + 1;
    const double total = dir == Direction::kUp ? total_up : total_down;
    std::vector<double> weight;
    double sum = 0.0;
    for (int i = first; i < first + n; ++i) {
      for (int j = i + 1; j < first + n; ++j) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double w = (0.75 + 0.5 * u) / (1.0 + static_cast<double>(j - i));
        weight.push_back(w);
        sum += w;
      }
    }
    std::size_t e = 0;
    for (int i = first; i < first + n; ++i) {
      for (int j = i + 1; j < first + n; ++j) {
        od.set_count(i, j, total * weight[e++] / sum);
      }
    }
  }
  return od;
}

Instance generate_line_instance(const InstanceIndex& index, Period period, OperatingMode mode,
                                std::uint64_t seed) {
  if (index.stations < 6) raise(ErrorCode::kLineTooShort, "generated lines need at least 6 stations");
  if (index.trains < 1 || index.minutes < 1) {
    raise(ErrorCode::kInvalidArgument, "instance index entries must be positive");
  }
  const PeriodProfile prof = profile(period);
  const double hours = static_cast<double>(index.minutes) / 60.0;
  const double factor = mode == OperatingMode::kPeak ? kPeakDemandFactor : 1.0;
  const double t0 = prof.start;
  const double t1 = t0 + 60.0 * static_cast<double>(index.minutes);
  OdMatrix od = gravity_demand(index.stations, t0, t1, prof.hourly_up * hours * factor,
                               prof.hourly_down * hours * factor, seed);
  ModelConfig cfg;
  cfg.mode = mode;
  cfg.first_departure_up = t0;
  cfg.first_departure_down = t0;
  cfg.last_departure_up = t1;
  cfg.last_departure_down = t1;
  cfg.fleet_size = index.trains;
  const double lf = mode == OperatingMode::kPeak ? kPeakLoadFactor : kOffPeakLoadFactor;
  cfg.services_up = std::max(1, required_services(directional_total(od, Direction::kUp), cfg.capacity, lf));
  cfg.services_down = std::max(1, required_services(directional_total(od, Direction::kDown), cfg.capacity, lf));
  std::string name = std::to_string(index.trains) + "-" + std::to_string(index.stations) + "-" +
                     std::to_string(index.minutes) + "-" + to_string(period);
  Instance inst{std::move(name), LineTopology(line_params(index.stations, 6.0, 6.0, 135.0)), std::move(od),
                cfg, lf, 1.0, {}, std::nullopt};
  inst.config.validate_against(inst.topology);
  return inst;
}

std::vector<std::string> fixture_names() { return {"santiago16", "tiny8", "fig5-standard", "fig5-skip"}; }

Instance generate_fixture(std::string_view name) {
  if (name == "santiago16") {
    Instance inst = generate_line_instance({5, 16, 30}, Period::kMorning, OperatingMode::kOffPeak);
    inst.name = "santiago16";
    return inst;
  }
  if (name == "tiny8") return tiny8();
  if (name == "fig5-standard") return fig5(false);
  if (name == "fig5-skip") return fig5(true);
  raise(ErrorCode::kUnknownFixture, "unknown fixture '" + std::string(name) + "'");
}

}  // namespace metrott
