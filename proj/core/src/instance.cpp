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

#include "metrott/instance.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "metrott/error.hpp"

namespace metrott {
namespace {

using nlohmann::json;

std::string escape(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// A JSON value together with its pointer, for diagnostics.
class Node {
 public:
  Node(const json& value, std::string pointer) : value_(&value), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& what) const {
    raise(ErrorCode::kSchemaError, (pointer_.empty() ? std::string("/") : pointer_) + ": " + what);
  }
  const std::string& pointer() const { return pointer_; }
  const json& raw() const { return *value_; }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_->is_object()) fail("must be an object");
    for (const auto& [key, _] : value_->items()) {
      bool known = false;
      for (auto a : allowed) known = known || a == key;
      if (!known) Node(*value_, pointer_ + "/" + escape(key)).fail("unknown member");
    }
  }
  bool has(std::string_view key) const {
    return value_->is_object() && value_->contains(std::string(key)) && !(*value_)[std::string(key)].is_null();
  }
  Node at(std::string_view key) const {
    if (!has(key)) Node(*value_, pointer_ + "/" + escape(key)).fail("is required");
    return Node((*value_)[std::string(key)], pointer_ + "/" + escape(key));
  }
  std::size_t size() const {
    if (!value_->is_array()) fail("must be an array");
    return value_->size();
  }
  Node at(std::size_t index) const {
    if (index >= size()) fail("needs at least " + std::to_string(index + 1) + " entries");
    return Node((*value_)[index], pointer_ + "/" + std::to_string(index));
  }
  double number() const {
    if (!value_->is_number()) fail("must be a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("must be finite");
    return v;
  }
  double non_negative() const {
    const double v = number();
    if (v < 0.0) fail("must be non-negative");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }
  int integer() const {
    if (!value_->is_number_integer()) fail("must be an integer");
    return value_->get<int>();
  }
  bool boolean() const {
    if (value_->is_boolean()) return value_->get<bool>();
    if (value_->is_number_integer() && (value_->get<int>() == 0 || value_->get<int>() == 1)) {
      return value_->get<int>() == 1;
    }
    fail("must be a boolean");
  }
  std::string string() const {
    if (!value_->is_string()) fail("must be a string");
    return value_->get<std::string>();
  }
  std::vector<double> numbers(std::size_t expected) const {
    if (size() != expected) fail("must have " + std::to_string(expected) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < expected; ++i) out.push_back(at(i).number());
    return out;
  }
  // A scalar broadcast to `expected` entries, or an explicit array.
  std::vector<double> numbers_or_scalar(std::size_t expected) const {
    if (value_->is_number()) return std::vector<double>(expected, non_negative());
    auto v = numbers(expected);
    for (std::size_t i = 0; i < expected; ++i) {
      if (v[i] < 0.0) at(i).fail("must be non-negative");
    }
    return v;
  }

 private:
  const json* value_;
  std::string pointer_;
};

template <typename Fn>
auto rethrow_at(const Node& node, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError) throw;
    node.fail(e.what());
  }
}

LineTopology parse_topology(const Node& node, const OdMatrix* demand_for_dwell,
                            std::optional<DwellPolicy>& policy_out) {
  node.expect_object({"stations_per_direction", "short_turn", "pure_run_time", "accel_penalty",
                      "decel_penalty", "distances", "kinematics", "dwell_time", "dwell_policy",
                      "min_turnaround"});
  LineTopology::Params p;
  const Node n_node = node.at("stations_per_direction");
  p.stations_per_direction = n_node.integer();
  if (p.stations_per_direction < 4) n_node.fail("must be at least 4");
  const auto count = static_cast<std::size_t>(2 * p.stations_per_direction);
  const Node st = node.at("short_turn");
  if (st.size() != 2) st.fail("must have 2 entries");
  p.short_turn_start = st.at(std::size_t{0}).integer();
  p.short_turn_end = st.at(std::size_t{1}).integer();

  if (node.has("pure_run_time") == node.has("distances")) {
    node.fail("exactly one of pure_run_time and distances is required");
  }
  if (node.has("pure_run_time")) {
    p.pure_run_time = node.at("pure_run_time").numbers_or_scalar(count);
    p.accel_penalty = node.has("accel_penalty") ? node.at("accel_penalty").non_negative() : 0.0;
    p.decel_penalty = node.has("decel_penalty") ? node.at("decel_penalty").non_negative() : 0.0;
  } else {
    const Node k = node.at("kinematics");
    k.expect_object({"v_max", "v_acc", "v_dec"});
    KinematicParams kin{k.at("v_max").positive(), k.at("v_acc").positive(), k.at("v_dec").positive()};
    const Node dist = node.at("distances");
    const auto d = dist.numbers(count);
    p.pure_run_time.assign(count, 0.0);
    const int n = p.stations_per_direction;
    for (std::size_t i = 0; i < count; ++i) {
      const int station = static_cast<int>(i) + 1;
      if (station == 1 || station == n + 1) continue;
      const auto parts = rethrow_at(dist.at(i), [&] { return decompose_running_time(d[i], kin); });
      p.pure_run_time[i] = parts.pure;
      p.accel_penalty = parts.accel_penalty;
      p.decel_penalty = parts.decel_penalty;
    }
  }
  if (node.has("dwell_time") == node.has("dwell_policy")) {
    node.fail("exactly one of dwell_time and dwell_policy is required");
  }
  if (node.has("dwell_time")) {
    p.dwell_time = node.at("dwell_time").numbers_or_scalar(count);
  } else {
    const Node pol = node.at("dwell_policy");
    pol.expect_object({"thresholds", "group_dwell"});
    DwellPolicy policy;
    const Node th = pol.at("thresholds");
    policy.thresholds = th.numbers(th.size());
    const Node gd = pol.at("group_dwell");
    policy.group_dwell = gd.numbers(gd.size());
    rethrow_at(pol, [&] { policy.validate(); });
    p.dwell_time = rethrow_at(pol, [&] { return assign_dwell_times(*demand_for_dwell, policy); });
    policy_out = policy;
  }
  p.min_turnaround = node.at("min_turnaround").numbers_or_scalar(count);
  return rethrow_at(node, [&] { return LineTopology(std::move(p)); });
}

OdMatrix parse_demand(const Node& node, int n, std::vector<Cohort>& lumps) {
  node.expect_object({"kind", "horizon", "entries", "lumps"});
  const std::string kind = node.has("kind") ? node.at("kind").string() : "rate";
  if (kind != "rate" && kind != "count") node.at("kind").fail("must be \"rate\" or \"count\"");
  const Node hz = node.at("horizon");
  const auto h = hz.numbers(2);
  if (!(h[0] < h[1])) hz.fail("start must precede end");
  OdMatrix od = rethrow_at(hz, [&] { return OdMatrix(n, h[0], h[1]); });
  if (node.has("entries")) {
    const Node entries = node.at("entries");
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const Node row = entries.at(e);
      if (row.size() != 3) row.fail("must be [origin, destination, value]");
      const int i = row.at(std::size_t{0}).integer();
      const int j = row.at(std::size_t{1}).integer();
      const double value = row.at(std::size_t{2}).non_negative();
      if (!od.is_station(i) || !od.is_station(j) || od.direction_of(i) != od.direction_of(j) || j <= i) {
        row.fail("origin must precede destination on one direction");
      }
      rethrow_at(row, [&] {
        if (kind == "rate") {
          od.set_rate(i, j, value);
        } else {
          od.set_count(i, j, value);
        }
      });
    }
  }
  if (node.has("lumps")) {
    const Node list = node.at("lumps");
    for (std::size_t e = 0; e < list.size(); ++e) {
      const Node c = list.at(e);
      c.expect_object({"origin", "destination", "time", "amount"});
      Cohort cohort{c.at("origin").integer(), c.at("destination").integer(), c.at("time").number(),
                    c.at("amount").non_negative()};
      if (!od.is_station(cohort.origin) || !od.is_station(cohort.destination) ||
          od.direction_of(cohort.origin) != od.direction_of(cohort.destination) ||
          cohort.destination <= cohort.origin) {
        c.fail("origin must precede destination on one direction");
      }
      lumps.push_back(cohort);
    }
  }
  return od;
}

int parse_service_count(const Node& node, double total, double capacity, double load_factor) {
  if (node.raw().is_string()) {
    if (node.string() != "auto") node.fail("must be an integer or \"auto\"");
    return std::max(1, required_services(total, capacity, load_factor));
  }
  const int k = node.integer();
  if (k < 1) node.fail("must be at least 1");
  return k;
}

void parse_config(const Node& node, Instance& inst) {
  node.expect_object({"mode", "objective", "services_up", "services_down", "h_min", "h_max",
                      "first_departure", "last_departure", "capacity", "load_factor", "fleet_size",
                      "max_skips", "epsilon", "big_m", "initial_accumulation"});
  ModelConfig& cfg = inst.config;
  if (node.has("mode")) {
    const std::string m = node.at("mode").string();
    if (m == "off_peak") {
      cfg.mode = OperatingMode::kOffPeak;
    } else if (m == "peak") {
      cfg.mode = OperatingMode::kPeak;
    } else {
      node.at("mode").fail("must be \"off_peak\" or \"peak\"");
    }
  }
  if (node.has("objective")) {
    const std::string o = node.at("objective").string();
    if (o == "cost") {
      cfg.objective = ObjectiveKind::kCost;
    } else if (o == "quality") {
      cfg.objective = ObjectiveKind::kQuality;
    } else if (o == "bi_objective") {
      cfg.objective = ObjectiveKind::kBiObjective;
    } else {
      node.at("objective").fail("must be \"cost\", \"quality\" or \"bi_objective\"");
    }
  }
  if (node.has("h_min")) cfg.h_min = node.at("h_min").positive();
  if (node.has("h_max")) cfg.h_max = node.at("h_max").positive();
  if (cfg.h_min > cfg.h_max) node.at("h_min").fail("must not exceed h_max");
  if (node.has("capacity")) cfg.capacity = node.at("capacity").positive();
  if (node.has("load_factor")) {
    const Node lf = node.at("load_factor");
    inst.load_factor = lf.positive();
    if (inst.load_factor > 1.0) lf.fail("must lie in (0, 1]");
  }
  if (node.has("fleet_size")) {
    const Node f = node.at("fleet_size");
    cfg.fleet_size = f.integer();
    if (cfg.fleet_size < 1) f.fail("must be at least 1");
  }
  if (node.has("max_skips")) {
    const Node s = node.at("max_skips");
    cfg.max_skips = s.integer();
    if (cfg.max_skips < 0) s.fail("must be non-negative");
  }
  if (node.has("epsilon")) inst.epsilon = node.at("epsilon").positive();
  if (node.has("big_m")) cfg.big_m = node.at("big_m").positive();
  if (node.has("initial_accumulation")) {
    cfg.initial_accumulation = node.at("initial_accumulation").non_negative();
  }
  const Node fd = node.at("first_departure");
  const auto f = fd.numbers(2);
  const Node ld = node.at("last_departure");
  const auto l = ld.numbers(2);
  cfg.first_departure_up = f[0];
  cfg.first_departure_down = f[1];
  cfg.last_departure_up = l[0];
  cfg.last_departure_down = l[1];
  for (std::size_t d = 0; d < 2; ++d) {
    if (!(f[d] < l[d])) ld.at(d).fail("must exceed the first departure");
  }
  cfg.services_up = parse_service_count(node.at("services_up"), directional_total(inst.demand, Direction::kUp),
                                        cfg.capacity, inst.load_factor);
  cfg.services_down =
      parse_service_count(node.at("services_down"), directional_total(inst.demand, Direction::kDown),
                          cfg.capacity, inst.load_factor);
  rethrow_at(node, [&] { cfg.validate_against(inst.topology); });
}

Timetable parse_timetable(const Node& node, int n) {
  Timetable out(n);
  const auto count = static_cast<std::size_t>(n);
  for (std::size_t s = 0; s < node.size(); ++s) {
    const Node item = node.at(s);
    item.expect_object({"service", "stops", "arrival", "departure"});
    const Node id_node = item.at("service");
    auto id = ServiceId::parse(id_node.string());
    if (!id) id_node.fail("must name a service such as u1 or d2");
    if (out.contains(*id)) id_node.fail("duplicate service");
    ServicePlan plan;
    plan.id = *id;
    plan.arrival = item.at("arrival").numbers(count);
    plan.departure = item.at("departure").numbers(count);
    const Node stops = item.at("stops");
    if (stops.size() != count) stops.fail("must have " + std::to_string(count) + " entries");
    const int first = out.first_station(id->direction);
    for (std::size_t p = 0; p < count; ++p) {
      const bool stop = stops.at(p).boolean();
      plan.stops.push_back(stop);
      if (!stop) continue;
      if (!plan.selected) plan.zone.start = first + static_cast<int>(p);
      plan.selected = true;
      plan.zone.end = first + static_cast<int>(p);
    }
    out.add(std::move(plan));
  }
  return out;
}

json numbers_json(const std::vector<double>& v) { return json(v); }

}  // namespace

Instance parse_instance(const json& doc) {
  const Node root(doc, "");
  root.expect_object({"name", "topology", "demand", "config", "timetable"});
  const Node topo_node = root.at("topology");
  if (!topo_node.raw().is_object()) topo_node.fail("must be an object");
  const Node n_node = topo_node.at("stations_per_direction");
  const int n = n_node.integer();
  if (n < 4) n_node.fail("must be at least 4");
  std::vector<Cohort> lumps;
  OdMatrix od = parse_demand(root.at("demand"), n, lumps);
  std::optional<DwellPolicy> policy;
  LineTopology topo = parse_topology(topo_node, &od, policy);
  Instance inst{root.has("name") ? root.at("name").string() : std::string("instance"), std::move(topo),
                std::move(od), ModelConfig{}, 0.8, 1.0, std::move(lumps), std::nullopt};
  parse_config(root.at("config"), inst);
  if (root.has("timetable")) inst.timetable = parse_timetable(root.at("timetable"), n);
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoFailure, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::kSchemaError, "/: not valid JSON (" + std::string(e.what()) + ")");
  }
  return parse_instance(doc);
}

json to_json(const Instance& inst) {
  const LineTopology& topo = inst.topology;
  const auto& p = topo.params();
  json t;
  t["stations_per_direction"] = p.stations_per_direction;
  t["short_turn"] = {p.short_turn_start, p.short_turn_end};
  t["pure_run_time"] = numbers_json(p.pure_run_time);
  t["accel_penalty"] = p.accel_penalty;
  t["decel_penalty"] = p.decel_penalty;
  t["dwell_time"] = numbers_json(p.dwell_time);
  t["min_turnaround"] = numbers_json(p.min_turnaround);

  json d;
  d["kind"] = "rate";
  d["horizon"] = {inst.demand.horizon_start(), inst.demand.horizon_end()};
  json entries = json::array();
  for (Direction dir : kDirections) {
    for (const auto& [i, j] : inst.demand.active_pairs(dir)) entries.push_back({i, j, inst.demand.rate(i, j)});
  }
  d["entries"] = entries;
  if (!inst.lumps.empty()) {
    json lumps = json::array();
    for (const Cohort& c : inst.lumps) {
      lumps.push_back({{"origin", c.origin}, {"destination", c.destination}, {"time", c.time}, {"amount", c.amount}});
    }
    d["lumps"] = lumps;
  }

  const ModelConfig& cfg = inst.config;
  json c;
  c["mode"] = to_string(cfg.mode);
  c["objective"] = to_string(cfg.objective);
  c["services_up"] = cfg.services_up;
  c["services_down"] = cfg.services_down;
  c["h_min"] = cfg.h_min;
  c["h_max"] = cfg.h_max;
  c["first_departure"] = {cfg.first_departure_up, cfg.first_departure_down};
  c["last_departure"] = {cfg.last_departure_up, cfg.last_departure_down};
  c["capacity"] = cfg.capacity;
  c["load_factor"] = inst.load_factor;
  c["fleet_size"] = cfg.fleet_size;
  c["max_skips"] = cfg.max_skips;
  c["epsilon"] = inst.epsilon;
  if (cfg.big_m) c["big_m"] = *cfg.big_m;
  c["initial_accumulation"] = cfg.initial_accumulation;

  json doc;
  doc["name"] = inst.name;
  doc["topology"] = t;
  doc["demand"] = d;
  doc["config"] = c;
  if (inst.timetable) {
    json list = json::array();
    for (const ServicePlan& plan : inst.timetable->services()) {
      json stops = json::array();
      for (bool s : plan.stops) stops.push_back(s ? 1 : 0);
      list.push_back({{"service", plan.id.name()},
                      {"stops", stops},
                      {"arrival", numbers_json(plan.arrival)},
                      {"departure", numbers_json(plan.departure)}});
    }
    doc["timetable"] = list;
  }
  return doc;
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << to_json(instance).dump(2) << '\n';
  if (!out) raise(ErrorCode::kIoFailure, "failed writing " + path.string());
}

std::uint64_t instance_hash(const Instance& instance) {
  const std::string text = to_json(instance).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace metrott
