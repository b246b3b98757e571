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

#ifndef METROTT_MODEL_HPP_
#define METROTT_MODEL_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metrott/demand.hpp"
#include "metrott/milp.hpp"
#include "metrott/topology.hpp"
#include "metrott/types.hpp"

namespace metrott {

enum class OperatingMode { kOffPeak, kPeak };
enum class ObjectiveKind { kCost, kQuality, kBiObjective };
enum class ModelId { k1a, k1b, k2a, k2b, k3a, k3b };

std::string to_string(OperatingMode mode);
std::string to_string(ObjectiveKind objective);
std::string to_string(ModelId id);
std::optional<ModelId> parse_model_id(std::string_view text);
OperatingMode mode_of(ModelId id);
ObjectiveKind objective_of(ModelId id);

// Constraint family tags (row-name prefixes).
namespace family {
inline constexpr std::string_view kZone = "zone";
inline constexpr std::string_view kTimetable = "timetable";
inline constexpr std::string_view kHeadway = "headway";
inline constexpr std::string_view kTurnaround = "turnaround";
inline constexpr std::string_view kRollingStock = "rolling_stock";
inline constexpr std::string_view kDemand = "demand";
inline constexpr std::string_view kSkipStop = "skip_stop";
inline constexpr std::string_view kLinearization = "linearization";
inline constexpr std::string_view kObjectiveLink = "objective_link";
}  // namespace family

// Names of the objectives stored on every assembled instance.
inline constexpr std::string_view kCostObjective = "obj1";
inline constexpr std::string_view kQualityObjective = "obj2";

struct ModelConfig {
  OperatingMode mode = OperatingMode::kOffPeak;
  ObjectiveKind objective = ObjectiveKind::kCost;
  int services_up = 0;
  int services_down = 0;
  double h_min = 90.0;
  double h_max = 360.0;
  double first_departure_up = 0.0;
  double first_departure_down = 0.0;
  double last_departure_up = 0.0;
  double last_departure_down = 0.0;
  double capacity = 250.0;
  int fleet_size = 5;
  int max_skips = 4;
  // Optional global big-M; must dominate the time horizon when given. Rows
  // always use their own tight constant.
  std::optional<double> big_m;
  double initial_accumulation = 120.0;

  int services(Direction direction) const {
    return direction == Direction::kUp ? services_up : services_down;
  }
  double first_departure(Direction direction) const {
    return direction == Direction::kUp ? first_departure_up : first_departure_down;
  }
  double last_departure(Direction direction) const {
    return direction == Direction::kUp ? last_departure_up : last_departure_down;
  }
  void validate() const;
  void validate_against(const LineTopology& topo) const;
};

// Applies the mode and objective of a named model to a base configuration.
ModelConfig configure(ModelConfig base, ModelId id);

struct Zone {
  int start = 0;  // global station ids, start < end
  int end = 0;
  int size() const { return end - start + 1; }
  bool contains(int station) const { return station >= start && station <= end; }
};

// The four operation zones of a direction, ordered (first,last),
// (first,short_end), (short_start,last), (short_start,short_end).
std::vector<Zone> operation_zones(const LineTopology& topo, Direction direction);

// Variable names of the naming grammar.
namespace names {
std::string tau(ServiceId k);
std::string z(ServiceId k, int m, int n);
std::string x(ServiceId k, int i);
std::string y(ServiceId k, ServiceId l, int m);
std::string alpha(ServiceId k, int depot);
std::string beta(ServiceId k, int depot);
std::string h(ServiceId k);
std::string a(ServiceId k, int i);
std::string d(ServiceId k, int i);
std::string rs(int depot);
std::string w(ServiceId k, int i, int j);
std::string and_indicator(ServiceId k, int i, int j);
std::string wb(ServiceId k, int i, int j);
std::string nb(ServiceId k, int i, int j);
std::string v(ServiceId k, int i, int j);
std::string wb(ServiceId k, int i);
std::string nb(ServiceId k, int i);
std::string na(ServiceId k, int i);
std::string n(ServiceId k, int i);
std::string min_indicator(ServiceId k, int i);
std::string tt(ServiceId k, int m, int n);
}  // namespace names

// Upstream depots pull out on the upstream side; depot roles per direction.
struct DepotRoles {
  std::array<int, 2> sources;  // depots that may start a service
  std::array<int, 2> sinks;    // depots that may absorb a finished service
};
DepotRoles depot_roles(Direction direction);

// Typed view of the decision variables declared on an instance. Holds a
// reference to the instance, which must outlive the catalog.
class VariableCatalog {
 public:
  // Declares every variable of the configured model on the instance.
  static VariableCatalog declare(const ModelConfig& cfg, const LineTopology& topo,
                                 const OdMatrix& od, MilpInstance& instance);

  const MilpInstance& instance() const { return *instance_; }
  std::vector<ServiceId> services(Direction direction) const;
  const std::vector<Zone>& zones(Direction direction) const;
  const std::vector<std::pair<int, int>>& active_pairs(Direction direction) const;
  // Stations of a direction with at least one outgoing demand stream.
  bool has_outgoing(int station) const;
  // Upper bound on the waiting stock of stream (i, j) at any service.
  double stream_bound(int origin, int destination) const;
  double station_stream_bound(int origin) const;

  int tau(ServiceId k) const;
  int z(ServiceId k, const Zone& zone) const;
  int x(ServiceId k, int i) const;
  int y(ServiceId k, ServiceId l, int m) const;
  int alpha(ServiceId k, int depot) const;
  int beta(ServiceId k, int depot) const;
  int h(ServiceId k) const;  // k.index >= 2
  int a(ServiceId k, int i) const;
  int d(ServiceId k, int i) const;
  int rs(int depot) const;
  int w(ServiceId k, int i, int j) const;
  int and_indicator(ServiceId k, int i, int j) const;
  int wb(ServiceId k, int i, int j) const;
  int nb(ServiceId k, int i, int j) const;
  int v(ServiceId k, int i, int j) const;
  int wb(ServiceId k, int i) const;
  int nb(ServiceId k, int i) const;
  int na(ServiceId k, int i) const;
  int n(ServiceId k, int i) const;
  int min_indicator(ServiceId k, int i) const;
  int tt(ServiceId k, const Zone& zone) const;

  // Ends of the service-level turnaround arcs: a service of `direction`
  // ending at one of these stations may hand its train over.
  std::array<int, 2> handover_stations(Direction direction) const;

 private:
  int lookup(const std::string& name) const;

  const MilpInstance* instance_ = nullptr;
  int n_ = 0;
  int k_up_ = 0;
  int k_dn_ = 0;
  std::array<std::vector<Zone>, 2> zones_;
  std::array<std::vector<std::pair<int, int>>, 2> pairs_;
  std::array<int, 2> handover_up_{};
  std::array<int, 2> handover_dn_{};
  std::vector<double> stream_bound_;  // dense (2N)^2
  std::vector<double> station_bound_;
};

std::vector<Constraint> build_zone_constraints(const ModelConfig& cfg, const LineTopology& topo,
                                               const VariableCatalog& cat);
std::vector<Constraint> build_timetable_constraints(const ModelConfig& cfg,
                                                    const LineTopology& topo,
                                                    const VariableCatalog& cat);
std::vector<Constraint> build_headway_constraints(const ModelConfig& cfg,
                                                  const LineTopology& topo,
                                                  const VariableCatalog& cat);
std::vector<Constraint> build_turnaround_constraints(const ModelConfig& cfg,
                                                     const LineTopology& topo,
                                                     const VariableCatalog& cat);
std::vector<Constraint> build_rollingstock_constraints(const ModelConfig& cfg,
                                                       const LineTopology& topo,
                                                       const VariableCatalog& cat);
std::vector<Constraint> build_demand_constraints(const ModelConfig& cfg, const LineTopology& topo,
                                                 const OdMatrix& od, const VariableCatalog& cat);
// Peak mode only; throws ModeMismatch otherwise.
std::vector<Constraint> build_skipstop_constraints(const ModelConfig& cfg,
                                                   const LineTopology& topo,
                                                   const VariableCatalog& cat);

// Maximize the number of turnaround links.
Objective build_objective_cost(const VariableCatalog& cat);

struct QualityObjective {
  Objective objective;
  std::vector<Constraint> rows;  // product rows of the travel-time terms
};
// Minimize zone travel time plus headways, with the products of zone
// selection and departure differences replaced by bounded auxiliaries.
QualityObjective build_objective_quality(const VariableCatalog& cat, const ModelConfig& cfg,
                                         const LineTopology& topo);

MilpInstance assemble(const ModelConfig& cfg, const LineTopology& topo, const OdMatrix& od);

// Evaluates the unlinearized quality objective on an assignment.
double evaluate_quality(const MilpInstance& instance, const ModelConfig& cfg,
                        const LineTopology& topo, std::span<const double> values);

}  // namespace metrott

#endif  // METROTT_MODEL_HPP_
