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

#ifndef METROTT_INSTANCE_HPP_
#define METROTT_INSTANCE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metrott/demand.hpp"
#include "metrott/flow_sim.hpp"
#include "metrott/model.hpp"
#include "metrott/timetable.hpp"
#include "metrott/topology.hpp"

namespace metrott {

// Everything needed to build, solve or simulate one scenario.
struct Instance {
  std::string name;
  LineTopology topology;
  OdMatrix demand;
  ModelConfig config;
  double load_factor = 0.8;
  double epsilon = 1.0;
  std::vector<Cohort> lumps;
  std::optional<Timetable> timetable;
};

// Validates a JSON document against the instance schema. Failures raise
// SchemaError whose message starts with the JSON pointer of the offending
// value, for example "/config/h_min: must be positive".
Instance parse_instance(const nlohmann::json& doc);
Instance load_instance(const std::filesystem::path& path);

// Canonical document: explicit running and dwell times, rates by pair and
// resolved service counts. parse_instance(to_json(x)) reproduces x.
nlohmann::json to_json(const Instance& instance);
void save_instance(const std::filesystem::path& path, const Instance& instance);

// FNV-1a over the canonical serialization.
std::uint64_t instance_hash(const Instance& instance);

}  // namespace metrott

#endif  // METROTT_INSTANCE_HPP_
