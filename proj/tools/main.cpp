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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "metrott/error.hpp"
#include "metrott/fixtures.hpp"
#include "metrott/flow_sim.hpp"
#include "metrott/instance.hpp"
#include "metrott/model.hpp"
#include "metrott/mps.hpp"
#include "metrott/pareto.hpp"
#include "metrott/solver.hpp"
#include "metrott/timetable.hpp"
#include "metrott/topology.hpp"
#include "metrott/warm_start.hpp"

#ifndef METROTT_VERSION
#define METROTT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kTimeLimitEnv = "METROTT_TIME_LIMIT";

struct Options {
  std::string command;
  std::string instance;
  std::string period = "M";
  std::string model = "1a";
  std::optional<std::uint64_t> seed;
  std::optional<double> demand_factor;
  std::string out = ".";
  std::optional<double> time_limit;
  int threads = 1;
  bool warm_start = true;
  std::string timetable_csv;
  std::string baseline;
  double epsilon = 0.0;
  std::string direction = "quality";
  std::string file;
  std::vector<double> thresholds = {500.0, 1500.0};
  std::vector<double> group_dwell = {35.0, 40.0, 45.0};
  int min_span = 4;
};

std::string fixed(double value, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << value;
  return os.str();
}

std::string number(double value) {
  if (std::abs(value - std::round(value)) < 1e-9 && std::abs(value) < 1e15) {
    return std::to_string(static_cast<long long>(std::llround(value)));
  }
  std::ostringstream os;
  os << std::setprecision(10) << value;
  return os.str();
}

double default_time_limit() {
  if (const char* env = std::getenv(kTimeLimitEnv)) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
    metrott::raise(metrott::ErrorCode::kInvalidArgument,
                   std::string(kTimeLimitEnv) + " must be a positive number of seconds");
  }
  return 14400.0;
}

bool is_index(const std::string& text) {
  return std::count(text.begin(), text.end(), '-') == 2 &&
         std::all_of(text.begin(), text.end(), [](char c) { return c == '-' || (c >= '0' && c <= '9'); });
}

metrott::OperatingMode requested_mode(const Options& o) {
  auto id = metrott::parse_model_id(o.model);
  return id ? metrott::mode_of(*id) : metrott::OperatingMode::kOffPeak;
}

// Accepts a JSON file, a bundled fixture name or an R-S-T instance index.
metrott::Instance load(const Options& o, const std::string& source) {
  if (source.empty()) metrott::raise(metrott::ErrorCode::kInvalidArgument, "--instance is required");
  const std::uint64_t seed = o.seed.value_or(metrott::kDefaultDemandSeed);
  metrott::Instance inst = [&] {
    if (source == "santiago16") {
      metrott::Instance i = metrott::generate_line_instance({5, 16, 30}, metrott::Period::kMorning,
                                                            requested_mode(o), seed);
      i.name = "santiago16";
      return i;
    }
    const auto names = metrott::fixture_names();
    if (std::find(names.begin(), names.end(), source) != names.end()) return metrott::generate_fixture(source);
    if (is_index(source)) {
      return metrott::generate_line_instance(metrott::parse_instance_index(source), metrott::parse_period(o.period),
                                             requested_mode(o), seed);
    }
    return metrott::load_instance(source);
  }();
  if (o.demand_factor) {
    const double f = *o.demand_factor;
    if (f < 0.0) metrott::raise(metrott::ErrorCode::kNonPositiveFactor, "--demand must be non-negative");
    inst.demand = f == 0.0 ? metrott::OdMatrix(inst.demand.stations_per_direction(), inst.demand.horizon_start(),
                                               inst.demand.horizon_end())
                           : metrott::scale(inst.demand, f);
    for (metrott::Cohort& c : inst.lumps) c.amount *= f;
  }
  return inst;
}

metrott::ModelConfig model_config(const Options& o, const metrott::Instance& inst) {
  auto id = metrott::parse_model_id(o.model);
  if (!id) metrott::raise(metrott::ErrorCode::kInvalidArgument, "unknown model '" + o.model + "'");
  metrott::ModelConfig cfg = metrott::configure(inst.config, *id);
  cfg.validate_against(inst.topology);
  return cfg;
}

metrott::SolverOptions solver_options(const Options& o) {
  metrott::SolverOptions s;
  s.time_limit = o.time_limit.value_or(default_time_limit());
  s.threads = o.threads;
  s.validate();
  return s;
}

fs::path out_path(const Options& o, const std::string& file) {
  fs::create_directories(o.out);
  return fs::path(o.out) / file;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) metrott::raise(metrott::ErrorCode::kIoFailure, "cannot write " + path.string());
  return out;
}

void write_manifest(const Options& o, const metrott::Instance* inst, const json& results) {
  json m;
  std::ostringstream hash;
  if (inst != nullptr) hash << std::hex << std::setw(16) << std::setfill('0') << metrott::instance_hash(*inst);
  m["command"] = o.command;
  m["instance"] = {{"source", o.instance}, {"name", inst ? inst->name : ""}, {"hash", hash.str()}};
  m["options"] = {{"model", o.model},
                  {"period", o.period},
                  {"demand_factor", o.demand_factor ? json(*o.demand_factor) : json(nullptr)},
                  {"time_limit", o.time_limit ? json(*o.time_limit) : json(nullptr)},
                  {"threads", o.threads},
                  {"warm_start", o.warm_start}};
  m["seed"] = o.seed.value_or(metrott::kDefaultDemandSeed);
  m["versions"] = {{"metrott", METROTT_VERSION},
                   {"compiler", __VERSION__},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  m["results"] = results;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["timestamp"] = stamp;
  auto out = open_out(out_path(o, "manifest.json"));
  out << m.dump(2) << '\n';
}

int cmd_params(const Options& o) {
  const metrott::Instance inst = load(o, o.instance);
  const metrott::LineTopology& topo = inst.topology;
  const int n = topo.stations_per_direction();
  metrott::DwellPolicy policy{o.thresholds, o.group_dwell};
  policy.validate();

  std::cout << "instance " << inst.name << " (" << n << " stations per direction)\n";
  if (n >= o.min_span) {
    const auto [m, e] = metrott::site_intermediate_depots(inst.demand, o.min_span, metrott::Direction::kUp);
    std::cout << "high-demand window " << m << ".." << e << " (configured short turn "
              << topo.short_turn_start(metrott::Direction::kUp) << ".."
              << topo.short_turn_end(metrott::Direction::kUp) << ")\n";
  }
  json services;
  for (metrott::Direction dir : metrott::kDirections) {
    const double total = metrott::directional_total(inst.demand, dir);
    const int k = metrott::required_services(total, inst.config.capacity, inst.load_factor);
    std::cout << "services " << metrott::to_string(dir) << ": demand " << number(total) << " capacity "
              << number(inst.config.capacity) << " load factor " << number(inst.load_factor) << " -> " << k << '\n';
    services[std::string(metrott::to_string(dir))] = k;
  }
  std::cout << "station,crowdedness,group,dwell,run_time,min_turnaround\n";
  json stations = json::array();
  for (int s = 1; s <= 2 * n; ++s) {
    const double c = metrott::compute_crowdedness(inst.demand, s);
    const int g = policy.group_of(c);
    const double dwell = policy.group_dwell[static_cast<std::size_t>(g)];
    const bool first = s == 1 || s == n + 1;
    const double run = first ? 0.0 : topo.running_time(s);
    std::cout << s << ',' << number(c) << ',' << g << ',' << number(dwell) << ',' << number(run) << ','
              << number(topo.min_turnaround(s)) << '\n';
    stations.push_back({{"station", s}, {"crowdedness", c}, {"group", g}, {"dwell", dwell}, {"run_time", run}});
  }
  write_manifest(o, &inst, {{"services", services}, {"stations", stations}});
  return 0;
}

int cmd_build(const Options& o, bool mps_only) {
  const metrott::Instance inst = load(o, o.instance);
  const metrott::ModelConfig cfg = model_config(o, inst);
  const metrott::MilpInstance milp = metrott::assemble(cfg, inst.topology, inst.demand);
  const fs::path path = !o.file.empty() ? fs::path(o.file) : out_path(o, "model-" + o.model + ".mps");
  if (path == "-") {
    metrott::write_mps(std::cout, milp, inst.name);
    return 0;
  }
  metrott::write_mps(path, milp, inst.name);
  if (!mps_only) {
    std::cout << "model " << o.model << ": " << milp.num_variables() << " variables (" << milp.num_binaries()
              << " binary), " << milp.num_constraints() << " rows\n";
    for (const auto& [fam, count] : milp.family_counts()) std::cout << "  " << fam << ' ' << count << '\n';
  }
  std::cout << "wrote " << path.string() << '\n';
  write_manifest(o, &inst,
                 {{"mps", path.string()}, {"variables", milp.num_variables()}, {"rows", milp.num_constraints()}});
  return 0;
}

int cmd_solve(const Options& o) {
  const metrott::Instance inst = load(o, o.instance);
  const metrott::ModelConfig cfg = model_config(o, inst);
  const metrott::MilpInstance milp = metrott::assemble(cfg, inst.topology, inst.demand);
  metrott::SolverOptions sopt = solver_options(o);
  if (o.warm_start) {
    metrott::WarmStartOptions w;
    w.time_limit = std::min(w.time_limit, 0.25 * sopt.time_limit);
    sopt.initial_solution = metrott::construct_start(milp, cfg, inst.topology, w);
  }
  const metrott::MilpSolution sol = metrott::solve(milp, sopt);

  std::cout << "status " << metrott::to_string(sol.status) << '\n';
  json results = {{"status", metrott::to_string(sol.status)}, {"nodes", sol.nodes}};
  {
    auto out = open_out(out_path(o, "solution.txt"));
    metrott::write_solution(out, milp, sol);
  }
  if (sol.has_solution()) {
    std::cout << "objective " << number(sol.objective) << "\nbound " << number(sol.bound) << '\n';
    results["objective"] = sol.objective;
    results["bound"] = sol.bound;
    const metrott::Timetable tt = metrott::extract_timetable(milp, sol.values, inst.topology);
    {
      auto out = open_out(out_path(o, "timetable.csv"));
      metrott::write_timetable_csv(out, tt);
    }
    const metrott::FlowTrace trace =
        metrott::simulate(tt, inst.demand, cfg.capacity, cfg.initial_accumulation, inst.lumps);
    const auto issues = metrott::check_timetable(tt, inst.topology, cfg, &trace);
    int selected = 0;
    for (const auto& plan : tt.services()) {
      if (!plan.selected) continue;
      ++selected;
      std::cout << plan.id.name() << " zone " << plan.zone.start << "-" << plan.zone.end << " train " << plan.train
                << " depart " << number(plan.departure[static_cast<std::size_t>(tt.position(plan.zone.start))])
                << '\n';
    }
    std::cout << "selected services " << selected << "\nwaiting time " << number(trace.waiting_time)
              << "\nrule violations " << issues.size() << '\n';
    for (const auto& issue : issues) std::cout << "  " << issue.what << ' ' << number(issue.amount) << '\n';
    results["selected"] = selected;
    results["violations"] = issues.size();
  }
  write_manifest(o, &inst, results);
  return metrott::exit_code(sol.status);
}

struct SimResult {
  double waiting = 0.0;
  double finish = 0.0;
};

SimResult simulate_one(const Options& o, const metrott::Instance& inst, const std::string& csv,
                       const std::string& trace_file) {
  std::optional<metrott::Timetable> tt;
  if (!csv.empty()) {
    std::ifstream in(csv);
    if (!in) metrott::raise(metrott::ErrorCode::kIoFailure, "cannot open " + csv);
    tt = metrott::read_timetable_csv(in, inst.topology.stations_per_direction());
  } else if (inst.timetable) {
    tt = inst.timetable;
  } else {
    metrott::raise(metrott::ErrorCode::kInvalidArgument,
                   "instance " + inst.name + " has no timetable; pass --timetable");
  }
  const metrott::FlowTrace trace =
      metrott::simulate(*tt, inst.demand, inst.config.capacity, inst.config.initial_accumulation, inst.lumps);
  auto out = open_out(out_path(o, trace_file));
  metrott::write_trace_csv(out, trace);
  return {metrott::total_waiting_time(trace), metrott::finish_time(*tt)};
}

int cmd_simulate(const Options& o) {
  const metrott::Instance inst = load(o, o.instance);
  json results;
  std::optional<SimResult> base;
  if (!o.baseline.empty()) {
    const metrott::Instance b = load(o, o.baseline);
    base = simulate_one(o, b, "", "trace-baseline.csv");
    std::cout << "baseline " << b.name << ": waiting " << number(base->waiting) << " finish "
              << number(base->finish) << '\n';
    results["baseline"] = {{"name", b.name}, {"waiting", base->waiting}, {"finish", base->finish}};
  }
  const SimResult r = simulate_one(o, inst, o.timetable_csv, "trace.csv");
  std::cout << inst.name << ": waiting " << number(r.waiting) << " finish " << number(r.finish) << '\n';
  results["waiting"] = r.waiting;
  results["finish"] = r.finish;
  if (base) {
    const double finish_cut = base->finish > 0.0 ? 100.0 * (base->finish - r.finish) / base->finish : 0.0;
    const double wait_cut = base->waiting > 0.0 ? 100.0 * (base->waiting - r.waiting) / base->waiting : 0.0;
    std::cout << "finish time reduction " << fixed(finish_cut, 2) << "%\n"
              << "waiting time reduction " << fixed(wait_cut, 2) << "%\n";
    results["finish_reduction_percent"] = finish_cut;
    results["waiting_reduction_percent"] = wait_cut;
  }
  write_manifest(o, &inst, results);
  return 0;
}

int cmd_pareto(const Options& o) {
  const metrott::Instance inst = load(o, o.instance);
  const metrott::ModelConfig cfg = model_config(o, inst);
  metrott::SweepOptions sw;
  sw.epsilon = o.epsilon > 0.0 ? o.epsilon : inst.epsilon;
  if (o.direction == "quality") {
    sw.direction = metrott::SweepDirection::kQualityPrimary;
  } else if (o.direction == "cost") {
    sw.direction = metrott::SweepDirection::kCostPrimary;
  } else {
    metrott::raise(metrott::ErrorCode::kInvalidArgument, "--direction must be quality or cost");
  }
  sw.solver = solver_options(o);
  const metrott::SweepResult res = metrott::sweep(cfg, inst.topology, inst.demand, sw);
  {
    auto out = open_out(out_path(o, "frontier.csv"));
    metrott::write_frontier_csv(out, inst.name, res.frontier);
  }
  std::cout << "iterations " << res.iterations << (res.complete ? "" : " (stopped by a limit)") << '\n';
  json points = json::array();
  for (const auto& p : res.frontier) {
    std::cout << "obj1 " << number(p.obj1) << " obj2 " << number(p.obj2) << '\n';
    points.push_back({{"obj1", p.obj1}, {"obj2", p.obj2}});
  }
  write_manifest(o, &inst, {{"frontier", points}, {"complete", res.complete}, {"iterations", res.iterations}});
  return res.complete ? 0 : 3;
}

int cmd_fixture(const Options& o, const std::string& name) {
  Options copy = o;
  const metrott::Instance inst = load(copy, name);
  const fs::path path = !o.file.empty() ? fs::path(o.file) : out_path(o, inst.name + ".json");
  metrott::save_instance(path, inst);
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Timetabling with short-turning, skip-stop and rolling stock assignment on a metro line"};
  app.require_subcommand(1);
  app.set_version_flag("--version", METROTT_VERSION);

  auto common = [&o](CLI::App* sub, bool model) {
    sub->add_option("-i,--instance", o.instance, "Instance JSON file, fixture name or R-S-T index")->required();
    sub->add_option("--period", o.period, "Period of an R-S-T index: M, MD or E");
    sub->add_option("--seed", o.seed, "Seed of the synthetic demand generator");
    sub->add_option("--demand", o.demand_factor, "Multiply every demand rate by this factor");
    sub->add_option("-o,--out", o.out, "Output directory");
    if (model) sub->add_option("-m,--model", o.model, "Model: 1a, 1b, 2a, 2b, 3a or 3b");
  };
  auto solving = [&o](CLI::App* sub) {
    sub->add_option("-t,--time-limit", o.time_limit,
                    std::string("Solver time limit in seconds (default from ") + kTimeLimitEnv + " or 14400)");
    sub->add_option("--threads", o.threads, "Worker threads for node solving");
  };

  CLI::App* params = app.add_subcommand("params", "Print derived line, demand and dwell quantities");
  common(params, false);
  params->add_option("--thresholds", o.thresholds, "Crowdedness thresholds of the dwell groups")->delimiter(',');
  params->add_option("--group-dwell", o.group_dwell, "Dwell seconds per group")->delimiter(',');
  params->add_option("--min-span", o.min_span, "Minimum stations of the high-demand window");

  CLI::App* build = app.add_subcommand("build", "Assemble a model and write it as MPS");
  common(build, true);
  build->add_option("-f,--file", o.file, "MPS path ('-' for stdout)");

  CLI::App* export_mps = app.add_subcommand("export-mps", "Write the MPS file of a model only");
  common(export_mps, true);
  export_mps->add_option("-f,--file", o.file, "MPS path ('-' for stdout)");

  CLI::App* solve = app.add_subcommand("solve", "Solve a model and write the solution and timetable");
  common(solve, true);
  solving(solve);
  solve->add_flag("!--no-warm-start", o.warm_start, "Skip the regular-timetable starting solution");

  CLI::App* simulate = app.add_subcommand("simulate", "Replay a timetable with FIFO boarding");
  common(simulate, false);
  simulate->add_option("--timetable", o.timetable_csv, "Timetable CSV (default: the instance timetable)");
  simulate->add_option("--baseline", o.baseline, "Instance whose timetable is the comparison baseline");

  CLI::App* pareto = app.add_subcommand("pareto", "Sweep the bi-objective frontier");
  common(pareto, true);
  solving(pareto);
  pareto->add_option("--epsilon", o.epsilon, "Cut step (default: instance epsilon)");
  pareto->add_option("--direction", o.direction, "Primary objective of the sweep: quality or cost");

  std::string fixture_name;
  CLI::App* fixture = app.add_subcommand("fixture", "Write a bundled instance as JSON");
  fixture->add_option("name", fixture_name, "santiago16, tiny8, fig5-standard, fig5-skip or R-S-T")->required();
  fixture->add_option("--period", o.period, "Period of an R-S-T index");
  fixture->add_option("--seed", o.seed, "Seed of the synthetic demand generator");
  fixture->add_option("-m,--model", o.model, "Model whose mode the generated demand follows");
  fixture->add_option("-o,--out", o.out, "Output directory");
  fixture->add_option("-f,--file", o.file, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    o.command = sub->get_name();
    if (sub == params) return cmd_params(o);
    if (sub == build) return cmd_build(o, false);
    if (sub == export_mps) return cmd_build(o, true);
    if (sub == solve) return cmd_solve(o);
    if (sub == simulate) return cmd_simulate(o);
    if (sub == pareto) return cmd_pareto(o);
    if (sub == fixture) return cmd_fixture(o, fixture_name);
  } catch (const metrott::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
