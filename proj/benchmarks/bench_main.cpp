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

#include <sstream>

#include <benchmark/benchmark.h>

#include "metrott/fixtures.hpp"
#include "metrott/flow_sim.hpp"
#include "metrott/lp.hpp"
#include "metrott/model.hpp"
#include "metrott/mps.hpp"
#include "metrott/solver.hpp"
#include "metrott/timetable.hpp"
#include "metrott/warm_start.hpp"

namespace {

using namespace metrott;

void BM_AssembleSantiago16(benchmark::State& state) {
  const Instance inst = generate_fixture("santiago16");
  const ModelConfig cfg = configure(inst.config, ModelId::k1a);
  for (auto _ : state) {
    MilpInstance milp = assemble(cfg, inst.topology, inst.demand);
    benchmark::DoNotOptimize(milp.num_constraints());
  }
}
BENCHMARK(BM_AssembleSantiago16)->Unit(benchmark::kMillisecond);

void BM_SimulateSantiago16(benchmark::State& state) {
  const Instance inst = generate_fixture("santiago16");
  const ModelConfig cfg = configure(inst.config, ModelId::k1a);
  const auto tt = regular_timetable(cfg, inst.topology, {cfg.services_up, std::nullopt, cfg.h_min},
                                    {cfg.services_down, std::nullopt, cfg.h_min});
  if (!tt) {
    state.SkipWithError("no regular timetable");
    return;
  }
  for (auto _ : state) {
    const FlowTrace trace = simulate(*tt, inst.demand, cfg.capacity, cfg.initial_accumulation);
    benchmark::DoNotOptimize(trace.waiting_time);
  }
}
BENCHMARK(BM_SimulateSantiago16)->Unit(benchmark::kMicrosecond);

void BM_WriteMps(benchmark::State& state) {
  const Instance inst = generate_fixture("santiago16");
  const MilpInstance milp = assemble(configure(inst.config, ModelId::k1a), inst.topology, inst.demand);
  for (auto _ : state) {
    std::ostringstream out;
    write_mps(out, milp);
    benchmark::DoNotOptimize(out.str().size());
  }
}
BENCHMARK(BM_WriteMps)->Unit(benchmark::kMillisecond);

void BM_RootRelaxation(benchmark::State& state) {
  const char* name = state.range(0) == 0 ? "tiny8" : "santiago16";
  const Instance inst = generate_fixture(name);
  const MilpInstance milp = assemble(configure(inst.config, ModelId::k1a), inst.topology, inst.demand);
  for (auto _ : state) {
    DualSimplex lp(milp);
    const LpResult r = lp.solve();
    benchmark::DoNotOptimize(r.objective);
  }
  state.SetLabel(name);
}
BENCHMARK(BM_RootRelaxation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_SolveTiny8Model2a(benchmark::State& state) {
  const Instance inst = generate_fixture("tiny8");
  const MilpInstance milp = assemble(configure(inst.config, ModelId::k2a), inst.topology, inst.demand);
  for (auto _ : state) {
    const MilpSolution sol = solve(milp);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_SolveTiny8Model2a)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
