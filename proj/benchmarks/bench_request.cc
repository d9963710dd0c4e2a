// Copyright 2026 The cndsim Authors
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

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <iostream>
#include <memory>

#include "cnd/common/rng.h"
#include "cnd/control/control_plane.h"
#include "cnd/control/scenario.h"
#include "cnd/mesh/executor.h"

namespace {

using namespace cnd;

std::unique_ptr<control::ControlPlane> Plane() {
  auto config = control::LoadScenario(CND_SCENARIO);
  if (!config.ok()) {
    std::cerr << config.status() << "\n";
    std::abort();
  }
  config->probe.suite.clear();
  return *control::ControlPlane::Create(*std::move(config));
}

// One request through gateway -> svc-a/svc-b -> svc-c, including writes.
void BM_ExecuteRequest(benchmark::State& state) {
  auto cp = Plane();
  const auto snapshot = cp->releases().Current();
  const mesh::EntryRoute entry{"gateway", state.range(0) ? "/enroll" : "/home"};
  Rng rng(3);
  const auto ctx = mesh::RequestContext::Production("bench", 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mesh::ExecuteRequest(entry, ctx, *snapshot, cp->store(), rng, &cp->metrics()));
  }
}
BENCHMARK(BM_ExecuteRequest)->Arg(0)->Arg(1);

// A simulated minute of the default traffic profile.
void BM_SimulateMinute(benchmark::State& state) {
  auto cp = Plane();
  for (auto _ : state) benchmark::DoNotOptimize(cp->Simulate(std::nullopt, 60));
  state.SetItemsProcessed(state.iterations() * 60 * cp->config().traffic.rate);
}
BENCHMARK(BM_SimulateMinute)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
