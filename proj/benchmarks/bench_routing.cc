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

#include <string>

#include "cnd/common/rng.h"
#include "cnd/mesh/context.h"
#include "cnd/mesh/router.h"
#include "cnd/mesh/traffic_rule.h"

namespace {

using namespace cnd;

mesh::TrafficRule RuleWith(int entries) {
  mesh::TrafficRule rule{"svc-a", {}, 1};
  int left = 100;
  for (int i = 0; i < entries; ++i) {
    const int w = i + 1 == entries ? left : 100 / entries;
    rule.entries.push_back({"d" + std::to_string(i), w});
    left -= w;
  }
  return rule;
}

void BM_ResolveProduction(benchmark::State& state) {
  const auto rule = RuleWith(static_cast<int>(state.range(0)));
  const auto ctx = mesh::RequestContext::Production("bench", 0);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesh::ResolveRoute("svc-a", ctx, rule, rng));
  }
}
BENCHMARK(BM_ResolveProduction)->Arg(1)->Arg(2)->Arg(8);

void BM_ResolveOverride(benchmark::State& state) {
  const auto rule = RuleWith(2);
  mesh::RoutingAnnotation a;
  a.overrides["svc-a"] = "preview";
  const auto ctx = mesh::RequestContext::FromAnnotation("bench", a, 0);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesh::ResolveRoute("svc-a", ctx, rule, rng));
  }
}
BENCHMARK(BM_ResolveOverride);

}  // namespace

BENCHMARK_MAIN();
