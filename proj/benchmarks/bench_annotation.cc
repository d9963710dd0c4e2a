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

#include "cnd/mesh/annotation.h"

namespace {

using namespace cnd;

mesh::RoutingAnnotation Sample(int overrides) {
  mesh::RoutingAnnotation a;
  for (int i = 0; i < overrides; ++i) {
    a.overrides["svc-" + std::to_string(i)] = "d" + std::to_string(100 + i);
  }
  a.staging = true;
  a.issued_at = 123456;
  a.nonce = 0x5eed;
  return a;
}

void BM_Sign(benchmark::State& state) {
  const auto key = *mesh::SigningKey::Create("bench-secret");
  const auto a = Sample(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mesh::SignAnnotation(a, key));
}
BENCHMARK(BM_Sign)->Arg(0)->Arg(1)->Arg(8);

void BM_VerifyWire(benchmark::State& state) {
  const auto key = *mesh::SigningKey::Create("bench-secret");
  const std::string wire =
      mesh::SignAnnotation(Sample(static_cast<int>(state.range(0))), key).ToWire();
  for (auto _ : state) {
    auto s = mesh::SignedAnnotation::FromWire(wire);
    bool ok = s.ok() && mesh::VerifyTag(*s, key) && mesh::DecodeAnnotation(s->payload).ok();
    benchmark::DoNotOptimize(ok);
  }
}
BENCHMARK(BM_VerifyWire)->Arg(0)->Arg(1)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
