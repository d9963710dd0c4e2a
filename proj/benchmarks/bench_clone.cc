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
#include <vector>

#include "cnd/common/rng.h"
#include "cnd/staging/store.h"

namespace {

using namespace cnd;
using staging::ColumnType;
using staging::DataTag;

std::vector<staging::TableSchema> Schemas() {
  staging::TableSchema users;
  users.name = "users";
  users.columns = {{"id", ColumnType::kInt, DataTag::kNone},
                   {"email", ColumnType::kString, DataTag::kPiiDirect},
                   {"zip", ColumnType::kString, DataTag::kPiiQuasi},
                   {"password", ColumnType::kBlob, DataTag::kPassword},
                   {"locale", ColumnType::kString, DataTag::kNone}};
  return {users};
}

void BM_Clone(benchmark::State& state) {
  staging::StagingAwareStore store(Schemas());
  Rng rng(4);
  for (int64_t i = 0; i < state.range(0); ++i) {
    (void)store.LoadProductionRow(
        "users", {{"email", "u" + std::to_string(rng.Next()) + "@example.org"},
                  {"zip", "12345"},
                  {"password", "hash$" + std::to_string(rng.Next())},
                  {"locale", "en-US"}});
  }
  std::int64_t date = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.CloneStaging({}, date++, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Clone)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
