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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/rng.h"
#include "cnd/mesh/context.h"
#include "cnd/mesh/snapshot.h"
#include "cnd/staging/store.h"

namespace cnd::mesh {

enum class StoreUse { kNone, kProduction, kStaging };
enum class Outcome { kOk, kError };

std::string StoreUseName(StoreUse use);
std::string OutcomeName(Outcome outcome);

struct Hop {
  ComponentId component;
  DeployId deploy;
  StoreUse store = StoreUse::kNone;
  double latency_ms = 0.0;
  Outcome outcome = Outcome::kOk;
  // Rows inserted by this hop, as (table, id).
  std::vector<std::pair<std::string, std::int64_t>> writes;
  std::string error;
};

struct Trace {
  std::string trace_id;
  std::vector<Hop> hops;
};

struct ServedMarker {
  ComponentId component;
  DeployId deploy;
  std::string marker;
};

struct Response {
  Outcome status = Outcome::kOk;
  // One per hop, in call order.
  std::vector<ServedMarker> markers;
  double latency_ms = 0.0;
};

struct EntryRoute {
  ComponentId component;
  std::string path = "/";
};

// Receives every hop and request outcome. Implementations must tolerate
// concurrent calls.
class HopObserver {
 public:
  virtual ~HopObserver() = default;
  virtual void OnHop(const RequestContext& ctx, const Hop& hop) = 0;
  virtual void OnRequest(const RequestContext& ctx, Outcome outcome) = 0;
};

struct ExecutionResult {
  Response response;
  Trace trace;
};

// Walks the component DAG depth-first from `entry`. Each hop resolves its
// deploy, draws latency then error from that deploy's behavior, and touches
// its tables through the realm chosen for `ctx`. A failed hop skips its own
// descendants; siblings still run. Fails only with kNoLiveDeploy.
absl::StatusOr<ExecutionResult> ExecuteRequest(const EntryRoute& entry,
                                               const RequestContext& ctx,
                                               const MeshSnapshot& snapshot,
                                               staging::StagingAwareStore& store,
                                               Rng& rng,
                                               HopObserver* observer = nullptr);

// One line per trace. Stable: used for byte-level determinism checks.
std::string FormatTrace(const Trace& trace);

}  // namespace cnd::mesh
