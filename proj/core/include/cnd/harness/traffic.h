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
#include <functional>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/harness/binding.h"
#include "cnd/harness/metrics.h"
#include "cnd/mesh/executor.h"

namespace cnd::harness {

struct WeightedRoute {
  mesh::EntryRoute route;
  int weight = 1;
};

struct TrafficProfile {
  // Requests per tick.
  int rate = 10;
  std::vector<WeightedRoute> mix;
  Tick duration_ticks = 60;
  std::uint64_t seed = 1;

  absl::Status Validate() const;
};

struct TrafficOptions {
  // Called after each tick, with the clock already advanced.
  std::function<void(Tick)> on_tick;
  // One FormatTrace line per request.
  std::ostream* trace_log = nullptr;
  // Prefix for generated trace ids.
  std::string trace_prefix = "p";
};

struct TrafficResult {
  Tick from = 0;
  Tick to = 0;
  std::uint64_t requests = 0;
  std::uint64_t errors = 0;
  // Requests that could not be routed at all.
  std::uint64_t rejected = 0;
  std::map<DeployId, MetricsWindow> windows;
};

// Issues rate x ticks unannotated requests, one tick at a time, advancing
// the clock after each tick. Each request runs against the snapshot current
// when it starts. Deterministic for a given profile seed.
absl::StatusOr<TrafficResult> RunProductionTraffic(
    const TrafficProfile& profile, MeshBinding& mesh, Tick ticks,
    const TrafficOptions& options = {});

}  // namespace cnd::harness
