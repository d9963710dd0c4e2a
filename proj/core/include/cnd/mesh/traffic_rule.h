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
#include <vector>

#include "absl/status/status.h"
#include "cnd/common/types.h"

namespace cnd::mesh {

struct WeightedDeploy {
  DeployId deploy;
  // Integer percent of production traffic.
  int weight = 0;

  bool operator==(const WeightedDeploy&) const = default;
};

// Weighted distribution of a component's production traffic over its
// deploys. Canary and blue-green states are both just weight splits.
struct TrafficRule {
  ComponentId component;
  std::vector<WeightedDeploy> entries;
  std::uint64_t version = 0;

  int WeightOf(const DeployId& deploy) const;
  int TotalWeight() const;

  // Non-negative weights summing to exactly 100, no duplicate deploys.
  absl::Status Validate() const;

  bool operator==(const TrafficRule&) const = default;
};

std::string FormatRule(const TrafficRule& rule);

}  // namespace cnd::mesh
