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
#include <map>
#include <memory>

#include "cnd/common/types.h"
#include "cnd/mesh/behavior.h"
#include "cnd/mesh/topology.h"
#include "cnd/mesh/traffic_rule.h"

namespace cnd::mesh {

struct DeployInfo {
  DeployId id;
  ComponentId component;
  DeployState state = DeployState::kPreproduction;
  VersionBehavior behavior;
};

// Immutable view of the mesh at one revision. A request holds one snapshot
// for its whole lifetime and so observes one consistent set of rules.
struct MeshSnapshot {
  std::shared_ptr<const Topology> topology;
  std::map<DeployId, DeployInfo> deploys;
  std::map<ComponentId, TrafficRule> rules;
  std::uint64_t revision = 0;

  const DeployInfo* FindDeploy(const DeployId& id) const;
  const TrafficRule* RuleFor(const ComponentId& component) const;
  const DeployInfo* ReleasedDeploy(const ComponentId& component) const;

  // Overridable: exists, belongs to `component`, and is not retired.
  bool IsRoutable(const ComponentId& component, const DeployId& deploy) const;
};

class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual std::shared_ptr<const MeshSnapshot> Current() const = 0;
};

}  // namespace cnd::mesh
