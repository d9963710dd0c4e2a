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

#include "cnd/mesh/snapshot.h"

namespace cnd::mesh {

const DeployInfo* MeshSnapshot::FindDeploy(const DeployId& id) const {
  auto it = deploys.find(id);
  return it == deploys.end() ? nullptr : &it->second;
}

const TrafficRule* MeshSnapshot::RuleFor(const ComponentId& component) const {
  auto it = rules.find(component);
  return it == rules.end() ? nullptr : &it->second;
}

const DeployInfo* MeshSnapshot::ReleasedDeploy(
    const ComponentId& component) const {
  for (const auto& [id, info] : deploys) {
    if (info.component == component && info.state == DeployState::kReleased) {
      return &info;
    }
  }
  return nullptr;
}

bool MeshSnapshot::IsRoutable(const ComponentId& component,
                              const DeployId& deploy) const {
  const DeployInfo* info = FindDeploy(deploy);
  return info != nullptr && info->component == component &&
         info->state != DeployState::kRetired;
}

}  // namespace cnd::mesh
