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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/types.h"

namespace cnd::mesh {

enum class ComponentKind {
  kGateway,
  kMeshService,
  kNearlineConsumer,
  kFrontendBundle,
};

std::string ComponentKindName(ComponentKind kind);
std::optional<ComponentKind> ParseComponentKind(std::string_view name);

struct ComponentSpec {
  ComponentId id;
  ComponentKind kind = ComponentKind::kMeshService;
  // Called in order, once per request.
  std::vector<ComponentId> downstream;
  std::vector<std::string> tables;
  // Subset of `tables` written on every request.
  std::vector<std::string> writes;

  bool Writes(const std::string& table) const;
};

// Validated component graph.
//
// Synchronous calls form a DAG with a single gateway. Every mesh service is
// reachable from the gateway. Frontend bundles sit outside the mesh and may
// only call the gateway; near-line consumers are entered from the event queue
// and are never called synchronously.
class Topology {
 public:
  static absl::StatusOr<Topology> Create(
      std::vector<ComponentSpec> components,
      const std::set<std::string>& table_names);

  const ComponentSpec* Find(const ComponentId& id) const;
  const std::vector<ComponentSpec>& components() const { return components_; }
  const ComponentId& gateway() const { return gateway_; }

  // Depth-first call order starting at `entry`, one element per call (a
  // component reached by two parents appears twice).
  std::vector<ComponentId> CallOrder(const ComponentId& entry) const;

 private:
  Topology() = default;

  std::vector<ComponentSpec> components_;
  std::map<ComponentId, std::size_t> index_;
  ComponentId gateway_;
};

}  // namespace cnd::mesh
