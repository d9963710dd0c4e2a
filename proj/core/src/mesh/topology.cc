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

#include "cnd/mesh/topology.h"

#include <algorithm>
#include <array>
#include <functional>
#include <utility>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::mesh {
namespace {

constexpr std::array<std::pair<ComponentKind, std::string_view>, 4> kKinds = {{
    {ComponentKind::kGateway, "gateway"},
    {ComponentKind::kMeshService, "mesh-service"},
    {ComponentKind::kNearlineConsumer, "nearline-consumer"},
    {ComponentKind::kFrontendBundle, "frontend-bundle"},
}};

absl::Status Invalid(const std::string& message) {
  return MakeError(ErrorKind::kValidationError, message);
}

}  // namespace

std::string ComponentKindName(ComponentKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return std::string(name);
  }
  return "unknown";
}

std::optional<ComponentKind> ParseComponentKind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool ComponentSpec::Writes(const std::string& table) const {
  return std::find(writes.begin(), writes.end(), table) != writes.end();
}

absl::StatusOr<Topology> Topology::Create(
    std::vector<ComponentSpec> components,
    const std::set<std::string>& table_names) {
  Topology topo;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    if (!IsValidToken(c.id)) {
      return Invalid(absl::StrCat("component id '", c.id, "' is not a token"));
    }
    if (!topo.index_.emplace(c.id, i).second) {
      return Invalid(absl::StrCat("duplicate component id '", c.id, "'"));
    }
  }

  std::size_t gateways = 0;
  for (const auto& c : components) {
    if (c.kind == ComponentKind::kGateway) {
      ++gateways;
      topo.gateway_ = c.id;
    }
    for (const auto& t : c.tables) {
      if (!table_names.count(t)) {
        return Invalid(absl::StrCat(c.id, ": unknown table '", t, "'"));
      }
    }
    for (const auto& t : c.writes) {
      if (std::find(c.tables.begin(), c.tables.end(), t) == c.tables.end()) {
        return Invalid(
            absl::StrCat(c.id, ": writes '", t, "' which is not in tables"));
      }
    }
    for (const auto& d : c.downstream) {
      auto it = topo.index_.find(d);
      if (it == topo.index_.end()) {
        return Invalid(absl::StrCat(c.id, ": unknown downstream '", d, "'"));
      }
      const ComponentKind target = components[it->second].kind;
      if (target == ComponentKind::kNearlineConsumer ||
          target == ComponentKind::kFrontendBundle) {
        return Invalid(absl::StrCat(c.id, ": cannot call ", d, " (",
                                    ComponentKindName(target), ")"));
      }
      if (target == ComponentKind::kGateway &&
          c.kind != ComponentKind::kFrontendBundle) {
        return Invalid(
            absl::StrCat(c.id, ": only frontend bundles may call the gateway"));
      }
    }
    if (c.kind == ComponentKind::kFrontendBundle) {
      for (const auto& d : c.downstream) {
        if (components[topo.index_[d]].kind != ComponentKind::kGateway) {
          return Invalid(absl::StrCat(
              c.id, ": frontend bundles reach the mesh only via the gateway"));
        }
      }
    }
  }
  if (gateways != 1) {
    return Invalid(
        absl::StrCat("expected exactly one gateway, found ", gateways));
  }

  // Cycle check (0 = unvisited, 1 = on stack, 2 = done).
  std::vector<int> color(components.size(), 0);
  std::function<bool(std::size_t)> acyclic = [&](std::size_t i) {
    color[i] = 1;
    for (const auto& d : components[i].downstream) {
      const std::size_t j = topo.index_[d];
      if (color[j] == 1) return false;
      if (color[j] == 0 && !acyclic(j)) return false;
    }
    color[i] = 2;
    return true;
  };
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (color[i] == 0 && !acyclic(i)) {
      return Invalid(absl::StrCat("call graph has a cycle through '",
                                  components[i].id, "'"));
    }
  }

  std::vector<bool> reached(components.size(), false);
  std::function<void(std::size_t)> mark = [&](std::size_t i) {
    if (reached[i]) return;
    reached[i] = true;
    for (const auto& d : components[i].downstream) mark(topo.index_[d]);
  };
  mark(topo.index_[topo.gateway_]);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].kind == ComponentKind::kMeshService && !reached[i]) {
      return Invalid(absl::StrCat("mesh service '", components[i].id,
                                  "' is not reachable from the gateway"));
    }
  }

  topo.components_ = std::move(components);
  return topo;
}

const ComponentSpec* Topology::Find(const ComponentId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &components_[it->second];
}

std::vector<ComponentId> Topology::CallOrder(const ComponentId& entry) const {
  std::vector<ComponentId> order;
  std::function<void(const ComponentId&)> walk = [&](const ComponentId& id) {
    const ComponentSpec* spec = Find(id);
    if (spec == nullptr) return;
    order.push_back(id);
    for (const auto& d : spec->downstream) walk(d);
  };
  walk(entry);
  return order;
}

}  // namespace cnd::mesh
