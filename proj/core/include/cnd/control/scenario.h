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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/harness/suite.h"
#include "cnd/harness/traffic.h"
#include "cnd/lifecycle/deploy.h"
#include "cnd/lifecycle/error_budget.h"
#include "cnd/lifecycle/release_manager.h"
#include "cnd/mesh/topology.h"
#include "cnd/staging/schema.h"
#include "cnd/staging/store.h"

namespace cnd::control {

struct InitialDeploy {
  DeployId id;
  lifecycle::DeploySpec spec;
};

struct ComponentConfig {
  mesh::ComponentSpec spec;
  InitialDeploy release;
  // Named behaviors new deploys of this component may reference by version.
  std::map<std::string, mesh::VersionBehavior> versions;
};

struct TopicConfig {
  std::string name;
  ComponentId consumer;
};

struct PipelineSettings {
  std::string suite = "core";
  std::optional<int> canary_percent;
  // Traffic observed per canary/shift step before judging it.
  Tick observe_ticks = 5 * kTicksPerMinute;
  // Upper bound while waiting for min_samples; the verdict fails closed.
  Tick max_observe_ticks = kTicksPerHour;
  // Traffic observed after finalize before comparing against the baseline.
  Tick verify_ticks = 5 * kTicksPerMinute;
};

struct ProbeSettings {
  std::string suite;  // empty disables probes during simulate
  Tick cadence_ticks = kTicksPerHour;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::string secret;
  std::vector<ComponentConfig> components;
  std::vector<staging::TableSchema> tables;
  std::map<std::string, std::vector<staging::Row>> seed_data;
  std::map<std::string, std::vector<staging::Row>> static_test_data;
  staging::ClonePolicy clone_policy;
  lifecycle::LifecycleConfig lifecycle;
  lifecycle::Slo slo;
  std::vector<TopicConfig> topics;
  std::map<std::string, harness::Suite> suites;
  harness::TrafficProfile traffic;
  PipelineSettings pipeline;
  ProbeSettings probe;
  int workers = 8;
  // Built and validated by the loader.
  std::shared_ptr<const mesh::Topology> topology;

  const ComponentConfig* FindComponent(const ComponentId& id) const;
};

// Suite files named in the scenario are resolved relative to `base_dir`.
absl::StatusOr<ScenarioConfig> ParseScenario(
    std::string_view json_text, const std::filesystem::path& base_dir);
absl::StatusOr<ScenarioConfig> LoadScenario(const std::filesystem::path& path);

}  // namespace cnd::control
