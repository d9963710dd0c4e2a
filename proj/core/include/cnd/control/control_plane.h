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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/control/scenario.h"
#include "cnd/harness/binding.h"
#include "cnd/harness/events.h"
#include "cnd/harness/metrics.h"
#include "cnd/harness/suite.h"
#include "cnd/harness/traffic.h"
#include "cnd/lifecycle/audit.h"
#include "cnd/lifecycle/release_manager.h"
#include "cnd/mesh/annotation.h"
#include "cnd/staging/store.h"

namespace cnd::control {

struct ControlOptions {
  // Replaces the scenario's master seed.
  std::optional<std::uint64_t> seed;
  // Mirrors the audit trail to this file.
  std::optional<std::filesystem::path> audit_path;
  // One trace line per production request.
  std::ostream* trace_log = nullptr;
};

struct DeployRequest {
  ComponentId component;
  std::string version;
  std::string branch = "main";
  std::string commit;
  // Falls back to the scenario's version catalog, then to the current
  // release's behavior with the version as marker.
  std::optional<mesh::VersionBehavior> behavior;
};

struct ComponentStatus {
  mesh::ComponentSpec spec;
  std::optional<DeployId> released;
  std::optional<DeployId> in_flight;
  std::optional<DeployId> predecessor;
  std::optional<mesh::TrafficRule> rule;
};

struct TestOutcome {
  harness::SuiteRun run;
  lifecycle::DeployRecord record;
};

// The whole simulated system behind one object: mesh, stores, harness and
// lifecycle, driven by an explicit virtual clock. Composite operations are
// serialized; reads go straight to the thread-safe parts.
class ControlPlane {
 public:
  static absl::StatusOr<std::unique_ptr<ControlPlane>> Create(
      ScenarioConfig config, const ControlOptions& options = {});
  ~ControlPlane();

  std::vector<ComponentStatus> Components() const;
  absl::StatusOr<std::vector<lifecycle::DeployRecord>> DeploysOf(
      const ComponentId& component) const;

  absl::StatusOr<lifecycle::DeployRecord> CreateDeploy(
      const DeployRequest& request, const std::string& actor);
  // Runs a suite (default: the pipeline suite) with the deploy overridden
  // and records the result.
  absl::StatusOr<TestOutcome> TestDeploy(const DeployId& id,
                                         const std::string& suite_id,
                                         const std::string& actor);
  absl::StatusOr<mesh::TrafficRule> StartCanary(const DeployId& id,
                                                std::optional<int> percent,
                                                const std::string& actor);
  // Judges the current step's metrics and moves to the next step.
  absl::StatusOr<mesh::TrafficRule> Advance(const DeployId& id,
                                            const std::string& actor);
  absl::StatusOr<mesh::TrafficRule> Abort(const DeployId& id,
                                          const std::string& actor);
  absl::StatusOr<lifecycle::DeployRecord> Release(const DeployId& id,
                                                  const std::string& actor);
  absl::StatusOr<mesh::TrafficRule> Rollback(const ComponentId& component,
                                             const std::string& actor);

  // Clones production for the clock's current date.
  absl::StatusOr<staging::CloneReport> CloneStaging(const std::string& actor);
  std::optional<staging::CloneReport> StagingReport() const;

  // Production traffic for `ticks` ticks. Re-clones staging on date
  // boundaries, retires due deploys, runs due probes and refreshes the error
  // budget as time passes.
  absl::StatusOr<harness::TrafficResult> Simulate(
      const std::optional<harness::TrafficProfile>& profile, Tick ticks);
  // Lets time pass without traffic.
  absl::Status AdvanceIdle(Tick ticks);

  absl::StatusOr<harness::SuiteRun> RunSuite(
      const std::string& suite_id,
      const std::map<ComponentId, DeployId>& overrides);

  // Production metrics for a deploy over [from, to); defaults to the current
  // step for an in-flight deploy, else everything so far.
  absl::StatusOr<harness::MetricsWindow> Metrics(
      const DeployId& id, std::optional<Tick> from = std::nullopt,
      std::optional<Tick> to = std::nullopt) const;
  // Canary verdict over the current step, for in-flight deploys.
  absl::StatusOr<std::optional<lifecycle::CanaryVerdict>> Verdict(
      const DeployId& id) const;
  lifecycle::CanaryVerdict Compare(const DeployId& candidate,
                                   const DeployId& baseline, Tick from,
                                   Tick to) const;

  lifecycle::ErrorBudget Budget();
  std::vector<lifecycle::AuditEntry> Audit() const;
  absl::StatusOr<std::string> PreviewUrl(const std::set<DeployId>& deploys);

  // Audit entry not tied to a state change (pipeline stages and the like).
  void Note(const std::string& actor, const std::string& action,
            const ComponentId& component, const DeployId& deploy,
            const std::string& detail);

  const ScenarioConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  lifecycle::ReleaseManager& releases() { return *releases_; }
  const lifecycle::ReleaseManager& releases() const { return *releases_; }
  staging::StagingAwareStore& store() { return *store_; }
  harness::MetricsRecorder& metrics() { return metrics_; }
  harness::EventBus& bus() { return bus_; }
  VirtualClock& clock() { return clock_; }
  const mesh::SigningKey& key() const { return *key_; }
  harness::MeshBinding& binding() { return binding_; }
  const std::vector<harness::SuiteRun>& probe_runs() const;
  std::uint64_t probe_alerts() const;

  // Serializes composite operations; held by the pipeline across stages.
  std::recursive_mutex& op_mutex() const { return op_mu_; }

 private:
  ControlPlane(ScenarioConfig config, const ControlOptions& options);
  absl::Status Init();
  absl::Status OnTick(Tick now);
  absl::StatusOr<staging::CloneReport> CloneLocked(const std::string& actor);
  harness::SuiteOptions SuiteOptionsFor(const std::string& salt) const;

  ScenarioConfig config_;
  ControlOptions options_;
  std::uint64_t seed_;
  VirtualClock clock_;
  std::unique_ptr<lifecycle::AuditLog> audit_;
  std::optional<mesh::SigningKey> key_;
  std::unique_ptr<staging::StagingAwareStore> store_;
  std::unique_ptr<lifecycle::ReleaseManager> releases_;
  harness::MetricsRecorder metrics_;
  harness::EventBus bus_;
  harness::MeshBinding binding_;
  std::unique_ptr<harness::SyntheticProber> prober_;
  std::uint64_t simulations_ = 0;
  std::uint64_t suite_runs_ = 0;
  std::atomic<std::uint64_t> previews_{0};
  mutable std::recursive_mutex op_mu_;
};

}  // namespace cnd::control
