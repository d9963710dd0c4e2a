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
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/types.h"
#include "cnd/lifecycle/audit.h"
#include "cnd/lifecycle/canary.h"
#include "cnd/lifecycle/deploy.h"
#include "cnd/lifecycle/error_budget.h"
#include "cnd/mesh/snapshot.h"
#include "cnd/mesh/topology.h"
#include "cnd/mesh/traffic_rule.h"

namespace cnd::lifecycle {

struct LifecycleConfig {
  CanaryPolicy canary;
  ShiftSchedule shift;
  // How long a replaced release stays rollback-eligible.
  Tick retention_ticks = 6 * kTicksPerHour;
  // Unreleased preproduction deploys expire after this long. Off if unset.
  std::optional<Tick> preproduction_ttl;
  // Components whose canaries are blocked while the error budget is depleted.
  std::set<ComponentId> high_risk;
  bool auto_abort_on_regression = true;

  absl::Status Validate() const;
};

// Owns deploy records and traffic rules and publishes them to the mesh as
// immutable snapshots. Every mutation is serialized; every state change
// appends exactly one transition entry to the audit log.
class ReleaseManager : public mesh::SnapshotSource {
 public:
  static absl::StatusOr<std::unique_ptr<ReleaseManager>> Create(
      std::shared_ptr<const mesh::Topology> topology, LifecycleConfig config,
      VirtualClock* clock, AuditLog* audit);

  // Installs an already-released deploy at weight 100. Used at scenario load.
  absl::Status Bootstrap(const DeployId& id, const DeploySpec& spec,
                         const std::string& actor);

  absl::StatusOr<DeployRecord> CreateDeploy(const DeploySpec& spec,
                                            const std::string& actor);
  absl::StatusOr<DeployRecord> BeginTesting(const DeployId& id,
                                            const std::string& actor);
  // From Preproduction or Aborted, testing begins implicitly.
  absl::StatusOr<DeployRecord> RecordTestResult(const DeployId& id,
                                                const TestSummary& summary,
                                                const std::string& actor);
  absl::StatusOr<mesh::TrafficRule> StartCanary(const DeployId& id,
                                                int percent,
                                                const std::string& actor);
  // Moves to the next schedule step. `interim` is the verdict over the
  // current step; a regression aborts (when configured) and returns
  // MetricsRegression, too little data returns InsufficientSamples.
  absl::StatusOr<mesh::TrafficRule> AdvanceShift(const DeployId& id,
                                                 const CanaryVerdict& interim,
                                                 const std::string& actor);
  absl::StatusOr<mesh::TrafficRule> Abort(const DeployId& id,
                                          const std::string& actor,
                                          const std::string& reason = "");
  // Shifting at 100 -> Released. The old release is demoted to a standby
  // (Aborted) rollback target until retention elapses.
  absl::StatusOr<DeployRecord> FinalizeRelease(const DeployId& id,
                                               const std::string& actor);
  // Restores the standby predecessor to 100 in one rule revision. The
  // demoted release does not become a rollback target itself.
  absl::StatusOr<mesh::TrafficRule> Rollback(const ComponentId& component,
                                             const std::string& actor);
  // Retires predecessors past retention and expired preproduction deploys.
  // Returns the number retired.
  int ProcessDue(const std::string& actor = "scheduler");

  // Fault injection for simulation: swaps a deploy's runtime behavior.
  absl::Status InjectBehavior(const DeployId& id,
                              const mesh::VersionBehavior& behavior);

  void SetErrorBudget(const ErrorBudget& budget);
  std::optional<ErrorBudget> error_budget() const;

  std::optional<DeployRecord> Find(const DeployId& id) const;
  // All deploys, or those of one component, ordered by creation.
  std::vector<DeployRecord> Deploys(const ComponentId& component = "") const;
  std::optional<mesh::TrafficRule> Rule(const ComponentId& component) const;
  // Every revision ever installed for `component`, oldest first.
  std::vector<mesh::TrafficRule> RuleHistory(
      const ComponentId& component) const;
  std::optional<DeployId> ReleasedOf(const ComponentId& component) const;
  std::optional<DeployId> InFlightOf(const ComponentId& component) const;
  std::optional<DeployId> PredecessorOf(const ComponentId& component) const;
  // Tick at which the in-flight deploy's weight last changed.
  std::optional<Tick> StepStartedAt(const DeployId& id) const;

  // Single release per component, weights summing to 100 and matching
  // records, and the release gate on every deploy carrying traffic.
  absl::Status CheckInvariants() const;
  std::uint64_t transition_count() const;

  std::shared_ptr<const mesh::MeshSnapshot> Current() const override;
  const LifecycleConfig& config() const { return config_; }
  const std::shared_ptr<const mesh::Topology>& topology() const {
    return topology_;
  }
  VirtualClock* clock() const { return clock_; }

 private:
  struct ComponentState {
    std::optional<DeployId> released;
    std::optional<DeployId> in_flight;
    std::optional<DeployId> predecessor;
    Tick step_started = 0;
  };

  ReleaseManager(std::shared_ptr<const mesh::Topology> topology,
                 LifecycleConfig config, VirtualClock* clock, AuditLog* audit);

  absl::StatusOr<DeployRecord*> FindLocked(const DeployId& id);
  // Applies a legal transition and writes its audit entry.
  void Transition(DeployRecord& record, DeployState to,
                  const std::string& actor, const std::string& action,
                  const std::string& extra);
  void Note(const DeployRecord& record, const std::string& actor,
            const std::string& action, const std::string& detail);
  // Installs a new rule revision for `component` and syncs record weights.
  const mesh::TrafficRule& InstallRule(
      const ComponentId& component, std::vector<mesh::WeightedDeploy> entries);
  std::string RuleDetail(const ComponentId& component) const;
  void Publish();
  void RetireLocked(DeployRecord& record, const std::string& actor,
                    const std::string& action);
  void BeginTestingLocked(DeployRecord& record, const std::string& actor);
  mesh::TrafficRule AbortLocked(DeployRecord& record, const std::string& actor,
                                const std::string& reason);

  const std::shared_ptr<const mesh::Topology> topology_;
  const LifecycleConfig config_;
  VirtualClock* const clock_;
  AuditLog* const audit_;

  mutable std::mutex mu_;
  std::map<DeployId, DeployRecord> records_;
  std::vector<DeployId> order_;
  std::map<ComponentId, ComponentState> components_;
  std::map<ComponentId, mesh::TrafficRule> rules_;
  std::map<ComponentId, std::vector<mesh::TrafficRule>> history_;
  std::optional<ErrorBudget> budget_;
  std::uint64_t revision_ = 0;
  std::uint64_t next_id_ = 1;
  std::uint64_t transitions_ = 0;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const mesh::MeshSnapshot> snapshot_;
};

}  // namespace cnd::lifecycle
