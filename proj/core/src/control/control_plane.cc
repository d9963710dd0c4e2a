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

#include "cnd/control/control_plane.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "cnd/common/hash.h"
#include "cnd/common/status.h"
#include "cnd/lifecycle/canary.h"
#include "cnd/lifecycle/error_budget.h"
#include "cnd/mesh/router.h"

namespace cnd::control {
namespace {

constexpr char kSystemActor[] = "scheduler";

}  // namespace

ControlPlane::ControlPlane(ScenarioConfig config, const ControlOptions& options)
    : config_(std::move(config)),
      options_(options),
      seed_(options.seed.value_or(config_.seed)) {}

ControlPlane::~ControlPlane() = default;

absl::StatusOr<std::unique_ptr<ControlPlane>> ControlPlane::Create(
    ScenarioConfig config, const ControlOptions& options) {
  if (config.topology == nullptr) {
    return MakeError(ErrorKind::kValidationError,
                     "scenario has not been validated");
  }
  std::unique_ptr<ControlPlane> cp(new ControlPlane(std::move(config), options));
  CND_RETURN_IF_ERROR(cp->Init());
  return cp;
}

absl::Status ControlPlane::Init() {
  CND_ASSIGN_OR_RETURN(key_, mesh::SigningKey::Create(config_.secret));
  if (options_.audit_path) {
    CND_ASSIGN_OR_RETURN(audit_, lifecycle::AuditLog::OpenFile(*options_.audit_path));
  } else {
    audit_ = std::make_unique<lifecycle::AuditLog>();
  }
  store_ = std::make_unique<staging::StagingAwareStore>(config_.tables);
  for (const auto& [table, rows] : config_.seed_data) {
    for (const auto& row : rows) {
      CND_RETURN_IF_ERROR(store_->LoadProductionRow(table, row).status());
    }
  }
  for (const auto& [table, rows] : config_.static_test_data) {
    CND_RETURN_IF_ERROR(store_->SeedStaticTestData(table, rows).status());
  }
  CND_ASSIGN_OR_RETURN(
      releases_, lifecycle::ReleaseManager::Create(
                     config_.topology, config_.lifecycle, &clock_, audit_.get()));
  for (const auto& c : config_.components) {
    CND_RETURN_IF_ERROR(
        releases_->Bootstrap(c.release.id, c.release.spec, "scenario"));
  }
  for (const auto& t : config_.topics) {
    CND_RETURN_IF_ERROR(bus_.RegisterTopic(t.name, t.consumer));
  }
  binding_ = harness::MeshBinding{releases_.get(), store_.get(), &metrics_,
                                  &clock_, &*key_};
  CND_RETURN_IF_ERROR(CloneLocked("scenario").status());
  if (!config_.probe.suite.empty()) {
    harness::SuiteOptions opts;
    opts.workers = config_.workers;
    opts.seed = HashCombine(seed_, "probe");
    prober_ = std::make_unique<harness::SyntheticProber>(
        &config_.suites.at(config_.probe.suite), config_.probe.cadence_ticks,
        &bus_, opts);
  }
  Budget();
  return absl::OkStatus();
}

harness::SuiteOptions ControlPlane::SuiteOptionsFor(
    const std::string& salt) const {
  harness::SuiteOptions opts;
  opts.workers = config_.workers;
  opts.seed = HashCombine(HashCombine(seed_, salt), suite_runs_);
  return opts;
}

std::vector<ComponentStatus> ControlPlane::Components() const {
  std::vector<ComponentStatus> out;
  for (const auto& spec : config_.topology->components()) {
    out.push_back(ComponentStatus{spec, releases_->ReleasedOf(spec.id),
                                  releases_->InFlightOf(spec.id),
                                  releases_->PredecessorOf(spec.id),
                                  releases_->Rule(spec.id)});
  }
  return out;
}

absl::StatusOr<std::vector<lifecycle::DeployRecord>> ControlPlane::DeploysOf(
    const ComponentId& component) const {
  if (config_.topology->Find(component) == nullptr) {
    return MakeError(ErrorKind::kUnknownComponent,
                     absl::StrCat("unknown component ", component));
  }
  return releases_->Deploys(component);
}

absl::StatusOr<lifecycle::DeployRecord> ControlPlane::CreateDeploy(
    const DeployRequest& request, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  const ComponentConfig* cc = config_.FindComponent(request.component);
  if (cc == nullptr) {
    return MakeError(ErrorKind::kUnknownComponent,
                     absl::StrCat("unknown component ", request.component));
  }
  lifecycle::DeploySpec spec{request.component, request.version,
                             request.branch, request.commit, {}};
  if (request.behavior) {
    spec.behavior = *request.behavior;
  } else if (auto it = cc->versions.find(request.version);
             it != cc->versions.end()) {
    spec.behavior = it->second;
  } else {
    auto released = releases_->ReleasedOf(request.component);
    if (released) spec.behavior = releases_->Find(*released)->behavior;
    spec.behavior.marker = request.version;
    spec.behavior.fault_paths.clear();
  }
  if (spec.commit.empty()) {
    spec.commit = absl::StrCat(
        absl::Hex(HashCombine(HashCombine(seed_, spec.component), spec.version),
                  absl::kZeroPad16))
        .substr(0, 12);
  }
  return releases_->CreateDeploy(spec, actor);
}

absl::StatusOr<harness::SuiteRun> ControlPlane::RunSuite(
    const std::string& suite_id,
    const std::map<ComponentId, DeployId>& overrides) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  const std::string id = suite_id.empty() ? config_.pipeline.suite : suite_id;
  auto it = config_.suites.find(id);
  if (it == config_.suites.end()) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("unknown suite '", id, "'"));
  }
  auto run = harness::RunIntegrationSuite(it->second, overrides, binding_,
                                          &bus_, SuiteOptionsFor(id));
  ++suite_runs_;
  return run;
}

absl::StatusOr<TestOutcome> ControlPlane::TestDeploy(
    const DeployId& id, const std::string& suite_id, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  auto record = releases_->Find(id);
  if (!record) {
    return MakeError(ErrorKind::kUnknownDeploy,
                     absl::StrCat("unknown deploy ", id));
  }
  if (record->state != DeployState::kTesting) {
    CND_RETURN_IF_ERROR(releases_->BeginTesting(id, actor).status());
  }
  CND_ASSIGN_OR_RETURN(harness::SuiteRun run,
                       RunSuite(suite_id, {{record->component, id}}));
  lifecycle::TestSummary summary{run.suite_id, run.pass_count, run.fail_count};
  CND_ASSIGN_OR_RETURN(lifecycle::DeployRecord updated,
                       releases_->RecordTestResult(id, summary, actor));
  return TestOutcome{std::move(run), std::move(updated)};
}

absl::StatusOr<mesh::TrafficRule> ControlPlane::StartCanary(
    const DeployId& id, std::optional<int> percent, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  Budget();
  return releases_->StartCanary(
      id,
      percent.value_or(config_.pipeline.canary_percent.value_or(
          config_.lifecycle.canary.initial_percent)),
      actor);
}

lifecycle::CanaryVerdict ControlPlane::Compare(const DeployId& candidate,
                                               const DeployId& baseline,
                                               Tick from, Tick to) const {
  return lifecycle::EvaluateCanary(metrics_.Window(candidate, from, to),
                                   metrics_.Window(baseline, from, to),
                                   config_.lifecycle.canary);
}

absl::StatusOr<std::optional<lifecycle::CanaryVerdict>> ControlPlane::Verdict(
    const DeployId& id) const {
  auto record = releases_->Find(id);
  if (!record) {
    return MakeError(ErrorKind::kUnknownDeploy,
                     absl::StrCat("unknown deploy ", id));
  }
  auto started = releases_->StepStartedAt(id);
  auto released = releases_->ReleasedOf(record->component);
  if (!started || !released) return std::optional<lifecycle::CanaryVerdict>();
  return std::optional<lifecycle::CanaryVerdict>(
      Compare(id, *released, *started, clock_.Now()));
}

absl::StatusOr<mesh::TrafficRule> ControlPlane::Advance(
    const DeployId& id, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  CND_ASSIGN_OR_RETURN(auto verdict, Verdict(id));
  if (!verdict) {
    // Not in flight; let the lifecycle report why.
    return releases_->AdvanceShift(id, lifecycle::CanaryVerdict{}, actor);
  }
  return releases_->AdvanceShift(id, *verdict, actor);
}

absl::StatusOr<mesh::TrafficRule> ControlPlane::Abort(
    const DeployId& id, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  return releases_->Abort(id, actor, "operator");
}

absl::StatusOr<lifecycle::DeployRecord> ControlPlane::Release(
    const DeployId& id, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  return releases_->FinalizeRelease(id, actor);
}

absl::StatusOr<mesh::TrafficRule> ControlPlane::Rollback(
    const ComponentId& component, const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  return releases_->Rollback(component, actor);
}

absl::StatusOr<staging::CloneReport> ControlPlane::CloneLocked(
    const std::string& actor) {
  const std::int64_t date = clock_.Now() / config_.clone_policy.cadence_ticks;
  CND_ASSIGN_OR_RETURN(
      staging::CloneReport report,
      store_->CloneStaging(config_.clone_policy, date, seed_, clock_.Now()));
  std::string offsets;
  for (const auto& t : report.tables) {
    absl::StrAppend(&offsets, offsets.empty() ? "" : ",", t.table, ":",
                    t.offset);
  }
  Note(actor, "clone-staging", "", "",
       absl::StrCat("date=", date, ";offsets=", offsets));
  return report;
}

absl::StatusOr<staging::CloneReport> ControlPlane::CloneStaging(
    const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  return CloneLocked(actor);
}

std::optional<staging::CloneReport> ControlPlane::StagingReport() const {
  return store_->LastReport();
}

absl::Status ControlPlane::OnTick(Tick now) {
  const std::int64_t date = now / config_.clone_policy.cadence_ticks;
  if (store_->CurrentStagingDate() != date) {
    CND_RETURN_IF_ERROR(CloneLocked(kSystemActor).status());
  }
  releases_->ProcessDue(kSystemActor);
  if (prober_) CND_RETURN_IF_ERROR(prober_->Poll(binding_).status());
  return absl::OkStatus();
}

absl::StatusOr<harness::TrafficResult> ControlPlane::Simulate(
    const std::optional<harness::TrafficProfile>& profile, Tick ticks) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  harness::TrafficProfile p = profile.value_or(config_.traffic);
  p.seed = HashCombine(HashCombine(seed_, p.seed), simulations_++);
  if (ticks <= 0) ticks = p.duration_ticks;
  absl::Status tick_status;
  harness::TrafficOptions opts;
  opts.trace_log = options_.trace_log;
  opts.on_tick = [&](Tick now) {
    if (!tick_status.ok()) return;
    tick_status = OnTick(now);
  };
  auto result = harness::RunProductionTraffic(p, binding_, ticks, opts);
  CND_RETURN_IF_ERROR(tick_status);
  Budget();
  return result;
}

absl::Status ControlPlane::AdvanceIdle(Tick ticks) {
  std::lock_guard<std::recursive_mutex> lock(op_mu_);
  for (Tick t = 0; t < ticks; ++t) {
    CND_RETURN_IF_ERROR(OnTick(clock_.Advance(1)));
  }
  Budget();
  return absl::OkStatus();
}

absl::StatusOr<harness::MetricsWindow> ControlPlane::Metrics(
    const DeployId& id, std::optional<Tick> from,
    std::optional<Tick> to) const {
  if (!releases_->Find(id)) {
    return MakeError(ErrorKind::kUnknownDeploy,
                     absl::StrCat("unknown deploy ", id));
  }
  const Tick start = from.value_or(releases_->StepStartedAt(id).value_or(0));
  return metrics_.Window(id, start, to.value_or(clock_.Now()));
}

lifecycle::ErrorBudget ControlPlane::Budget() {
  const Tick now = clock_.Now();
  const Tick from = std::max<Tick>(0, now - config_.slo.window_ticks);
  auto budget = lifecycle::CheckErrorBudget(
      metrics_.ProductionSeries(from, now), config_.slo);
  releases_->SetErrorBudget(budget);
  return budget;
}

std::vector<lifecycle::AuditEntry> ControlPlane::Audit() const {
  return audit_->Entries();
}

absl::StatusOr<std::string> ControlPlane::PreviewUrl(
    const std::set<DeployId>& deploys) {
  return mesh::PreviewUrl(deploys, *key_, *releases_->Current(), clock_.Now(),
                          HashCombine(seed_, previews_.fetch_add(1)));
}

void ControlPlane::Note(const std::string& actor, const std::string& action,
                        const ComponentId& component, const DeployId& deploy,
                        const std::string& detail) {
  std::string commit;
  if (!deploy.empty()) {
    if (auto r = releases_->Find(deploy)) commit = r->commit;
  }
  audit_->Append(lifecycle::AuditEntry{clock_.Now(), actor, action, component,
                                       deploy, commit, detail});
}

const std::vector<harness::SuiteRun>& ControlPlane::probe_runs() const {
  static const std::vector<harness::SuiteRun> kNone;
  return prober_ ? prober_->runs() : kNone;
}

std::uint64_t ControlPlane::probe_alerts() const {
  return prober_ ? prober_->alerts() : 0;
}

}  // namespace cnd::control
