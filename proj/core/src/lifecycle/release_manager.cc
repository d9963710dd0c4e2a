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

#include "cnd/lifecycle/release_manager.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::lifecycle {
namespace {

// Audit detail values are ';'-separated; keep free text from breaking them.
std::string Clean(std::string text) {
  std::replace(text.begin(), text.end(), ';', ',');
  std::replace(text.begin(), text.end(), '=', ':');
  return text;
}

absl::Status Illegal(const DeployRecord& r, const std::string& op) {
  return MakeError(ErrorKind::kIllegalTransition,
                   absl::StrCat(op, " not allowed: deploy ", r.id, " is ",
                                DeployStateName(r.state)));
}

}  // namespace

absl::Status LifecycleConfig::Validate() const {
  CND_RETURN_IF_ERROR(canary.Validate());
  CND_RETURN_IF_ERROR(shift.Validate());
  if (retention_ticks < 0) {
    return MakeError(ErrorKind::kValidationError, "retention must be >= 0");
  }
  if (preproduction_ttl && *preproduction_ttl <= 0) {
    return MakeError(ErrorKind::kValidationError,
                     "preproduction ttl must be > 0");
  }
  return absl::OkStatus();
}

ReleaseManager::ReleaseManager(std::shared_ptr<const mesh::Topology> topology,
                               LifecycleConfig config, VirtualClock* clock,
                               AuditLog* audit)
    : topology_(std::move(topology)),
      config_(std::move(config)),
      clock_(clock),
      audit_(audit) {}

absl::StatusOr<std::unique_ptr<ReleaseManager>> ReleaseManager::Create(
    std::shared_ptr<const mesh::Topology> topology, LifecycleConfig config,
    VirtualClock* clock, AuditLog* audit) {
  if (topology == nullptr || clock == nullptr || audit == nullptr) {
    return MakeError(ErrorKind::kValidationError,
                     "release manager needs a topology, clock and audit log");
  }
  CND_RETURN_IF_ERROR(config.Validate());
  for (ComponentId c : config.high_risk) {
    if (topology->Find(c) == nullptr) {
      return MakeError(ErrorKind::kUnknownComponent,
                       absl::StrCat("high-risk tag on unknown component ", c));
    }
  }
  std::unique_ptr<ReleaseManager> m(new ReleaseManager(
      std::move(topology), std::move(config), clock, audit));
  {
    std::lock_guard<std::mutex> lock(m->mu_);
    m->Publish();
  }
  return m;
}

absl::StatusOr<DeployRecord*> ReleaseManager::FindLocked(const DeployId& id) {
  auto it = records_.find(id);
  if (it == records_.end()) {
    return MakeError(ErrorKind::kUnknownDeploy,
                     absl::StrCat("unknown deploy ", id));
  }
  return &it->second;
}

void ReleaseManager::Note(const DeployRecord& r, const std::string& actor,
                          const std::string& action,
                          const std::string& detail) {
  audit_->Append(AuditEntry{clock_->Now(), actor, action, r.component, r.id,
                            r.commit, detail});
}

void ReleaseManager::Transition(DeployRecord& r, DeployState to,
                                const std::string& actor,
                                const std::string& action,
                                const std::string& extra) {
  std::string detail = absl::StrCat("from=", DeployStateName(r.state),
                                    ";to=", DeployStateName(to));
  if (!extra.empty()) absl::StrAppend(&detail, ";", extra);
  r.state = to;
  ++transitions_;
  Note(r, actor, action, detail);
}

const mesh::TrafficRule& ReleaseManager::InstallRule(
    const ComponentId& component, std::vector<mesh::WeightedDeploy> entries) {
  mesh::TrafficRule rule{component, std::move(entries), ++revision_};
  if (auto old = rules_.find(component); old != rules_.end()) {
    for (const auto& e : old->second.entries) records_[e.deploy].weight = 0;
  }
  for (const auto& e : rule.entries) records_[e.deploy].weight = e.weight;
  history_[component].push_back(rule);
  return rules_[component] = std::move(rule);
}

std::string ReleaseManager::RuleDetail(const ComponentId& component) const {
  auto it = rules_.find(component);
  return it == rules_.end() ? "" : absl::StrCat("rule=", FormatRule(it->second));
}

void ReleaseManager::Publish() {
  auto snap = std::make_shared<mesh::MeshSnapshot>();
  snap->topology = topology_;
  for (const auto& [id, r] : records_) {
    snap->deploys.emplace(id, mesh::DeployInfo{id, r.component, r.state,
                                               r.behavior});
  }
  snap->rules = rules_;
  snap->revision = revision_;
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const mesh::MeshSnapshot> ReleaseManager::Current() const {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  return snapshot_;
}

absl::Status ReleaseManager::Bootstrap(const DeployId& id,
                                       const DeploySpec& spec,
                                       const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  if (topology_->Find(spec.component) == nullptr) {
    return MakeError(ErrorKind::kUnknownComponent,
                     absl::StrCat("unknown component ", spec.component));
  }
  if (!IsValidToken(id) || records_.contains(id)) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("bad or duplicate deploy id '", id, "'"));
  }
  CND_RETURN_IF_ERROR(spec.behavior.Validate());
  ComponentState& cs = components_[spec.component];
  if (cs.released) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat(spec.component, " already has release ",
                                  *cs.released));
  }
  DeployRecord r{id,           spec.component,          spec.version,
                 spec.branch,  spec.commit,             DeployState::kReleased,
                 0,            clock_->Now(),           TestStatus::kPassed,
                 spec.behavior, std::nullopt};
  if (!r.OnMain()) {
    return MakeError(ErrorKind::kNotMainBranch,
                     absl::StrCat("initial release ", id, " is not from ",
                                  kMainBranch));
  }
  records_[id] = r;
  order_.push_back(id);
  cs.released = id;
  InstallRule(spec.component, {{id, 100}});
  ++transitions_;
  Note(records_[id], actor, "bootstrap",
       absl::StrCat("to=Released;version=", Clean(spec.version),
                    ";branch=", Clean(spec.branch), ";",
                    RuleDetail(spec.component)));
  Publish();
  return absl::OkStatus();
}

absl::StatusOr<DeployRecord> ReleaseManager::CreateDeploy(
    const DeploySpec& spec, const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  if (topology_->Find(spec.component) == nullptr) {
    return MakeError(ErrorKind::kUnknownComponent,
                     absl::StrCat("unknown component ", spec.component));
  }
  if (spec.version.empty() || spec.branch.empty()) {
    return MakeError(ErrorKind::kValidationError,
                     "version and branch are required");
  }
  CND_RETURN_IF_ERROR(spec.behavior.Validate());
  DeployId id;
  do {
    id = absl::StrCat("d", next_id_++);
  } while (records_.contains(id));
  DeployRecord r{id,           spec.component,  spec.version,
                 spec.branch,  spec.commit,     DeployState::kPreproduction,
                 0,            clock_->Now(),   TestStatus::kUntested,
                 spec.behavior, std::nullopt};
  records_[id] = r;
  order_.push_back(id);
  ++transitions_;
  Note(r, actor, "create",
       absl::StrCat("to=Preproduction;version=", Clean(spec.version),
                    ";branch=", Clean(spec.branch)));
  Publish();
  return r;
}

void ReleaseManager::BeginTestingLocked(DeployRecord& r,
                                        const std::string& actor) {
  r.test_status = TestStatus::kUntested;
  r.retire_at.reset();
  ComponentState& cs = components_[r.component];
  if (cs.predecessor == r.id) cs.predecessor.reset();
  Transition(r, DeployState::kTesting, actor, "test-start", "");
}

absl::StatusOr<DeployRecord> ReleaseManager::BeginTesting(
    const DeployId& id, const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  if (!IsLegalTransition(r->state, DeployState::kTesting)) {
    return Illegal(*r, "testing");
  }
  BeginTestingLocked(*r, actor);
  Publish();
  return *r;
}

absl::StatusOr<DeployRecord> ReleaseManager::RecordTestResult(
    const DeployId& id, const TestSummary& summary, const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  if (r->state == DeployState::kPreproduction ||
      r->state == DeployState::kAborted) {
    BeginTestingLocked(*r, actor);
  } else if (r->state != DeployState::kTesting) {
    return Illegal(*r, "recording a test result");
  }
  const bool ok = summary.AllPassed();
  r->test_status = ok ? TestStatus::kPassed : TestStatus::kFailed;
  Transition(*r, ok ? DeployState::kTested : DeployState::kTestFailed, actor,
             ok ? "test-pass" : "test-fail",
             absl::StrCat("suite=", Clean(summary.suite_id),
                          ";passed=", summary.passed,
                          ";failed=", summary.failed));
  Publish();
  return *r;
}

absl::StatusOr<mesh::TrafficRule> ReleaseManager::StartCanary(
    const DeployId& id, int percent, const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  switch (r->state) {
    case DeployState::kTested:
      break;
    case DeployState::kPreproduction:
    case DeployState::kTesting:
    case DeployState::kTestFailed:
      return MakeError(ErrorKind::kNotTested,
                       absl::StrCat("deploy ", id, " has not passed tests (",
                                    DeployStateName(r->state), ")"));
    default:
      return Illegal(*r, "canary");
  }
  if (r->test_status != TestStatus::kPassed) {
    return MakeError(ErrorKind::kNotTested,
                     absl::StrCat("deploy ", id, " has not passed tests"));
  }
  if (!r->OnMain()) {
    return MakeError(ErrorKind::kNotMainBranch,
                     absl::StrCat("deploy ", id, " was built from '",
                                  r->branch, "', not ", kMainBranch));
  }
  if (!config_.canary.allowed_percents.contains(percent)) {
    return MakeError(ErrorKind::kPercentNotAllowed,
                     absl::StrCat("canary percent ", percent,
                                  " is not an allowed value"));
  }
  if (config_.high_risk.contains(r->component) && budget_ &&
      budget_->depleted) {
    return MakeError(ErrorKind::kBudgetDepleted,
                     absl::StrCat(r->component,
                                  " is high-risk and the error budget is "
                                  "depleted"));
  }
  ComponentState& cs = components_[r->component];
  if (cs.in_flight) {
    return MakeError(ErrorKind::kIllegalTransition,
                     absl::StrCat("deploy ", *cs.in_flight,
                                  " is already in flight for ",
                                  r->component));
  }
  if (!cs.released) {
    return MakeError(ErrorKind::kNoLiveDeploy,
                     absl::StrCat(r->component, " has no release"));
  }
  const mesh::TrafficRule& rule = InstallRule(
      r->component, {{*cs.released, 100 - percent}, {id, percent}});
  cs.in_flight = id;
  cs.step_started = clock_->Now();
  Transition(*r, DeployState::kCanary, actor, "canary",
             absl::StrCat("percent=", percent, ";", RuleDetail(r->component)));
  Publish();
  return rule;
}

mesh::TrafficRule ReleaseManager::AbortLocked(DeployRecord& r,
                                              const std::string& actor,
                                              const std::string& reason) {
  ComponentState& cs = components_[r.component];
  const mesh::TrafficRule& rule =
      InstallRule(r.component, {{*cs.released, 100}});
  cs.in_flight.reset();
  std::string extra = RuleDetail(r.component);
  if (!reason.empty()) absl::StrAppend(&extra, ";reason=", Clean(reason));
  Transition(r, DeployState::kAborted, actor, "abort", extra);
  return rule;
}

absl::StatusOr<mesh::TrafficRule> ReleaseManager::AdvanceShift(
    const DeployId& id, const CanaryVerdict& interim,
    const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  if (r->state != DeployState::kCanary && r->state != DeployState::kShifting) {
    return Illegal(*r, "advance");
  }
  ComponentState& cs = components_[r->component];
  const auto next = config_.shift.NextAfter(r->weight);
  if (!next) {
    return MakeError(ErrorKind::kScheduleExhausted,
                     absl::StrCat("deploy ", id,
                                  " is at the last step; finalize instead"));
  }
  const Tick held = clock_->Now() - cs.step_started;
  if (held < config_.shift.hold_ticks) {
    return MakeError(ErrorKind::kHoldNotElapsed,
                     absl::StrCat("step held ", held, " of ",
                                  config_.shift.hold_ticks, " ticks"));
  }
  if (interim.Regressed()) {
    if (config_.auto_abort_on_regression) {
      AbortLocked(*r, actor, FormatVerdict(interim));
      Publish();
    }
    return MakeError(ErrorKind::kMetricsRegression,
                     absl::StrCat("deploy ", id, " regressed: ",
                                  FormatVerdict(interim)));
  }
  if (!interim.pass) {
    return MakeError(ErrorKind::kInsufficientSamples,
                     absl::StrCat("deploy ", id, ": ", FormatVerdict(interim)));
  }
  const mesh::TrafficRule& rule = InstallRule(
      r->component, {{*cs.released, 100 - *next}, {id, *next}});
  cs.step_started = clock_->Now();
  const std::string extra =
      absl::StrCat("weight=", *next, ";", RuleDetail(r->component));
  if (r->state == DeployState::kCanary) {
    Transition(*r, DeployState::kShifting, actor, "shift", extra);
  } else {
    Note(*r, actor, "advance", extra);
  }
  Publish();
  return rule;
}

absl::StatusOr<mesh::TrafficRule> ReleaseManager::Abort(
    const DeployId& id, const std::string& actor, const std::string& reason) {
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  if (r->state != DeployState::kCanary && r->state != DeployState::kShifting) {
    return Illegal(*r, "abort");
  }
  mesh::TrafficRule rule = AbortLocked(*r, actor, reason);
  Publish();
  return rule;
}

void ReleaseManager::RetireLocked(DeployRecord& r, const std::string& actor,
                                  const std::string& action) {
  r.retire_at.reset();
  ComponentState& cs = components_[r.component];
  if (cs.predecessor == r.id) cs.predecessor.reset();
  Transition(r, DeployState::kRetired, actor, action, "");
}

absl::StatusOr<DeployRecord> ReleaseManager::FinalizeRelease(
    const DeployId& id, const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  if (r->state != DeployState::kShifting && r->state != DeployState::kCanary) {
    return Illegal(*r, "release");
  }
  if (r->weight != 100) {
    return MakeError(ErrorKind::kNotAtFullWeight,
                     absl::StrCat("deploy ", id, " is at weight ", r->weight));
  }
  ComponentState& cs = components_[r->component];
  // Chain length one: an older standby is retired early.
  if (cs.predecessor) RetireLocked(records_[*cs.predecessor], actor, "retire");
  DeployRecord& old = records_[*cs.released];
  const mesh::TrafficRule& rule = InstallRule(r->component, {{id, 100}});
  (void)rule;
  old.retire_at = clock_->Now() + config_.retention_ticks;
  Transition(old, DeployState::kAborted, actor, "standby",
             absl::StrCat("retire_at=", *old.retire_at));
  cs.predecessor = old.id;
  cs.released = id;
  cs.in_flight.reset();
  Transition(*r, DeployState::kReleased, actor, "release",
             RuleDetail(r->component));
  Publish();
  return *r;
}

absl::StatusOr<mesh::TrafficRule> ReleaseManager::Rollback(
    const ComponentId& component, const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  if (topology_->Find(component) == nullptr) {
    return MakeError(ErrorKind::kUnknownComponent,
                     absl::StrCat("unknown component ", component));
  }
  ComponentState& cs = components_[component];
  if (cs.predecessor) {
    DeployRecord& p = records_[*cs.predecessor];
    if (p.retire_at && *p.retire_at <= clock_->Now()) {
      RetireLocked(p, "scheduler", "retire");
    }
  }
  if (!cs.predecessor) {
    Publish();
    return MakeError(ErrorKind::kNoPredecessor,
                     absl::StrCat(component, " has no rollback target"));
  }
  DeployRecord& pred = records_[*cs.predecessor];
  DeployRecord& current = records_[*cs.released];
  const mesh::TrafficRule& rule = InstallRule(component, {{pred.id, 100}});
  const std::string rule_detail = RuleDetail(component);
  if (cs.in_flight) {
    Transition(records_[*cs.in_flight], DeployState::kAborted, actor, "abort",
               absl::StrCat("emergency;", rule_detail));
    cs.in_flight.reset();
  }
  Transition(current, DeployState::kAborted, actor, "demote",
             absl::StrCat("emergency;", rule_detail));
  pred.retire_at.reset();
  Transition(pred, DeployState::kReleased, actor, "rollback",
             absl::StrCat("emergency;", rule_detail));
  cs.released = pred.id;
  cs.predecessor.reset();
  mesh::TrafficRule out = rule;
  Publish();
  return out;
}

int ReleaseManager::ProcessDue(const std::string& actor) {
  std::lock_guard<std::mutex> lock(mu_);
  const Tick now = clock_->Now();
  int retired = 0;
  for (const DeployId& id : order_) {
    DeployRecord& r = records_[id];
    if (r.state == DeployState::kAborted && r.retire_at &&
        *r.retire_at <= now) {
      RetireLocked(r, actor, "retire");
      ++retired;
    } else if (r.state == DeployState::kPreproduction &&
               config_.preproduction_ttl &&
               r.created_at + *config_.preproduction_ttl <= now) {
      RetireLocked(r, actor, "expire");
      ++retired;
    }
  }
  if (retired > 0) Publish();
  return retired;
}

absl::Status ReleaseManager::InjectBehavior(
    const DeployId& id, const mesh::VersionBehavior& behavior) {
  CND_RETURN_IF_ERROR(behavior.Validate());
  std::lock_guard<std::mutex> lock(mu_);
  CND_ASSIGN_OR_RETURN(DeployRecord * r, FindLocked(id));
  r->behavior = behavior;
  Publish();
  return absl::OkStatus();
}

void ReleaseManager::SetErrorBudget(const ErrorBudget& budget) {
  std::lock_guard<std::mutex> lock(mu_);
  budget_ = budget;
}

std::optional<ErrorBudget> ReleaseManager::error_budget() const {
  std::lock_guard<std::mutex> lock(mu_);
  return budget_;
}

std::optional<DeployRecord> ReleaseManager::Find(const DeployId& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<DeployRecord> ReleaseManager::Deploys(
    const ComponentId& component) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<DeployRecord> out;
  for (const DeployId& id : order_) {
    const DeployRecord& r = records_.at(id);
    if (component.empty() || r.component == component) out.push_back(r);
  }
  return out;
}

std::optional<mesh::TrafficRule> ReleaseManager::Rule(
    const ComponentId& component) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = rules_.find(component);
  if (it == rules_.end()) return std::nullopt;
  return it->second;
}

std::vector<mesh::TrafficRule> ReleaseManager::RuleHistory(
    const ComponentId& component) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = history_.find(component);
  return it == history_.end() ? std::vector<mesh::TrafficRule>{} : it->second;
}

std::optional<DeployId> ReleaseManager::ReleasedOf(
    const ComponentId& component) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = components_.find(component);
  return it == components_.end() ? std::nullopt : it->second.released;
}

std::optional<DeployId> ReleaseManager::InFlightOf(
    const ComponentId& component) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = components_.find(component);
  return it == components_.end() ? std::nullopt : it->second.in_flight;
}

std::optional<DeployId> ReleaseManager::PredecessorOf(
    const ComponentId& component) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = components_.find(component);
  return it == components_.end() ? std::nullopt : it->second.predecessor;
}

std::optional<Tick> ReleaseManager::StepStartedAt(const DeployId& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  const ComponentState& cs = components_.at(it->second.component);
  if (cs.in_flight != id) return std::nullopt;
  return cs.step_started;
}

std::uint64_t ReleaseManager::transition_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transitions_;
}

absl::Status ReleaseManager::CheckInvariants() const {
  std::lock_guard<std::mutex> lock(mu_);
  auto violation = [](const std::string& msg) {
    return absl::InternalError(absl::StrCat("invariant: ", msg));
  };
  for (const auto& spec : topology_->components()) {
    int released = 0;
    for (const auto& [id, r] : records_) {
      if (r.component == spec.id && r.state == DeployState::kReleased) {
        ++released;
      }
    }
    if (released != 1) {
      return violation(absl::StrCat(spec.id, " has ", released, " releases"));
    }
    auto it = rules_.find(spec.id);
    if (it == rules_.end()) return violation(absl::StrCat(spec.id, " has no rule"));
    if (auto s = it->second.Validate(); !s.ok()) {
      return violation(absl::StrCat(spec.id, ": ", s.message()));
    }
    for (const auto& e : it->second.entries) {
      auto r = records_.find(e.deploy);
      if (r == records_.end() || r->second.component != spec.id ||
          r->second.state == DeployState::kRetired) {
        return violation(absl::StrCat(spec.id, " rule names ", e.deploy));
      }
    }
  }
  for (const auto& [id, r] : records_) {
    int rule_weight = 0;
    if (auto it = rules_.find(r.component); it != rules_.end()) {
      rule_weight = it->second.WeightOf(id);
    }
    if (rule_weight != r.weight) {
      return violation(absl::StrCat(id, " weight ", r.weight, " != rule ",
                                    rule_weight));
    }
    if (r.weight > 0 && !ServesProduction(r.state)) {
      return violation(absl::StrCat(id, " carries traffic while ",
                                    DeployStateName(r.state)));
    }
    if (ServesProduction(r.state) && !r.Releasable()) {
      return violation(absl::StrCat(id, " is ", DeployStateName(r.state),
                                    " without passing tests on main"));
    }
  }
  return absl::OkStatus();
}

}  // namespace cnd::lifecycle
