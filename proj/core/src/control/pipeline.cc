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

#include "cnd/control/pipeline.h"

#include <algorithm>
#include <functional>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"
#include "cnd/lifecycle/canary.h"

namespace cnd::control {
namespace {

class Runner {
 public:
  Runner(ControlPlane& cp, const std::string& actor, PipelineRun& run)
      : cp_(cp), actor_(actor), run_(run) {}

  // Returns false when the stage failed and the pipeline must halt.
  bool Stage(const std::string& name,
             const std::function<absl::StatusOr<std::string>()>& body) {
    StageResult r;
    r.stage = name;
    r.started = cp_.clock().Now();
    auto detail = body();
    r.finished = cp_.clock().Now();
    r.ok = detail.ok();
    r.detail = detail.ok() ? *detail : std::string(detail.status().message());
    cp_.Note(actor_, absl::StrCat("stage:", name), run_.component, run_.deploy,
             absl::StrCat("result=", r.ok ? "ok" : "halt"));
    run_.stages.push_back(std::move(r));
    if (!detail.ok()) run_.halted_at = name;
    return detail.ok();
  }

  // Runs production traffic until both sides of the comparison have enough
  // samples or the cap is hit. Returns the verdict over [from, now).
  absl::StatusOr<lifecycle::CanaryVerdict> Observe(const DeployId& candidate,
                                                   const DeployId& baseline,
                                                   Tick from, Tick at_least) {
    const auto& p = cp_.config().pipeline;
    const Tick chunk = std::max(p.observe_ticks, at_least);
    Tick observed = 0;
    lifecycle::CanaryVerdict v;
    do {
      CND_RETURN_IF_ERROR(cp_.Simulate(std::nullopt, chunk).status());
      observed += chunk;
      v = cp_.Compare(candidate, baseline, from, cp_.clock().Now());
    } while (v.Has(lifecycle::VerdictReason::kInsufficientSamples) &&
             observed < p.max_observe_ticks);
    return v;
  }

 private:
  ControlPlane& cp_;
  const std::string& actor_;
  PipelineRun& run_;
};

absl::Status Halt(const std::string& message) {
  return absl::FailedPreconditionError(message);
}

}  // namespace

absl::StatusOr<PipelineRun> RunPipeline(ControlPlane& cp,
                                        const DeployRequest& request,
                                        const std::string& actor) {
  std::lock_guard<std::recursive_mutex> lock(cp.op_mutex());
  PipelineRun run;
  run.component = request.component;
  Runner runner(cp, actor, run);
  auto& releases = cp.releases();
  const Tick hold = cp.config().lifecycle.shift.hold_ticks;

  // Precondition failures (unknown component) are errors, not halts.
  if (cp.config().FindComponent(request.component) == nullptr) {
    return MakeError(ErrorKind::kUnknownComponent,
                     absl::StrCat("unknown component ", request.component));
  }
  const DeployId old_release = *releases.ReleasedOf(request.component);

  if (!runner.Stage("deploy", [&]() -> absl::StatusOr<std::string> {
        CND_ASSIGN_OR_RETURN(auto record, cp.CreateDeploy(request, actor));
        run.deploy = record.id;
        return absl::StrCat("created ", record.id, " (", record.version, "@",
                            record.branch, ")");
      })) {
    return run;
  }

  harness::SuiteRun suite_run;
  if (!runner.Stage("test", [&]() -> absl::StatusOr<std::string> {
        CND_RETURN_IF_ERROR(releases.BeginTesting(run.deploy, actor).status());
        CND_ASSIGN_OR_RETURN(
            suite_run, cp.RunSuite("", {{request.component, run.deploy}}));
        return absl::StrCat(suite_run.suite_id, " ", suite_run.pass_count, "/",
                            suite_run.pass_count + suite_run.fail_count,
                            " passed");
      })) {
    return run;
  }

  if (!runner.Stage("verify-tests", [&]() -> absl::StatusOr<std::string> {
        CND_ASSIGN_OR_RETURN(
            auto record,
            releases.RecordTestResult(
                run.deploy,
                {suite_run.suite_id, suite_run.pass_count, suite_run.fail_count},
                actor));
        if (record.state != DeployState::kTested) {
          std::string failed;
          for (const auto& r : suite_run.results) {
            if (!r.passed) absl::StrAppend(&failed, failed.empty() ? "" : ",", r.test_id);
          }
          return Halt(absl::StrCat("tests failed: ", failed));
        }
        return std::string("all tests passed");
      })) {
    return run;
  }

  Tick canary_start = 0;
  if (!runner.Stage("canary", [&]() -> absl::StatusOr<std::string> {
        CND_ASSIGN_OR_RETURN(auto rule,
                             cp.StartCanary(run.deploy, std::nullopt, actor));
        canary_start = cp.clock().Now();
        return FormatRule(rule);
      })) {
    return run;
  }

  if (!runner.Stage("verify-canary", [&]() -> absl::StatusOr<std::string> {
        CND_ASSIGN_OR_RETURN(
            auto v, runner.Observe(run.deploy, old_release, canary_start, hold));
        if (!v.pass) {
          CND_RETURN_IF_ERROR(
              releases.Abort(run.deploy, actor, FormatVerdict(v)).status());
          return Halt(absl::StrCat("canary failed: ", FormatVerdict(v)));
        }
        return FormatVerdict(v);
      })) {
    return run;
  }

  if (!runner.Stage("shift", [&]() -> absl::StatusOr<std::string> {
        std::string steps;
        bool observed = true;  // verify-canary already covered the canary step
        while (releases.Find(run.deploy)->weight < 100) {
          if (!observed) {
            const Tick from = *releases.StepStartedAt(run.deploy);
            CND_RETURN_IF_ERROR(
                runner.Observe(run.deploy, old_release, from, hold).status());
          }
          observed = false;
          auto rule = cp.Advance(run.deploy, actor);
          if (!rule.ok()) {
            if (releases.InFlightOf(request.component) == run.deploy) {
              CND_RETURN_IF_ERROR(
                  releases.Abort(run.deploy, actor, "shift halted").status());
            }
            return rule.status();
          }
          absl::StrAppend(&steps, steps.empty() ? "" : " ",
                          rule->WeightOf(run.deploy));
        }
        return absl::StrCat("weights ", steps);
      })) {
    return run;
  }

  if (!runner.Stage("verify-release", [&]() -> absl::StatusOr<std::string> {
        CND_RETURN_IF_ERROR(releases.FinalizeRelease(run.deploy, actor).status());
        const Tick released_at = cp.clock().Now();
        CND_RETURN_IF_ERROR(
            cp.Simulate(std::nullopt, cp.config().pipeline.verify_ticks).status());
        // New release after finalize against the old one while it still
        // carried traffic.
        auto verdict = lifecycle::EvaluateCanary(
            cp.metrics().Window(run.deploy, released_at, cp.clock().Now()),
            cp.metrics().Window(old_release, canary_start, released_at),
            cp.config().lifecycle.canary);
        if (verdict.Regressed()) {
          CND_RETURN_IF_ERROR(
              releases.Rollback(request.component, actor).status());
          return Halt(absl::StrCat("release regressed: ",
                                   FormatVerdict(verdict)));
        }
        return FormatVerdict(verdict);
      })) {
    return run;
  }
  run.released = true;

  if (!runner.Stage("retire-old", [&]() -> absl::StatusOr<std::string> {
        if (releases.PredecessorOf(request.component) == old_release) {
          CND_RETURN_IF_ERROR(
              cp.AdvanceIdle(cp.config().lifecycle.retention_ticks));
        }
        auto old = releases.Find(old_release);
        if (old->state != DeployState::kRetired) {
          return Halt(absl::StrCat(old_release, " is still ",
                                   DeployStateName(old->state)));
        }
        return absl::StrCat("retired ", old_release);
      })) {
    return run;
  }
  return run;
}

json_fields::Json ToJson(const PipelineRun& run) {
  json_fields::Json stages = json_fields::Json::array();
  for (const auto& s : run.stages) {
    stages.push_back({{"stage", s.stage},
                      {"ok", s.ok},
                      {"detail", s.detail},
                      {"started", s.started},
                      {"finished", s.finished}});
  }
  json_fields::Json j = {{"component", run.component},
                         {"deploy", run.deploy},
                         {"released", run.released},
                         {"stages", stages}};
  j["halted_at"] = run.halted_at ? json_fields::Json(*run.halted_at)
                                 : json_fields::Json(nullptr);
  j["status"] = run.halted_at ? absl::StrCat("halted-at(", *run.halted_at, ")")
                              : std::string("released");
  return j;
}

}  // namespace cnd::control
