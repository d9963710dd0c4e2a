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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/json_fields.h"
#include "cnd/control/control_plane.h"

namespace cnd::control {

// The eight upgrade steps, in order.
inline constexpr std::array<const char*, 8> kPipelineStages = {
    "deploy",        "test",  "verify-tests",   "canary",
    "verify-canary", "shift", "verify-release", "retire-old"};

struct StageResult {
  std::string stage;
  bool ok = false;
  std::string detail;
  Tick started = 0;
  Tick finished = 0;
};

struct PipelineRun {
  ComponentId component;
  DeployId deploy;
  std::vector<StageResult> stages;
  bool released = false;
  // First failing stage; no later stage ran.
  std::optional<std::string> halted_at;
};

// Runs deploy -> test -> verify-tests -> canary -> verify-canary -> shift ->
// verify-release -> retire-old. A failing verify restores the old release
// to 100 before halting. Each stage leaves a "stage:<name>" audit entry.
absl::StatusOr<PipelineRun> RunPipeline(ControlPlane& cp,
                                        const DeployRequest& request,
                                        const std::string& actor);

json_fields::Json ToJson(const PipelineRun& run);

}  // namespace cnd::control
