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

#include <optional>
#include <string>
#include <string_view>

#include "cnd/common/types.h"
#include "cnd/mesh/behavior.h"

namespace cnd::lifecycle {

inline constexpr char kMainBranch[] = "main";

enum class TestStatus { kUntested, kPassed, kFailed };

std::string TestStatusName(TestStatus status);
std::optional<TestStatus> ParseTestStatus(std::string_view name);

// What a suite run contributes to a deploy's record.
struct TestSummary {
  std::string suite_id;
  int passed = 0;
  int failed = 0;

  bool AllPassed() const { return failed == 0 && passed > 0; }
};

// Everything needed to create a deploy, minus the id.
struct DeploySpec {
  ComponentId component;
  std::string version;
  std::string branch;
  std::string commit;
  mesh::VersionBehavior behavior;
};

struct DeployRecord {
  DeployId id;
  ComponentId component;
  std::string version;
  std::string branch;
  std::string commit;
  DeployState state = DeployState::kPreproduction;
  // Percent of the component's production traffic.
  int weight = 0;
  Tick created_at = 0;
  TestStatus test_status = TestStatus::kUntested;
  mesh::VersionBehavior behavior;
  // Set while this deploy waits out retention as a rollback target.
  std::optional<Tick> retire_at;

  bool OnMain() const { return branch == kMainBranch; }
  // The release gate: only tested main-branch builds may carry traffic.
  bool Releasable() const {
    return test_status == TestStatus::kPassed && OnMain();
  }
};

// The lifecycle transition table.
bool IsLegalTransition(DeployState from, DeployState to);

}  // namespace cnd::lifecycle
