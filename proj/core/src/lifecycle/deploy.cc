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

#include "cnd/lifecycle/deploy.h"

namespace cnd::lifecycle {

std::string TestStatusName(TestStatus status) {
  switch (status) {
    case TestStatus::kUntested:
      return "untested";
    case TestStatus::kPassed:
      return "passed";
    case TestStatus::kFailed:
      return "failed";
  }
  return "untested";
}

std::optional<TestStatus> ParseTestStatus(std::string_view name) {
  if (name == "untested") return TestStatus::kUntested;
  if (name == "passed") return TestStatus::kPassed;
  if (name == "failed") return TestStatus::kFailed;
  return std::nullopt;
}

bool IsLegalTransition(DeployState from, DeployState to) {
  using S = DeployState;
  switch (from) {
    case S::kPreproduction:
      // Retired only via the optional preproduction TTL.
      return to == S::kTesting || to == S::kRetired;
    case S::kTesting:
      return to == S::kTested || to == S::kTestFailed;
    case S::kTested:
      return to == S::kCanary;
    case S::kTestFailed:
      return false;
    case S::kCanary:
      return to == S::kShifting || to == S::kAborted;
    case S::kShifting:
      return to == S::kReleased || to == S::kAborted;
    case S::kReleased:
      // Aborted: demoted by a successor's release (standby) or a rollback.
      return to == S::kRetired || to == S::kAborted;
    case S::kAborted:
      // Released: a standby predecessor restored by rollback.
      return to == S::kTesting || to == S::kRetired || to == S::kReleased;
    case S::kRetired:
      return false;
  }
  return false;
}

}  // namespace cnd::lifecycle
