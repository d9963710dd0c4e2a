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

#include "cnd/common/types.h"

#include <array>
#include <utility>

namespace cnd {
namespace {

constexpr std::array<std::pair<DeployState, std::string_view>, 9> kStateNames =
    {{
        {DeployState::kPreproduction, "Preproduction"},
        {DeployState::kTesting, "Testing"},
        {DeployState::kTested, "Tested"},
        {DeployState::kTestFailed, "TestFailed"},
        {DeployState::kCanary, "Canary"},
        {DeployState::kShifting, "Shifting"},
        {DeployState::kReleased, "Released"},
        {DeployState::kAborted, "Aborted"},
        {DeployState::kRetired, "Retired"},
    }};

}  // namespace

std::string DeployStateName(DeployState state) {
  for (const auto& [s, name] : kStateNames) {
    if (s == state) return std::string(name);
  }
  return "Unknown";
}

std::optional<DeployState> ParseDeployState(std::string_view name) {
  for (const auto& [s, n] : kStateNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

bool IsValidToken(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                    c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace cnd
