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

#include "cnd/mesh/traffic_rule.h"

#include <set>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::mesh {

int TrafficRule::WeightOf(const DeployId& deploy) const {
  for (const auto& e : entries) {
    if (e.deploy == deploy) return e.weight;
  }
  return 0;
}

int TrafficRule::TotalWeight() const {
  int total = 0;
  for (const auto& e : entries) total += e.weight;
  return total;
}

absl::Status TrafficRule::Validate() const {
  std::set<DeployId> seen;
  for (const auto& e : entries) {
    if (e.weight < 0) {
      return MakeError(ErrorKind::kValidationError,
                       absl::StrCat("negative weight for ", e.deploy));
    }
    if (!seen.insert(e.deploy).second) {
      return MakeError(ErrorKind::kValidationError,
                       absl::StrCat("duplicate rule entry for ", e.deploy));
    }
  }
  if (TotalWeight() != 100) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("weights for ", component, " sum to ",
                                  TotalWeight(), ", not 100"));
  }
  return absl::OkStatus();
}

std::string FormatRule(const TrafficRule& rule) {
  std::string out;
  for (const auto& e : rule.entries) {
    absl::StrAppend(&out, out.empty() ? "" : ",", e.deploy, ":", e.weight);
  }
  return out;
}

}  // namespace cnd::mesh
