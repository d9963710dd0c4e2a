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

#include "cnd/mesh/behavior.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::mesh {

absl::Status VersionBehavior::Validate() const {
  if (!std::isfinite(error_prob) || error_prob < 0.0 || error_prob > 1.0) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("error_prob must be in [0,1], got ",
                                  error_prob));
  }
  if (!std::isfinite(latency_mean_ms) || latency_mean_ms < 0.0) {
    return MakeError(ErrorKind::kValidationError,
                     "latency_mean_ms must be >= 0");
  }
  if (!std::isfinite(latency_jitter_ms) || latency_jitter_ms < 0.0) {
    return MakeError(ErrorKind::kValidationError,
                     "latency_jitter_ms must be >= 0");
  }
  return absl::OkStatus();
}

bool VersionBehavior::FaultsOn(const std::string& path) const {
  return fault_paths.empty() ||
         std::find(fault_paths.begin(), fault_paths.end(), path) !=
             fault_paths.end();
}

}  // namespace cnd::mesh
