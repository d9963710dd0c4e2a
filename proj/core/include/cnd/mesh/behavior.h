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

#include <string>
#include <vector>

#include "absl/status/status.h"

namespace cnd::mesh {

// Simulated runtime characteristics of one deployed version.
struct VersionBehavior {
  double latency_mean_ms = 10.0;
  // Half-width of the uniform latency distribution.
  double latency_jitter_ms = 0.0;
  double error_prob = 0.0;
  // Echoed in responses so callers can tell which version served them.
  std::string marker;
  // When non-empty, errors are injected only for requests on these entry
  // paths. Models a defect on a code path the integration suite never takes.
  std::vector<std::string> fault_paths;

  absl::Status Validate() const;

  // True when `error_prob` applies to a request on `path`.
  bool FaultsOn(const std::string& path) const;

  bool operator==(const VersionBehavior&) const = default;
};

}  // namespace cnd::mesh
