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

#include "cnd/harness/traffic.h"

#include "absl/strings/str_cat.h"
#include "cnd/common/rng.h"
#include "cnd/common/status.h"

namespace cnd::harness {

absl::Status TrafficProfile::Validate() const {
  if (rate <= 0) {
    return MakeError(ErrorKind::kValidationError, "rate must be positive");
  }
  if (mix.empty()) {
    return MakeError(ErrorKind::kValidationError, "mix must not be empty");
  }
  for (const auto& r : mix) {
    if (r.weight <= 0) {
      return MakeError(ErrorKind::kValidationError,
                       absl::StrCat("mix weight for ", r.route.component,
                                    r.route.path, " must be positive"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<TrafficResult> RunProductionTraffic(
    const TrafficProfile& profile, MeshBinding& mesh, Tick ticks,
    const TrafficOptions& options) {
  CND_RETURN_IF_ERROR(profile.Validate());
  std::uint64_t total_weight = 0;
  for (const auto& r : profile.mix) total_weight += r.weight;

  Rng rng(profile.seed);
  TrafficResult result;
  result.from = mesh.clock->Now();
  std::uint64_t seq = 0;
  for (Tick t = 0; t < ticks; ++t) {
    const Tick now = mesh.clock->Now();
    for (int i = 0; i < profile.rate; ++i) {
      std::uint64_t pick = rng.Below(total_weight);
      const mesh::EntryRoute* route = &profile.mix.back().route;
      for (const auto& r : profile.mix) {
        if (pick < static_cast<std::uint64_t>(r.weight)) {
          route = &r.route;
          break;
        }
        pick -= r.weight;
      }
      auto snapshot = mesh.routing->Current();
      auto ctx = mesh::RequestContext::Production(
          absl::StrCat(options.trace_prefix, profile.seed, "-", seq++), now);
      auto exec = mesh::ExecuteRequest(*route, ctx, *snapshot, *mesh.store,
                                       rng, mesh.metrics);
      if (!exec.ok()) {
        ++result.rejected;
        continue;
      }
      ++result.requests;
      if (exec->response.status == mesh::Outcome::kError) ++result.errors;
      if (options.trace_log != nullptr) {
        *options.trace_log << mesh::FormatTrace(exec->trace) << "\n";
      }
    }
    const Tick after = mesh.clock->Advance(1);
    if (options.on_tick) options.on_tick(after);
  }
  result.to = mesh.clock->Now();
  if (mesh.metrics != nullptr) {
    result.windows = mesh.metrics->Windows(result.from, result.to);
  }
  return result;
}

}  // namespace cnd::harness
