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

#include "cnd/mesh/context.h"

namespace cnd::mesh {

RequestContext RequestContext::Production(std::string trace_id,
                                          Tick entry_tick) {
  RequestContext ctx;
  ctx.trace_id_ = std::move(trace_id);
  ctx.entry_tick_ = entry_tick;
  return ctx;
}

RequestContext RequestContext::FromAnnotation(std::string trace_id,
                                              RoutingAnnotation annotation,
                                              Tick entry_tick) {
  RequestContext ctx;
  ctx.trace_id_ = std::move(trace_id);
  ctx.entry_tick_ = entry_tick;
  if (!annotation.overrides.empty()) annotation.staging = true;
  ctx.testing_ = annotation.staging;
  if (!ctx.testing_) {
    // An empty, non-staging annotation is indistinguishable from none.
    annotation = RoutingAnnotation{};
  }
  ctx.annotation_ = std::move(annotation);
  return ctx;
}

const DeployId* RequestContext::OverrideFor(
    const ComponentId& component) const {
  auto it = annotation_.overrides.find(component);
  return it == annotation_.overrides.end() ? nullptr : &it->second;
}

}  // namespace cnd::mesh
