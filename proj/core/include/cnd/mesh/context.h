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

#include "cnd/common/types.h"
#include "cnd/mesh/annotation.h"

namespace cnd::mesh {

// Verified, normalized per-request routing state.
//
// Invariant: testing() == (staging || !overrides.empty()), and overrides imply
// staging. Production contexts carry an empty annotation.
class RequestContext {
 public:
  static RequestContext Production(std::string trace_id, Tick entry_tick);

  // Normalizes: a non-empty override set forces staging on.
  static RequestContext FromAnnotation(std::string trace_id,
                                       RoutingAnnotation annotation,
                                       Tick entry_tick);

  const std::string& trace_id() const { return trace_id_; }
  const RoutingAnnotation& annotation() const { return annotation_; }
  bool testing() const { return testing_; }
  bool staging() const { return annotation_.staging; }
  Tick entry_tick() const { return entry_tick_; }

  const DeployId* OverrideFor(const ComponentId& component) const;

 private:
  RequestContext() = default;

  std::string trace_id_;
  RoutingAnnotation annotation_;
  bool testing_ = false;
  Tick entry_tick_ = 0;
};

}  // namespace cnd::mesh
