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

#include "cnd/common/types.h"
#include "cnd/harness/metrics.h"
#include "cnd/mesh/annotation.h"
#include "cnd/mesh/snapshot.h"
#include "cnd/staging/store.h"

namespace cnd::harness {

// The live pieces a driver needs to push requests through the mesh.
struct MeshBinding {
  const mesh::SnapshotSource* routing = nullptr;
  staging::StagingAwareStore* store = nullptr;
  MetricsRecorder* metrics = nullptr;
  VirtualClock* clock = nullptr;
  const mesh::SigningKey* key = nullptr;
};

}  // namespace cnd::harness
