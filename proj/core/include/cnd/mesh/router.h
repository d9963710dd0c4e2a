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
#include <set>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "cnd/common/rng.h"
#include "cnd/mesh/annotation.h"
#include "cnd/mesh/context.h"
#include "cnd/mesh/snapshot.h"
#include "cnd/mesh/traffic_rule.h"

namespace cnd::mesh {

// Ingress check. No annotation yields a production context. A bad tag is a
// rejection (kBadSignature), never a downgrade to production. Every override
// must name a live deploy of its component (kUnknownDeploy).
absl::StatusOr<RequestContext> VerifyIngress(
    const std::optional<SignedAnnotation>& raw, const SigningKey& key,
    const MeshSnapshot& snapshot, std::string trace_id, Tick now);

// As above, from the wire form carried in a header or preview URL.
absl::StatusOr<RequestContext> VerifyIngressWire(
    std::optional<std::string_view> wire, const SigningKey& key,
    const MeshSnapshot& snapshot, std::string trace_id, Tick now);

// Picks the deploy serving `component`. An override wins unconditionally;
// otherwise a weighted draw over the rule. Always consumes exactly one value
// from `rng`, so streams stay aligned whether or not an override applies.
absl::StatusOr<DeployId> ResolveRoute(const ComponentId& component,
                                      const RequestContext& ctx,
                                      const TrafficRule& rule, Rng& rng);

inline constexpr char kPreviewUrlPrefix[] =
    "https://preview.cnd.local/?cnd-route=";

// Signed staging annotation overriding each deploy's component. An empty set
// yields a pure staging probe.
absl::StatusOr<std::string> PreviewUrl(const std::set<DeployId>& deploys,
                                       const SigningKey& key,
                                       const MeshSnapshot& snapshot, Tick now,
                                       std::uint64_t nonce);

// Extracts the wire annotation from a preview URL (or returns a bare token
// unchanged).
std::string_view PreviewToken(std::string_view url);

}  // namespace cnd::mesh
