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

#include "cnd/mesh/router.h"

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::mesh {

absl::StatusOr<RequestContext> VerifyIngress(
    const std::optional<SignedAnnotation>& raw, const SigningKey& key,
    const MeshSnapshot& snapshot, std::string trace_id, Tick now) {
  if (!raw.has_value()) {
    return RequestContext::Production(std::move(trace_id), now);
  }
  if (!VerifyTag(*raw, key)) {
    return MakeError(ErrorKind::kBadSignature,
                     "routing annotation signature does not verify");
  }
  auto annotation = DecodeAnnotation(raw->payload);
  if (!annotation.ok()) return annotation.status();
  for (const auto& [component, deploy] : annotation->overrides) {
    if (!snapshot.IsRoutable(component, deploy)) {
      return MakeError(ErrorKind::kUnknownDeploy,
                       absl::StrCat("override for component ", component,
                                    " names unknown or retired deploy ",
                                    deploy));
    }
  }
  return RequestContext::FromAnnotation(std::move(trace_id),
                                        *std::move(annotation), now);
}

absl::StatusOr<RequestContext> VerifyIngressWire(
    std::optional<std::string_view> wire, const SigningKey& key,
    const MeshSnapshot& snapshot, std::string trace_id, Tick now) {
  if (!wire.has_value()) {
    return VerifyIngress(std::nullopt, key, snapshot, std::move(trace_id),
                         now);
  }
  auto parsed = SignedAnnotation::FromWire(*wire);
  if (!parsed.ok()) {
    // An unparseable annotation cannot be authenticated.
    return MakeError(ErrorKind::kBadSignature,
                     std::string(parsed.status().message()));
  }
  return VerifyIngress(*std::move(parsed), key, snapshot, std::move(trace_id),
                       now);
}

absl::StatusOr<DeployId> ResolveRoute(const ComponentId& component,
                                      const RequestContext& ctx,
                                      const TrafficRule& rule, Rng& rng) {
  const std::uint64_t draw = rng.Below(100);
  if (const DeployId* forced = ctx.OverrideFor(component)) return *forced;
  std::uint64_t cumulative = 0;
  for (const auto& e : rule.entries) {
    if (e.weight <= 0) continue;
    cumulative += static_cast<std::uint64_t>(e.weight);
    if (draw < cumulative) return e.deploy;
  }
  return MakeError(ErrorKind::kNoLiveDeploy,
                   absl::StrCat("no deploy of ", component,
                                " carries production weight"));
}

absl::StatusOr<std::string> PreviewUrl(const std::set<DeployId>& deploys,
                                       const SigningKey& key,
                                       const MeshSnapshot& snapshot, Tick now,
                                       std::uint64_t nonce) {
  RoutingAnnotation annotation;
  annotation.staging = true;
  annotation.issued_at = now;
  annotation.nonce = nonce;
  for (const auto& id : deploys) {
    const DeployInfo* info = snapshot.FindDeploy(id);
    if (info == nullptr || info->state == DeployState::kRetired) {
      return MakeError(ErrorKind::kUnknownDeploy,
                       absl::StrCat("unknown or retired deploy ", id));
    }
    if (!annotation.overrides.emplace(info->component, id).second) {
      return MakeError(ErrorKind::kValidationError,
                       absl::StrCat("two deploys requested for component ",
                                    info->component));
    }
  }
  return absl::StrCat(kPreviewUrlPrefix,
                      SignAnnotation(annotation, key).ToWire());
}

std::string_view PreviewToken(std::string_view url) {
  constexpr std::string_view prefix = kPreviewUrlPrefix;
  if (url.substr(0, prefix.size()) == prefix) return url.substr(prefix.size());
  return url;
}

}  // namespace cnd::mesh
