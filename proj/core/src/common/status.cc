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

#include "cnd/common/status.h"

#include <array>
#include <utility>

#include "absl/strings/cord.h"

namespace cnd {
namespace {

constexpr char kPayloadUrl[] = "type.cndsim/error-kind";

struct KindInfo {
  ErrorKind kind;
  std::string_view name;
  absl::StatusCode code;
};

constexpr std::array<KindInfo, 22> kKinds = {{
    {ErrorKind::kBadSignature, "BadSignature", absl::StatusCode::kUnauthenticated},
    {ErrorKind::kMalformedAnnotation, "MalformedAnnotation", absl::StatusCode::kInvalidArgument},
    {ErrorKind::kUnknownDeploy, "UnknownDeploy", absl::StatusCode::kNotFound},
    {ErrorKind::kUnknownComponent, "UnknownComponent", absl::StatusCode::kNotFound},
    {ErrorKind::kUnknownTopic, "UnknownTopic", absl::StatusCode::kNotFound},
    {ErrorKind::kNoLiveDeploy, "NoLiveDeploy", absl::StatusCode::kUnavailable},
    {ErrorKind::kIllegalTransition, "IllegalTransition", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kNotTested, "NotTested", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kNotMainBranch, "NotMainBranch", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kPercentNotAllowed, "PercentNotAllowed", absl::StatusCode::kInvalidArgument},
    {ErrorKind::kBudgetDepleted, "BudgetDepleted", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kMetricsRegression, "MetricsRegression", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kInsufficientSamples, "InsufficientSamples", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kHoldNotElapsed, "HoldNotElapsed", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kScheduleExhausted, "ScheduleExhausted", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kNotAtFullWeight, "NotAtFullWeight", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kNoPredecessor, "NoPredecessor", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kCloneInProgress, "CloneInProgress", absl::StatusCode::kAborted},
    {ErrorKind::kNoStagingClone, "NoStagingClone", absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kAccessDenied, "AccessDenied", absl::StatusCode::kPermissionDenied},
    {ErrorKind::kSchemaViolation, "SchemaViolation", absl::StatusCode::kInvalidArgument},
    {ErrorKind::kValidationError, "ValidationError", absl::StatusCode::kInvalidArgument},
}};

const KindInfo* Find(ErrorKind kind) {
  for (const auto& info : kKinds) {
    if (info.kind == kind) return &info;
  }
  return nullptr;
}

}  // namespace

std::string ErrorKindName(ErrorKind kind) {
  const KindInfo* info = Find(kind);
  return info ? std::string(info->name) : "Unknown";
}

absl::Status MakeError(ErrorKind kind, const std::string& message) {
  const KindInfo* info = Find(kind);
  absl::Status status(info ? info->code : absl::StatusCode::kUnknown, message);
  status.SetPayload(kPayloadUrl,
                    absl::Cord(std::string(info ? info->name : "Unknown")));
  return status;
}

std::optional<ErrorKind> ErrorKindOf(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  auto payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (const auto& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

}  // namespace cnd
