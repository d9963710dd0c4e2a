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
#include <string>
#include <string_view>

#include "absl/status/status.h"

namespace cnd {

// Domain error kinds. Each maps onto a canonical absl code and is carried as a
// status payload so callers (the API layer in particular) can recover it.
enum class ErrorKind {
  kBadSignature,
  kMalformedAnnotation,
  kUnknownDeploy,
  kUnknownComponent,
  kUnknownTopic,
  kNoLiveDeploy,
  kIllegalTransition,
  kNotTested,
  kNotMainBranch,
  kPercentNotAllowed,
  kBudgetDepleted,
  kMetricsRegression,
  kInsufficientSamples,
  kHoldNotElapsed,
  kScheduleExhausted,
  kNotAtFullWeight,
  kNoPredecessor,
  kCloneInProgress,
  kNoStagingClone,
  kAccessDenied,
  kSchemaViolation,
  kValidationError,
};

std::string ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, const std::string& message);

std::optional<ErrorKind> ErrorKindOf(const absl::Status& status);

inline bool HasErrorKind(const absl::Status& status, ErrorKind kind) {
  return ErrorKindOf(status) == kind;
}

}  // namespace cnd

#define CND_RETURN_IF_ERROR(expr)              \
  do {                                         \
    ::absl::Status _cnd_status = (expr);       \
    if (!_cnd_status.ok()) return _cnd_status; \
  } while (0)

#define CND_CONCAT_INNER(a, b) a##b
#define CND_CONCAT(a, b) CND_CONCAT_INNER(a, b)
#define CND_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                              \
  if (!tmp.ok()) return tmp.status();             \
  lhs = std::move(*tmp)
#define CND_ASSIGN_OR_RETURN(lhs, expr) \
  CND_ASSIGN_OR_RETURN_IMPL(CND_CONCAT(_cnd_statusor_, __LINE__), lhs, expr)
