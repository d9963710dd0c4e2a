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

#include "cnd/lifecycle/error_budget.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::lifecycle {

absl::StatusOr<Slo> Slo::FromFraction(double fraction, Tick window_ticks) {
  if (!(fraction > 0 && fraction <= 1)) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("slo ", fraction, " outside (0, 1]"));
  }
  if (window_ticks <= 0) {
    return MakeError(ErrorKind::kValidationError, "slo window must be > 0");
  }
  return Slo{std::llround(fraction * kPpb), window_ticks};
}

ErrorBudget BudgetFor(const Slo& slo, Tick consumed_ticks) {
  ErrorBudget b;
  b.slo = slo;
  b.allowed_numerator = slo.window_ticks * (kPpb - slo.target_ppb);
  b.consumed_ticks = consumed_ticks;
  // consumed >= allowed, compared as integers scaled by kPpb.
  b.depleted = consumed_ticks * kPpb >= b.allowed_numerator;
  return b;
}

ErrorBudget CheckErrorBudget(const std::vector<harness::TickStats>& series,
                             const Slo& slo) {
  const std::size_t start =
      series.size() > static_cast<std::size_t>(slo.window_ticks)
          ? series.size() - static_cast<std::size_t>(slo.window_ticks)
          : 0;
  const std::int64_t tolerated_ppb = kPpb - slo.target_ppb;
  Tick consumed = 0;
  for (std::size_t i = start; i < series.size(); ++i) {
    const auto& s = series[i];
    // errors / requests > 1 - slo
    if (s.requests > 0 &&
        static_cast<std::int64_t>(s.errors) * kPpb >
            static_cast<std::int64_t>(s.requests) * tolerated_ppb) {
      ++consumed;
    }
  }
  return BudgetFor(slo, consumed);
}

}  // namespace cnd::lifecycle
