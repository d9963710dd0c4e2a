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

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/types.h"
#include "cnd/harness/metrics.h"

namespace cnd::lifecycle {

// SLO held in parts per billion so budget arithmetic is exact.
inline constexpr std::int64_t kPpb = 1'000'000'000;

struct Slo {
  std::int64_t target_ppb = 999'500'000;  // 99.95%
  Tick window_ticks = 30 * kTicksPerDay;

  // Rounds `fraction` to the nearest ppb; rejects values outside (0, 1].
  static absl::StatusOr<Slo> FromFraction(double fraction, Tick window_ticks);
  double target() const { return static_cast<double>(target_ppb) / kPpb; }
};

struct ErrorBudget {
  Slo slo;
  // allowed = window * (1 - slo), held as the exact ratio
  // allowed_numerator / kPpb.
  std::int64_t allowed_numerator = 0;
  // Ticks in which the production error rate exceeded 1 - slo.
  Tick consumed_ticks = 0;
  bool depleted = false;

  double allowed_error_ticks() const {
    return static_cast<double>(allowed_numerator) / kPpb;
  }
  double allowed_error_minutes() const {
    return allowed_error_ticks() / kTicksPerMinute;
  }
  double remaining_ticks() const {
    return allowed_error_ticks() - static_cast<double>(consumed_ticks);
  }
};

// Budget from a per-tick production series. Only the most recent
// `slo.window_ticks` entries count.
ErrorBudget CheckErrorBudget(const std::vector<harness::TickStats>& series,
                             const Slo& slo);

// A budget with `consumed_ticks` already spent.
ErrorBudget BudgetFor(const Slo& slo, Tick consumed_ticks);

}  // namespace cnd::lifecycle
