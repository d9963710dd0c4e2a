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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "cnd/common/types.h"
#include "cnd/harness/metrics.h"

namespace cnd::lifecycle {

struct CanaryPolicy {
  // Percents start_canary accepts.
  std::set<int> allowed_percents = {1, 10};
  int initial_percent = 10;
  // Per side.
  std::uint64_t min_samples = 100;
  double error_delta_abs = 0.005;
  double latency_quantile = 0.99;
  double latency_delta_rel = 0.2;
  // z threshold of the two-proportion test.
  double significance = 3.0;

  absl::Status Validate() const;
};

enum class VerdictReason {
  kErrorRateRegression,
  kLatencyRegression,
  kInsufficientSamples,
};

std::string VerdictReasonName(VerdictReason reason);

struct WindowStats {
  std::uint64_t n = 0;
  std::uint64_t errors = 0;
  double error_rate = 0;
  double latency_quantile_ms = 0;
};

struct CanaryVerdict {
  bool pass = false;
  std::vector<VerdictReason> reasons;
  WindowStats canary;
  WindowStats baseline;
  double z = 0;

  bool Has(VerdictReason reason) const;
  // A real regression, as opposed to not having seen enough traffic yet.
  bool Regressed() const {
    return Has(VerdictReason::kErrorRateRegression) ||
           Has(VerdictReason::kLatencyRegression);
  }
};

// Pooled two-proportion z statistic of (canary - baseline). Zero when either
// side is empty or the pooled rate is 0 or 1.
double TwoProportionZ(std::uint64_t canary_n, std::uint64_t canary_errors,
                      std::uint64_t baseline_n, std::uint64_t baseline_errors);

// Fails closed: below min_samples on either side the only reason reported is
// insufficient-samples.
CanaryVerdict EvaluateCanary(const harness::MetricsWindow& canary,
                             const harness::MetricsWindow& baseline,
                             const CanaryPolicy& policy);

struct ShiftSchedule {
  std::vector<int> steps = {25, 50, 75, 100};
  Tick hold_ticks = 5 * kTicksPerMinute;

  // Strictly increasing, within (0, 100], ending at 100.
  absl::Status Validate() const;
  // First step strictly above `weight`.
  std::optional<int> NextAfter(int weight) const;
};

std::string FormatVerdict(const CanaryVerdict& verdict);

}  // namespace cnd::lifecycle
