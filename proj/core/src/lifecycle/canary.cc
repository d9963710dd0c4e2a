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

#include "cnd/lifecycle/canary.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cnd/common/status.h"

namespace cnd::lifecycle {
namespace {

absl::Status Invalid(const std::string& message) {
  return MakeError(ErrorKind::kValidationError, message);
}

WindowStats Stats(const harness::MetricsWindow& w, double q) {
  return WindowStats{w.n, w.errors, w.ErrorRate(), w.latency.Quantile(q)};
}

}  // namespace

absl::Status CanaryPolicy::Validate() const {
  if (allowed_percents.empty()) return Invalid("allowed_percents is empty");
  for (int p : allowed_percents) {
    if (p <= 0 || p >= 100) {
      return Invalid(absl::StrCat("canary percent ", p, " outside (0, 100)"));
    }
  }
  if (!allowed_percents.contains(initial_percent)) {
    return Invalid("initial_percent not in allowed_percents");
  }
  if (min_samples < 100) return Invalid("min_samples must be >= 100");
  if (!(error_delta_abs >= 0) || !(latency_delta_rel >= 0) ||
      !(significance > 0)) {
    return Invalid("thresholds must be non-negative");
  }
  if (!(latency_quantile > 0 && latency_quantile <= 1)) {
    return Invalid("latency_quantile must be in (0, 1]");
  }
  return absl::OkStatus();
}

std::string VerdictReasonName(VerdictReason reason) {
  switch (reason) {
    case VerdictReason::kErrorRateRegression:
      return "error-rate-regression";
    case VerdictReason::kLatencyRegression:
      return "latency-regression";
    case VerdictReason::kInsufficientSamples:
      return "insufficient-samples";
  }
  return "unknown";
}

bool CanaryVerdict::Has(VerdictReason reason) const {
  return std::find(reasons.begin(), reasons.end(), reason) != reasons.end();
}

double TwoProportionZ(std::uint64_t canary_n, std::uint64_t canary_errors,
                      std::uint64_t baseline_n,
                      std::uint64_t baseline_errors) {
  if (canary_n == 0 || baseline_n == 0) return 0;
  const double n1 = static_cast<double>(canary_n);
  const double n2 = static_cast<double>(baseline_n);
  const double p1 = static_cast<double>(canary_errors) / n1;
  const double p2 = static_cast<double>(baseline_errors) / n2;
  const double pooled =
      static_cast<double>(canary_errors + baseline_errors) / (n1 + n2);
  const double var = pooled * (1 - pooled) * (1 / n1 + 1 / n2);
  if (var <= 0) return 0;
  return (p1 - p2) / std::sqrt(var);
}

CanaryVerdict EvaluateCanary(const harness::MetricsWindow& canary,
                             const harness::MetricsWindow& baseline,
                             const CanaryPolicy& policy) {
  CanaryVerdict v;
  v.canary = Stats(canary, policy.latency_quantile);
  v.baseline = Stats(baseline, policy.latency_quantile);
  if (canary.n < policy.min_samples || baseline.n < policy.min_samples) {
    v.reasons.push_back(VerdictReason::kInsufficientSamples);
    return v;
  }
  v.z = TwoProportionZ(canary.n, canary.errors, baseline.n, baseline.errors);
  if (v.z > policy.significance &&
      v.canary.error_rate - v.baseline.error_rate > policy.error_delta_abs) {
    v.reasons.push_back(VerdictReason::kErrorRateRegression);
  }
  if (v.canary.latency_quantile_ms >
      v.baseline.latency_quantile_ms * (1 + policy.latency_delta_rel)) {
    v.reasons.push_back(VerdictReason::kLatencyRegression);
  }
  v.pass = v.reasons.empty();
  return v;
}

absl::Status ShiftSchedule::Validate() const {
  if (steps.empty() || steps.back() != 100) {
    return Invalid("shift schedule must end at 100");
  }
  int prev = 0;
  for (int s : steps) {
    if (s <= prev || s > 100) {
      return Invalid("shift steps must be strictly increasing in (0, 100]");
    }
    prev = s;
  }
  if (hold_ticks < 0) return Invalid("hold_ticks must be >= 0");
  return absl::OkStatus();
}

std::optional<int> ShiftSchedule::NextAfter(int weight) const {
  for (int s : steps) {
    if (s > weight) return s;
  }
  return std::nullopt;
}

std::string FormatVerdict(const CanaryVerdict& v) {
  std::string reasons;
  for (auto r : v.reasons) {
    absl::StrAppend(&reasons, reasons.empty() ? "" : ",", VerdictReasonName(r));
  }
  return absl::StrFormat(
      "%s z=%.3f canary(n=%d err=%d q=%.0fms) baseline(n=%d err=%d q=%.0fms)%s",
      v.pass ? "pass" : "fail", v.z, v.canary.n, v.canary.errors,
      v.canary.latency_quantile_ms, v.baseline.n, v.baseline.errors,
      v.baseline.latency_quantile_ms,
      reasons.empty() ? "" : absl::StrCat(" reasons=", reasons));
}

}  // namespace cnd::lifecycle
