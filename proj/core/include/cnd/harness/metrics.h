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

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "cnd/common/types.h"
#include "cnd/mesh/executor.h"

namespace cnd::harness {

// Fixed 1 ms buckets over [0, 1000) ms plus one overflow bucket.
class LatencyHistogram {
 public:
  static constexpr int kBuckets = 1000;

  void Add(double latency_ms);
  void Merge(const LatencyHistogram& other);
  std::uint64_t Total() const { return total_; }
  // Upper edge of the bucket holding the ceil(q * n)-th sample; 0 when empty.
  double Quantile(double q) const;
  const std::array<std::uint64_t, kBuckets + 1>& counts() const {
    return counts_;
  }

 private:
  std::array<std::uint64_t, kBuckets + 1> counts_{};
  std::uint64_t total_ = 0;
};

// Production traffic served by one deploy over [from, to).
struct MetricsWindow {
  DeployId deploy;
  Tick from = 0;
  Tick to = 0;
  std::uint64_t n = 0;
  std::uint64_t errors = 0;
  LatencyHistogram latency;

  double ErrorRate() const {
    return n == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(n);
  }
};

// End-to-end production outcomes for one tick.
struct TickStats {
  Tick tick = 0;
  std::uint64_t requests = 0;
  std::uint64_t errors = 0;
};

// Thread-safe sink for hop and request outcomes. Only production contexts
// feed deploy windows and the request series; testing hops are counted
// separately so test traffic never skews canary analysis.
class MetricsRecorder : public mesh::HopObserver {
 public:
  void OnHop(const mesh::RequestContext& ctx, const mesh::Hop& hop) override;
  void OnRequest(const mesh::RequestContext& ctx,
                 mesh::Outcome outcome) override;

  MetricsWindow Window(const DeployId& deploy, Tick from, Tick to) const;
  std::map<DeployId, MetricsWindow> Windows(Tick from, Tick to) const;
  // Dense: one entry per tick in [from, to).
  std::vector<TickStats> ProductionSeries(Tick from, Tick to) const;

  std::uint64_t testing_hops() const;
  std::uint64_t production_hops() const;

 private:
  struct Sample {
    Tick tick;
    float latency_ms;
    bool error;
  };

  mutable std::mutex mu_;
  std::map<DeployId, std::vector<Sample>> samples_;
  std::map<Tick, TickStats> requests_;
  std::uint64_t testing_hops_ = 0;
  std::uint64_t production_hops_ = 0;
};

}  // namespace cnd::harness
