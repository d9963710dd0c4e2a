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

#include "cnd/harness/metrics.h"

#include <algorithm>
#include <cmath>

namespace cnd::harness {

void LatencyHistogram::Add(double latency_ms) {
  int bucket = latency_ms < 0 ? 0 : static_cast<int>(std::floor(latency_ms));
  bucket = std::min(bucket, kBuckets);
  ++counts_[static_cast<std::size_t>(bucket)];
  ++total_;
}

void LatencyHistogram::Merge(const LatencyHistogram& other) {
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  total_ += other.total_;
}

double LatencyHistogram::Quantile(double q) const {
  if (total_ == 0) return 0.0;
  const auto rank = static_cast<std::uint64_t>(
      std::max(1.0, std::ceil(q * static_cast<double>(total_))));
  std::uint64_t cumulative = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    cumulative += counts_[i];
    if (cumulative >= rank) return static_cast<double>(i + 1);
  }
  return static_cast<double>(kBuckets + 1);
}

void MetricsRecorder::OnHop(const mesh::RequestContext& ctx,
                            const mesh::Hop& hop) {
  std::lock_guard<std::mutex> lock(mu_);
  if (ctx.testing()) {
    ++testing_hops_;
    return;
  }
  ++production_hops_;
  samples_[hop.deploy].push_back(
      {ctx.entry_tick(), static_cast<float>(hop.latency_ms),
       hop.outcome == mesh::Outcome::kError});
}

void MetricsRecorder::OnRequest(const mesh::RequestContext& ctx,
                                mesh::Outcome outcome) {
  if (ctx.testing()) return;
  std::lock_guard<std::mutex> lock(mu_);
  TickStats& s = requests_[ctx.entry_tick()];
  s.tick = ctx.entry_tick();
  ++s.requests;
  if (outcome == mesh::Outcome::kError) ++s.errors;
}

MetricsWindow MetricsRecorder::Window(const DeployId& deploy, Tick from,
                                      Tick to) const {
  MetricsWindow w;
  w.deploy = deploy;
  w.from = from;
  w.to = to;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = samples_.find(deploy);
  if (it == samples_.end()) return w;
  for (const Sample& s : it->second) {
    if (s.tick < from || s.tick >= to) continue;
    ++w.n;
    if (s.error) ++w.errors;
    w.latency.Add(s.latency_ms);
  }
  return w;
}

std::map<DeployId, MetricsWindow> MetricsRecorder::Windows(Tick from,
                                                           Tick to) const {
  std::vector<DeployId> deploys;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [id, samples] : samples_) deploys.push_back(id);
  }
  std::map<DeployId, MetricsWindow> out;
  for (const auto& id : deploys) {
    MetricsWindow w = Window(id, from, to);
    if (w.n > 0) out.emplace(id, std::move(w));
  }
  return out;
}

std::vector<TickStats> MetricsRecorder::ProductionSeries(Tick from,
                                                         Tick to) const {
  std::vector<TickStats> out;
  if (to <= from) return out;
  out.reserve(static_cast<std::size_t>(to - from));
  std::lock_guard<std::mutex> lock(mu_);
  auto it = requests_.lower_bound(from);
  for (Tick t = from; t < to; ++t) {
    if (it != requests_.end() && it->first == t) {
      out.push_back(it->second);
      ++it;
    } else {
      out.push_back({t, 0, 0});
    }
  }
  return out;
}

std::uint64_t MetricsRecorder::testing_hops() const {
  std::lock_guard<std::mutex> lock(mu_);
  return testing_hops_;
}

std::uint64_t MetricsRecorder::production_hops() const {
  std::lock_guard<std::mutex> lock(mu_);
  return production_hops_;
}

}  // namespace cnd::harness
