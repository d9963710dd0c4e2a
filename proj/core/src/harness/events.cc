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

#include "cnd/harness/events.h"

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::harness {

absl::Status EventBus::RegisterTopic(const std::string& topic,
                                     const ComponentId& consumer) {
  if (!IsValidToken(topic)) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("topic '", topic, "' is not a token"));
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (!consumers_.emplace(topic, consumer).second) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("topic ", topic, " already registered"));
  }
  queues_[topic];
  return absl::OkStatus();
}

absl::StatusOr<std::string> EventBus::Publish(const std::string& topic,
                                              std::string payload,
                                              const mesh::RequestContext& ctx) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = queues_.find(topic);
  if (it == queues_.end()) {
    return MakeError(ErrorKind::kUnknownTopic,
                     absl::StrCat("unknown topic ", topic));
  }
  EventEnvelope env;
  env.topic = topic;
  env.payload = std::move(payload);
  env.annotation = ctx.annotation();
  env.trace_id = ctx.trace_id();
  env.event_id = absl::StrCat(topic, "#", next_event_++);
  env.published_at = ctx.entry_tick();
  std::string id = env.event_id;
  it->second.push_back(std::move(env));
  return id;
}

absl::StatusOr<std::size_t> EventBus::Consume(const std::string& topic,
                                              const ComponentId& consumer,
                                              MeshBinding& mesh, Rng& rng) {
  std::size_t batch = 0;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = consumers_.find(topic);
    if (it == consumers_.end()) {
      return MakeError(ErrorKind::kUnknownTopic,
                       absl::StrCat("unknown topic ", topic));
    }
    if (it->second != consumer) {
      return MakeError(ErrorKind::kValidationError,
                       absl::StrCat(consumer, " does not consume ", topic));
    }
    batch = queues_[topic].size();
  }
  auto first = mesh.routing->Current();
  const mesh::ComponentSpec* spec = first->topology->Find(consumer);
  if (spec == nullptr ||
      spec->kind != mesh::ComponentKind::kNearlineConsumer) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat(consumer, " is not a nearline consumer"));
  }

  std::size_t processed = 0;
  for (std::size_t i = 0; i < batch; ++i) {
    EventEnvelope env;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto& q = queues_[topic];
      if (q.empty()) break;
      env = std::move(q.front());
      q.pop_front();
    }
    // The envelope's annotation was verified at ingress; it is trusted here
    // and replaces whatever context the consumer would otherwise use.
    auto ctx = mesh::RequestContext::FromAnnotation(
        absl::StrCat(env.trace_id, "/", env.event_id), env.annotation,
        mesh.clock->Now());
    auto snapshot = mesh.routing->Current();
    auto exec = mesh::ExecuteRequest({consumer, absl::StrCat("/", topic)}, ctx,
                                     *snapshot, *mesh.store, rng,
                                     mesh.metrics);
    ConsumeRecord record;
    record.event_id = env.event_id;
    if (!exec.ok()) {
      // Unroutable: dead-lettered with an error record.
      record.outcome = mesh::Outcome::kError;
    } else {
      const mesh::Hop& hop = exec->trace.hops.front();
      record.deploy = hop.deploy;
      record.store = hop.store;
      record.outcome = exec->response.status;
      record.marker = exec->response.markers.front().marker;
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (exec.ok() && record.outcome == mesh::Outcome::kError) {
      queues_[topic].push_back(std::move(env));
      continue;
    }
    if (record.outcome == mesh::Outcome::kOk) ++processed;
    processed_order_.push_back(record.event_id);
    processed_[record.event_id] = std::move(record);
  }
  return processed;
}

std::size_t EventBus::Pending(const std::string& topic) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = queues_.find(topic);
  return it == queues_.end() ? 0 : it->second.size();
}

std::optional<ConsumeRecord> EventBus::Processed(
    const std::string& event_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = processed_.find(event_id);
  if (it == processed_.end()) return std::nullopt;
  return it->second;
}

std::vector<ConsumeRecord> EventBus::ProcessedRecords() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<ConsumeRecord> out;
  out.reserve(processed_order_.size());
  for (const auto& id : processed_order_) out.push_back(processed_.at(id));
  return out;
}

std::optional<ComponentId> EventBus::ConsumerOf(
    const std::string& topic) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = consumers_.find(topic);
  if (it == consumers_.end()) return std::nullopt;
  return it->second;
}

}  // namespace cnd::harness
