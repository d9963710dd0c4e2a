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
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/rng.h"
#include "cnd/harness/binding.h"
#include "cnd/mesh/annotation.h"
#include "cnd/mesh/context.h"
#include "cnd/mesh/executor.h"

namespace cnd::harness {

struct EventEnvelope {
  std::string topic;
  std::string payload;
  // The publisher's verified annotation, carried unchanged to the consumer.
  mesh::RoutingAnnotation annotation;
  std::string trace_id;
  std::string event_id;
  Tick published_at = 0;
};

struct ConsumeRecord {
  std::string event_id;
  DeployId deploy;
  mesh::StoreUse store = mesh::StoreUse::kNone;
  mesh::Outcome outcome = mesh::Outcome::kOk;
  std::string marker;
};

// In-memory near-line queue. Per-topic FIFO; at-least-once: an envelope
// whose processing fails goes back on the queue.
class EventBus {
 public:
  absl::Status RegisterTopic(const std::string& topic,
                             const ComponentId& consumer);

  // Returns the event id.
  absl::StatusOr<std::string> Publish(const std::string& topic,
                                      std::string payload,
                                      const mesh::RequestContext& ctx);

  // Processes the envelopes queued on `topic` when the call starts. Each runs
  // as a request entering at `consumer`, routed and realm-selected by the
  // envelope's annotation. Returns the number processed successfully.
  absl::StatusOr<std::size_t> Consume(const std::string& topic,
                                      const ComponentId& consumer,
                                      MeshBinding& mesh, Rng& rng);

  std::size_t Pending(const std::string& topic) const;
  std::optional<ConsumeRecord> Processed(const std::string& event_id) const;
  std::vector<ConsumeRecord> ProcessedRecords() const;
  std::optional<ComponentId> ConsumerOf(const std::string& topic) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, ComponentId> consumers_;
  std::map<std::string, std::deque<EventEnvelope>> queues_;
  std::map<std::string, ConsumeRecord> processed_;
  std::vector<std::string> processed_order_;
  std::uint64_t next_event_ = 0;
};

}  // namespace cnd::harness
