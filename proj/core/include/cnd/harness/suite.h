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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/harness/binding.h"
#include "cnd/harness/events.h"
#include "cnd/mesh/executor.h"
#include "cnd/staging/store.h"

namespace cnd::harness {

// Setup creates dynamic test data by copying a fake-labelled static row.
struct SetupStep {
  std::string copy_fake_from;
};

struct RowExpectation {
  std::string table;
  // Index into the ids created by setup.
  std::size_t setup_index = 0;
  staging::Realm realm = staging::Realm::kStaging;
  bool exists = true;
};

struct StepExpectation {
  std::optional<mesh::Outcome> status;
  // Markers must match the routing oracle: the override's marker where one
  // applies, otherwise the marker of a deploy carrying production weight.
  bool routed_markers = false;
  std::map<ComponentId, std::string> markers;
  // Every hop that touched a store used this realm.
  std::optional<staging::Realm> store_realm;
  std::vector<RowExpectation> rows;
};

struct TestStep {
  enum class Kind { kRequest, kPublish, kConsume };
  Kind kind = Kind::kRequest;
  mesh::EntryRoute entry;
  std::string topic;
  std::string payload;
  StepExpectation expect;
};

struct TestCase {
  std::string id;
  std::vector<SetupStep> setup;
  std::vector<TestStep> steps;
};

struct Suite {
  std::string id;
  std::vector<TestCase> tests;
};

absl::StatusOr<Suite> ParseSuite(std::string_view json_text);
absl::StatusOr<Suite> LoadSuiteFile(const std::filesystem::path& path);

struct TestResult {
  std::string test_id;
  bool passed = false;
  std::vector<std::string> failures;
};

struct SuiteRun {
  std::string suite_id;
  Tick started_tick = 0;
  std::vector<TestResult> results;
  int pass_count = 0;
  int fail_count = 0;
  // Production-store writes made by this run's requests.
  std::uint64_t production_write_delta = 0;
  std::map<ComponentId, DeployId> overrides;

  bool AllPassed() const { return fail_count == 0 && pass_count > 0; }
};

struct SuiteOptions {
  // Bounded worker pool; tests run concurrently.
  int workers = 8;
  std::uint64_t seed = 1;
  // Randomizes the order tests are handed to workers.
  std::optional<std::uint64_t> shuffle_seed;
};

// Runs every test with a signed staging annotation carrying `overrides`.
absl::StatusOr<SuiteRun> RunIntegrationSuite(
    const Suite& suite, const std::map<ComponentId, DeployId>& overrides,
    MeshBinding& mesh, EventBus* bus, const SuiteOptions& options = {});

// Runs a suite against the production releases with the staging store on a
// fixed cadence. Failing runs increment the alert counter.
class SyntheticProber {
 public:
  SyntheticProber(const Suite* suite, Tick cadence_ticks, EventBus* bus,
                  SuiteOptions options = {})
      : suite_(suite), cadence_(cadence_ticks), bus_(bus), options_(options) {}

  // Runs a probe if one is due at the clock's current tick.
  absl::StatusOr<std::optional<SuiteRun>> Poll(MeshBinding& mesh);

  const std::vector<SuiteRun>& runs() const { return runs_; }
  std::uint64_t alerts() const { return alerts_; }

 private:
  const Suite* suite_;
  Tick cadence_;
  EventBus* bus_;
  SuiteOptions options_;
  std::optional<Tick> next_due_;
  std::vector<SuiteRun> runs_;
  std::uint64_t alerts_ = 0;
};

// Drives the clock forward `ticks` ticks, probing on cadence.
absl::StatusOr<std::vector<SuiteRun>> RunSyntheticProbes(
    const Suite& suite, Tick cadence_ticks, Tick ticks, MeshBinding& mesh,
    EventBus* bus, const SuiteOptions& options = {});

}  // namespace cnd::harness
