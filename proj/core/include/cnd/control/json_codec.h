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

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "cnd/common/json_fields.h"
#include "cnd/harness/metrics.h"
#include "cnd/harness/suite.h"
#include "cnd/harness/traffic.h"
#include "cnd/lifecycle/audit.h"
#include "cnd/lifecycle/canary.h"
#include "cnd/lifecycle/deploy.h"
#include "cnd/lifecycle/error_budget.h"
#include "cnd/mesh/behavior.h"
#include "cnd/mesh/traffic_rule.h"
#include "cnd/staging/schema.h"
#include "cnd/staging/store.h"

// JSON codecs shared by the scenario loader, the API and the CLI. Decoders
// report errors as ValidationError prefixed with the offending field path.
namespace cnd::control {

using json_fields::Json;

absl::StatusOr<mesh::VersionBehavior> BehaviorFromJson(
    const Json& j, const std::string& path);
Json ToJson(const mesh::VersionBehavior& b);

absl::StatusOr<staging::TableSchema> TableSchemaFromJson(
    const Json& j, const std::string& path);
Json ToJson(const staging::TableSchema& s);

absl::StatusOr<staging::Row> RowFromJson(const staging::TableSchema& schema,
                                         const Json& j,
                                         const std::string& path);
Json ToJson(const staging::Row& row);

absl::StatusOr<staging::ClonePolicy> ClonePolicyFromJson(
    const Json& j, const std::string& path);
absl::StatusOr<lifecycle::CanaryPolicy> CanaryPolicyFromJson(
    const Json& j, const std::string& path);
absl::StatusOr<lifecycle::ShiftSchedule> ShiftScheduleFromJson(
    const Json& j, const std::string& path);
absl::StatusOr<harness::TrafficProfile> TrafficProfileFromJson(
    const Json& j, const std::string& path);
Json ToJson(const harness::TrafficProfile& p);

Json ToJson(const lifecycle::DeployRecord& r);
Json ToJson(const mesh::TrafficRule& rule);
Json ToJson(const staging::CloneReport& report);
Json ToJson(const harness::MetricsWindow& w);
Json ToJson(const lifecycle::CanaryVerdict& v);
Json ToJson(const lifecycle::ErrorBudget& b);
Json ToJson(const lifecycle::AuditEntry& e);
Json ToJson(const harness::SuiteRun& run);
Json ToJson(const harness::TrafficResult& result);

// {"error": <kind>, "message": ...}
Json ErrorJson(const absl::Status& status);

}  // namespace cnd::control
