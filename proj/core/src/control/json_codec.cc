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

#include "cnd/control/json_codec.h"

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::control {

using json_fields::Field;
using json_fields::Get;
using json_fields::GetArray;
using json_fields::Index;
using json_fields::Invalid;

namespace {

absl::Status Wrap(const absl::Status& s, const std::string& path) {
  if (s.ok()) return s;
  return Invalid(path, std::string(s.message()));
}

absl::Status CheckObject(const Json& j, const std::string& path) {
  return j.is_object() ? absl::OkStatus() : Invalid(path, "expected an object");
}

}  // namespace

absl::StatusOr<mesh::VersionBehavior> BehaviorFromJson(
    const Json& j, const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  mesh::VersionBehavior b;
  CND_RETURN_IF_ERROR(Get(j, "latency_mean_ms", path, b.latency_mean_ms, false));
  CND_RETURN_IF_ERROR(
      Get(j, "latency_jitter_ms", path, b.latency_jitter_ms, false));
  CND_RETURN_IF_ERROR(Get(j, "error_prob", path, b.error_prob, false));
  CND_RETURN_IF_ERROR(Get(j, "marker", path, b.marker, false));
  CND_RETURN_IF_ERROR(Get(j, "fault_paths", path, b.fault_paths, false));
  CND_RETURN_IF_ERROR(Wrap(b.Validate(), path));
  return b;
}

Json ToJson(const mesh::VersionBehavior& b) {
  Json j = {{"latency_mean_ms", b.latency_mean_ms},
            {"latency_jitter_ms", b.latency_jitter_ms},
            {"error_prob", b.error_prob},
            {"marker", b.marker}};
  if (!b.fault_paths.empty()) j["fault_paths"] = b.fault_paths;
  return j;
}

absl::StatusOr<staging::TableSchema> TableSchemaFromJson(
    const Json& j, const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  staging::TableSchema s;
  CND_RETURN_IF_ERROR(Get(j, "name", path, s.name));
  CND_RETURN_IF_ERROR(Get(j, "id_column", path, s.id_column, false));
  CND_RETURN_IF_ERROR(Get(j, "auto_increment", path, s.auto_increment, false));
  std::string fake, owner;
  CND_RETURN_IF_ERROR(Get(j, "fake_label_column", path, fake, false));
  CND_RETURN_IF_ERROR(Get(j, "owning_service", path, owner, false));
  if (!fake.empty()) s.fake_label_column = fake;
  if (!owner.empty()) s.owning_service = owner;
  const Json* cols = nullptr;
  CND_RETURN_IF_ERROR(GetArray(j, "columns", path, cols));
  for (std::size_t i = 0; i < cols->size(); ++i) {
    const std::string cp = Index(Field(path, "columns"), i);
    staging::Column c;
    std::string type = "string", tag = "none";
    CND_RETURN_IF_ERROR(Get((*cols)[i], "name", cp, c.name));
    CND_RETURN_IF_ERROR(Get((*cols)[i], "type", cp, type, false));
    CND_RETURN_IF_ERROR(Get((*cols)[i], "tag", cp, tag, false));
    auto t = staging::ParseColumnType(type);
    if (!t) return Invalid(Field(cp, "type"), absl::StrCat("unknown type '", type, "'"));
    auto g = staging::ParseDataTag(tag);
    if (!g) return Invalid(Field(cp, "tag"), absl::StrCat("unknown tag '", tag, "'"));
    c.type = *t;
    c.tag = *g;
    s.columns.push_back(std::move(c));
  }
  CND_RETURN_IF_ERROR(Wrap(s.Validate(), path));
  return s;
}

Json ToJson(const staging::TableSchema& s) {
  Json cols = Json::array();
  for (const auto& c : s.columns) {
    cols.push_back({{"name", c.name},
                    {"type", staging::ColumnTypeName(c.type)},
                    {"tag", staging::DataTagName(c.tag)}});
  }
  Json j = {{"name", s.name}, {"id_column", s.id_column},
            {"auto_increment", s.auto_increment}, {"columns", cols}};
  if (s.fake_label_column) j["fake_label_column"] = *s.fake_label_column;
  if (s.owning_service) j["owning_service"] = *s.owning_service;
  return j;
}

absl::StatusOr<staging::Row> RowFromJson(const staging::TableSchema& schema,
                                         const Json& j,
                                         const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  staging::Row row;
  for (const auto& [name, v] : j.items()) {
    const std::string fp = Field(path, name);
    const staging::Column* col = schema.Find(name);
    if (col == nullptr) return Invalid(fp, "unknown column");
    if (v.is_null()) {
      row[name] = std::monostate{};
      continue;
    }
    switch (col->type) {
      case staging::ColumnType::kInt:
        if (!v.is_number_integer()) return Invalid(fp, "expected an integer");
        row[name] = v.get<std::int64_t>();
        break;
      case staging::ColumnType::kBool:
        if (!v.is_boolean()) return Invalid(fp, "expected a boolean");
        row[name] = v.get<bool>();
        break;
      case staging::ColumnType::kString:
      case staging::ColumnType::kBlob:
        if (!v.is_string()) return Invalid(fp, "expected a string");
        row[name] = v.get<std::string>();
        break;
    }
  }
  CND_RETURN_IF_ERROR(Wrap(schema.ValidateRow(row), path));
  return row;
}

Json ToJson(const staging::Row& row) {
  Json j = Json::object();
  for (const auto& [name, v] : row) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      j[name] = *i;
    } else if (const auto* b = std::get_if<bool>(&v)) {
      j[name] = *b;
    } else if (const auto* s = std::get_if<std::string>(&v)) {
      j[name] = *s;
    } else {
      j[name] = nullptr;
    }
  }
  return j;
}

absl::StatusOr<staging::ClonePolicy> ClonePolicyFromJson(
    const Json& j, const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  staging::ClonePolicy p;
  CND_RETURN_IF_ERROR(Get(j, "cadence_ticks", path, p.cadence_ticks, false));
  CND_RETURN_IF_ERROR(Get(j, "offset_gap", path, p.offset_gap, false));
  CND_RETURN_IF_ERROR(
      Get(j, "daily_jitter_range", path, p.daily_jitter_range, false));
  CND_RETURN_IF_ERROR(Get(j, "include_tables", path, p.include_tables, false));
  CND_RETURN_IF_ERROR(Get(j, "exclude_tables", path, p.exclude_tables, false));
  if (auto it = j.find("transforms"); it != j.end()) {
    const std::string tp = Field(path, "transforms");
    CND_RETURN_IF_ERROR(CheckObject(*it, tp));
    for (const auto& [tag, action] : it->items()) {
      auto t = staging::ParseDataTag(tag);
      if (!t) return Invalid(Field(tp, tag), "unknown tag");
      auto a = action.is_string()
                   ? staging::ParseTransformAction(action.get<std::string>())
                   : std::nullopt;
      if (!a) return Invalid(Field(tp, tag), "expected erase, randomize or keep");
      p.transforms[*t] = *a;
    }
  }
  CND_RETURN_IF_ERROR(Wrap(p.Validate(), path));
  return p;
}

absl::StatusOr<lifecycle::CanaryPolicy> CanaryPolicyFromJson(
    const Json& j, const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  lifecycle::CanaryPolicy p;
  CND_RETURN_IF_ERROR(
      Get(j, "allowed_percents", path, p.allowed_percents, false));
  CND_RETURN_IF_ERROR(Get(j, "initial_percent", path, p.initial_percent, false));
  CND_RETURN_IF_ERROR(Get(j, "min_samples", path, p.min_samples, false));
  CND_RETURN_IF_ERROR(Get(j, "error_delta_abs", path, p.error_delta_abs, false));
  CND_RETURN_IF_ERROR(
      Get(j, "latency_quantile", path, p.latency_quantile, false));
  CND_RETURN_IF_ERROR(
      Get(j, "latency_delta_rel", path, p.latency_delta_rel, false));
  CND_RETURN_IF_ERROR(Get(j, "significance", path, p.significance, false));
  CND_RETURN_IF_ERROR(Wrap(p.Validate(), path));
  return p;
}

absl::StatusOr<lifecycle::ShiftSchedule> ShiftScheduleFromJson(
    const Json& j, const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  lifecycle::ShiftSchedule s;
  CND_RETURN_IF_ERROR(Get(j, "steps", path, s.steps, false));
  CND_RETURN_IF_ERROR(Get(j, "hold_ticks", path, s.hold_ticks, false));
  CND_RETURN_IF_ERROR(Wrap(s.Validate(), path));
  return s;
}

absl::StatusOr<harness::TrafficProfile> TrafficProfileFromJson(
    const Json& j, const std::string& path) {
  CND_RETURN_IF_ERROR(CheckObject(j, path));
  harness::TrafficProfile p;
  CND_RETURN_IF_ERROR(Get(j, "rate", path, p.rate, false));
  CND_RETURN_IF_ERROR(Get(j, "duration_ticks", path, p.duration_ticks, false));
  CND_RETURN_IF_ERROR(Get(j, "seed", path, p.seed, false));
  const Json* mix = nullptr;
  CND_RETURN_IF_ERROR(GetArray(j, "mix", path, mix, false));
  if (mix != nullptr) {
    for (std::size_t i = 0; i < mix->size(); ++i) {
      const std::string mp = Index(Field(path, "mix"), i);
      harness::WeightedRoute r;
      CND_RETURN_IF_ERROR(Get((*mix)[i], "entry", mp, r.route.component));
      CND_RETURN_IF_ERROR(Get((*mix)[i], "path", mp, r.route.path, false));
      CND_RETURN_IF_ERROR(Get((*mix)[i], "weight", mp, r.weight, false));
      p.mix.push_back(std::move(r));
    }
  }
  CND_RETURN_IF_ERROR(Wrap(p.Validate(), path));
  return p;
}

Json ToJson(const harness::TrafficProfile& p) {
  Json mix = Json::array();
  for (const auto& r : p.mix) {
    mix.push_back({{"entry", r.route.component},
                   {"path", r.route.path},
                   {"weight", r.weight}});
  }
  return {{"rate", p.rate},
          {"duration_ticks", p.duration_ticks},
          {"seed", p.seed},
          {"mix", mix}};
}

Json ToJson(const lifecycle::DeployRecord& r) {
  Json j = {{"id", r.id},
            {"component", r.component},
            {"version", r.version},
            {"branch", r.branch},
            {"commit", r.commit},
            {"state", DeployStateName(r.state)},
            {"weight", r.weight},
            {"created_at", r.created_at},
            {"test_status", lifecycle::TestStatusName(r.test_status)},
            {"behavior", ToJson(r.behavior)}};
  if (r.retire_at) j["retire_at"] = *r.retire_at;
  return j;
}

Json ToJson(const mesh::TrafficRule& rule) {
  Json entries = Json::array();
  for (const auto& e : rule.entries) {
    entries.push_back({{"deploy", e.deploy}, {"weight", e.weight}});
  }
  return {{"component", rule.component},
          {"version", rule.version},
          {"entries", entries}};
}

Json ToJson(const staging::CloneReport& report) {
  Json tables = Json::array();
  for (const auto& t : report.tables) {
    Json transformed = Json::object();
    for (const auto& [tag, n] : t.transformed) {
      transformed[staging::DataTagName(tag)] = n;
    }
    tables.push_back({{"table", t.table},
                      {"rows", t.rows},
                      {"production_max_id", t.production_max_id},
                      {"jitter", t.jitter},
                      {"offset", t.offset},
                      {"transformed", transformed}});
  }
  return {{"date", report.date},
          {"cloned_at", report.cloned_at},
          {"tables", tables},
          {"excluded", report.excluded}};
}

Json ToJson(const harness::MetricsWindow& w) {
  return {{"deploy", w.deploy},
          {"from", w.from},
          {"to", w.to},
          {"n", w.n},
          {"errors", w.errors},
          {"error_rate", w.ErrorRate()},
          {"latency_p50_ms", w.latency.Quantile(0.5)},
          {"latency_p99_ms", w.latency.Quantile(0.99)}};
}

namespace {
Json ToJson(const lifecycle::WindowStats& s) {
  return {{"n", s.n},
          {"errors", s.errors},
          {"error_rate", s.error_rate},
          {"latency_quantile_ms", s.latency_quantile_ms}};
}
}  // namespace

Json ToJson(const lifecycle::CanaryVerdict& v) {
  Json reasons = Json::array();
  for (auto r : v.reasons) reasons.push_back(lifecycle::VerdictReasonName(r));
  return {{"pass", v.pass},
          {"reasons", reasons},
          {"z", v.z},
          {"canary", ToJson(v.canary)},
          {"baseline", ToJson(v.baseline)}};
}

Json ToJson(const lifecycle::ErrorBudget& b) {
  return {{"slo", b.slo.target()},
          {"window_ticks", b.slo.window_ticks},
          {"allowed_error_ticks", b.allowed_error_ticks()},
          {"allowed_error_minutes", b.allowed_error_minutes()},
          {"consumed_ticks", b.consumed_ticks},
          {"depleted", b.depleted}};
}

Json ToJson(const lifecycle::AuditEntry& e) {
  return {{"tick", e.tick},         {"actor", e.actor},
          {"action", e.action},     {"component", e.component},
          {"deploy", e.deploy},     {"commit", e.commit},
          {"detail", e.detail}};
}

Json ToJson(const harness::SuiteRun& run) {
  Json results = Json::array();
  for (const auto& r : run.results) {
    results.push_back(
        {{"test", r.test_id}, {"passed", r.passed}, {"failures", r.failures}});
  }
  return {{"suite", run.suite_id},
          {"started_tick", run.started_tick},
          {"pass_count", run.pass_count},
          {"fail_count", run.fail_count},
          {"production_write_delta", run.production_write_delta},
          {"overrides", run.overrides},
          {"results", results}};
}

Json ToJson(const harness::TrafficResult& result) {
  Json windows = Json::array();
  for (const auto& [id, w] : result.windows) windows.push_back(ToJson(w));
  return {{"from", result.from},
          {"to", result.to},
          {"requests", result.requests},
          {"errors", result.errors},
          {"rejected", result.rejected},
          {"windows", windows}};
}

Json ErrorJson(const absl::Status& status) {
  auto kind = ErrorKindOf(status);
  return {{"error", kind ? ErrorKindName(*kind)
                         : std::string(absl::StatusCodeToString(status.code()))},
          {"message", std::string(status.message())}};
}

}  // namespace cnd::control
