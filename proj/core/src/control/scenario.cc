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

#include "cnd/control/scenario.h"

#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"
#include "cnd/control/json_codec.h"

namespace cnd::control {

using json_fields::Field;
using json_fields::Get;
using json_fields::GetArray;
using json_fields::Index;
using json_fields::Invalid;

namespace {

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("cannot read ", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::Status ParseComponents(const Json& doc, ScenarioConfig& out) {
  const Json* comps = nullptr;
  CND_RETURN_IF_ERROR(GetArray(doc, "components", "", comps));
  std::set<DeployId> deploy_ids;
  for (std::size_t i = 0; i < comps->size(); ++i) {
    const std::string cp = Index("components", i);
    const Json& c = (*comps)[i];
    ComponentConfig cc;
    std::string kind;
    CND_RETURN_IF_ERROR(Get(c, "id", cp, cc.spec.id));
    CND_RETURN_IF_ERROR(Get(c, "kind", cp, kind));
    auto k = mesh::ParseComponentKind(kind);
    if (!k) {
      return Invalid(Field(cp, "kind"),
                     absl::StrCat("unknown component kind '", kind, "'"));
    }
    cc.spec.kind = *k;
    CND_RETURN_IF_ERROR(Get(c, "downstream", cp, cc.spec.downstream, false));
    CND_RETURN_IF_ERROR(Get(c, "tables", cp, cc.spec.tables, false));
    CND_RETURN_IF_ERROR(Get(c, "writes", cp, cc.spec.writes, false));

    const Json* deploys = nullptr;
    CND_RETURN_IF_ERROR(GetArray(c, "deploys", cp, deploys));
    int released = 0;
    for (std::size_t d = 0; d < deploys->size(); ++d) {
      const std::string dp = Index(Field(cp, "deploys"), d);
      const Json& dj = (*deploys)[d];
      InitialDeploy dep;
      std::string state = "released";
      CND_RETURN_IF_ERROR(Get(dj, "id", dp, dep.id));
      CND_RETURN_IF_ERROR(Get(dj, "version", dp, dep.spec.version));
      CND_RETURN_IF_ERROR(Get(dj, "branch", dp, dep.spec.branch, false));
      CND_RETURN_IF_ERROR(Get(dj, "commit", dp, dep.spec.commit, false));
      CND_RETURN_IF_ERROR(Get(dj, "state", dp, state, false));
      if (dep.spec.branch.empty()) dep.spec.branch = lifecycle::kMainBranch;
      if (!IsValidToken(dep.id)) {
        return Invalid(Field(dp, "id"), "deploy ids must be tokens");
      }
      if (!deploy_ids.insert(dep.id).second) {
        return Invalid(Field(dp, "id"), "duplicate deploy id");
      }
      if (state != "released") {
        return Invalid(Field(dp, "state"),
                       "initial deploys must be in state released");
      }
      if (dep.spec.branch != lifecycle::kMainBranch) {
        return Invalid(Field(dp, "branch"),
                       "released deploys must come from main");
      }
      if (auto it = dj.find("behavior"); it != dj.end()) {
        CND_ASSIGN_OR_RETURN(dep.spec.behavior,
                             BehaviorFromJson(*it, Field(dp, "behavior")));
      }
      if (dep.spec.behavior.marker.empty()) {
        dep.spec.behavior.marker = dep.spec.version;
      }
      dep.spec.component = cc.spec.id;
      cc.release = std::move(dep);
      ++released;
    }
    if (released != 1) {
      return Invalid(Field(cp, "deploys"),
                     absl::StrCat("exactly one released deploy required, got ",
                                  released));
    }
    if (auto it = c.find("versions"); it != c.end()) {
      const std::string vp = Field(cp, "versions");
      if (!it->is_object()) return Invalid(vp, "expected an object");
      for (const auto& [version, bj] : it->items()) {
        CND_ASSIGN_OR_RETURN(mesh::VersionBehavior b,
                             BehaviorFromJson(bj, Field(vp, version)));
        if (b.marker.empty()) b.marker = version;
        cc.versions[version] = std::move(b);
      }
    }
    out.components.push_back(std::move(cc));
  }
  return absl::OkStatus();
}

absl::Status ParseTables(const Json& doc, ScenarioConfig& out) {
  const Json* tables = nullptr;
  CND_RETURN_IF_ERROR(GetArray(doc, "tables", "", tables, false));
  if (tables != nullptr) {
    for (std::size_t i = 0; i < tables->size(); ++i) {
      CND_ASSIGN_OR_RETURN(staging::TableSchema s,
                           TableSchemaFromJson((*tables)[i], Index("tables", i)));
      out.tables.push_back(std::move(s));
    }
  }
  if (auto s = staging::StagingAwareStore::ValidateSchemas(out.tables);
      !s.ok()) {
    return Invalid("tables", std::string(s.message()));
  }
  auto rows = [&](const char* key,
                  std::map<std::string, std::vector<staging::Row>>& dst,
                  bool need_fake) -> absl::Status {
    auto it = doc.find(key);
    if (it == doc.end()) return absl::OkStatus();
    if (!it->is_object()) return Invalid(key, "expected an object");
    for (const auto& [table, list] : it->items()) {
      const std::string tp = Field(key, table);
      const staging::TableSchema* schema = nullptr;
      for (const auto& s : out.tables) {
        if (s.name == table) schema = &s;
      }
      if (schema == nullptr) return Invalid(tp, "unknown table");
      if (need_fake && !schema->fake_label_column) {
        return Invalid(tp, "table has no fake label column");
      }
      if (!list.is_array()) return Invalid(tp, "expected an array");
      for (std::size_t r = 0; r < list.size(); ++r) {
        CND_ASSIGN_OR_RETURN(staging::Row row,
                             RowFromJson(*schema, list[r], Index(tp, r)));
        dst[table].push_back(std::move(row));
      }
    }
    return absl::OkStatus();
  };
  CND_RETURN_IF_ERROR(rows("seed_data", out.seed_data, false));
  CND_RETURN_IF_ERROR(rows("static_test_data", out.static_test_data, true));
  return absl::OkStatus();
}

absl::Status ParsePolicies(const Json& doc, ScenarioConfig& out) {
  if (auto it = doc.find("clone_policy"); it != doc.end()) {
    CND_ASSIGN_OR_RETURN(out.clone_policy,
                         ClonePolicyFromJson(*it, "clone_policy"));
  }
  for (const auto& t : out.clone_policy.include_tables) {
    bool found = false;
    for (const auto& s : out.tables) found |= s.name == t;
    if (!found) return Invalid("clone_policy.include_tables", "unknown table " + t);
  }
  if (auto it = doc.find("canary_policy"); it != doc.end()) {
    CND_ASSIGN_OR_RETURN(out.lifecycle.canary,
                         CanaryPolicyFromJson(*it, "canary_policy"));
  }
  if (auto it = doc.find("shift_schedule"); it != doc.end()) {
    CND_ASSIGN_OR_RETURN(out.lifecycle.shift,
                         ShiftScheduleFromJson(*it, "shift_schedule"));
  }
  CND_RETURN_IF_ERROR(Get(doc, "retention_ticks", "",
                          out.lifecycle.retention_ticks, false));
  Tick ttl = 0;
  CND_RETURN_IF_ERROR(Get(doc, "preproduction_ttl_ticks", "", ttl, false));
  if (ttl > 0) out.lifecycle.preproduction_ttl = ttl;
  CND_RETURN_IF_ERROR(
      Get(doc, "high_risk", "", out.lifecycle.high_risk, false));
  CND_RETURN_IF_ERROR(Get(doc, "auto_abort", "",
                          out.lifecycle.auto_abort_on_regression, false));
  if (auto s = out.lifecycle.Validate(); !s.ok()) {
    return Invalid("lifecycle", std::string(s.message()));
  }
  if (auto it = doc.find("slo"); it != doc.end()) {
    double target = 0.9995;
    Tick window = 30 * kTicksPerDay;
    CND_RETURN_IF_ERROR(Get(*it, "target", "slo", target, false));
    CND_RETURN_IF_ERROR(Get(*it, "window_ticks", "slo", window, false));
    auto slo = lifecycle::Slo::FromFraction(target, window);
    if (!slo.ok()) return Invalid("slo", std::string(slo.status().message()));
    out.slo = *slo;
  }
  return absl::OkStatus();
}

absl::Status ParseHarness(const Json& doc, const std::filesystem::path& base,
                          ScenarioConfig& out) {
  const Json* topics = nullptr;
  CND_RETURN_IF_ERROR(GetArray(doc, "topics", "", topics, false));
  if (topics != nullptr) {
    for (std::size_t i = 0; i < topics->size(); ++i) {
      const std::string tp = Index("topics", i);
      TopicConfig t;
      CND_RETURN_IF_ERROR(Get((*topics)[i], "name", tp, t.name));
      CND_RETURN_IF_ERROR(Get((*topics)[i], "consumer", tp, t.consumer));
      const mesh::ComponentSpec* c = out.topology->Find(t.consumer);
      if (c == nullptr || c->kind != mesh::ComponentKind::kNearlineConsumer) {
        return Invalid(Field(tp, "consumer"),
                       "must name a nearline-consumer component");
      }
      out.topics.push_back(std::move(t));
    }
  }
  const Json* suites = nullptr;
  CND_RETURN_IF_ERROR(GetArray(doc, "suites", "", suites, false));
  if (suites != nullptr) {
    for (std::size_t i = 0; i < suites->size(); ++i) {
      const std::string sp = Index("suites", i);
      const Json& sj = (*suites)[i];
      absl::StatusOr<harness::Suite> suite;
      if (auto inl = sj.find("inline"); inl != sj.end()) {
        suite = harness::ParseSuite(inl->dump());
      } else {
        std::string file;
        CND_RETURN_IF_ERROR(Get(sj, "file", sp, file));
        suite = harness::LoadSuiteFile(base / file);
      }
      if (!suite.ok()) return Invalid(sp, std::string(suite.status().message()));
      if (out.suites.contains(suite->id)) {
        return Invalid(sp, absl::StrCat("duplicate suite id ", suite->id));
      }
      out.suites[suite->id] = *std::move(suite);
    }
  }
  if (auto it = doc.find("traffic"); it != doc.end()) {
    CND_ASSIGN_OR_RETURN(out.traffic, TrafficProfileFromJson(*it, "traffic"));
  } else {
    out.traffic.mix = {{{out.topology->gateway(), "/"}, 1}};
  }
  out.traffic.seed = out.seed;
  for (std::size_t i = 0; i < out.traffic.mix.size(); ++i) {
    const mesh::ComponentSpec* c =
        out.topology->Find(out.traffic.mix[i].route.component);
    if (c == nullptr || (c->kind != mesh::ComponentKind::kGateway &&
                         c->kind != mesh::ComponentKind::kFrontendBundle)) {
      return Invalid(Field(Index("traffic.mix", i), "entry"),
                     "must be the gateway or a frontend bundle");
    }
  }
  if (auto it = doc.find("pipeline"); it != doc.end()) {
    auto& p = out.pipeline;
    int percent = 0;
    CND_RETURN_IF_ERROR(Get(*it, "suite", "pipeline", p.suite, false));
    CND_RETURN_IF_ERROR(Get(*it, "canary_percent", "pipeline", percent, false));
    CND_RETURN_IF_ERROR(
        Get(*it, "observe_ticks", "pipeline", p.observe_ticks, false));
    CND_RETURN_IF_ERROR(
        Get(*it, "max_observe_ticks", "pipeline", p.max_observe_ticks, false));
    CND_RETURN_IF_ERROR(
        Get(*it, "verify_ticks", "pipeline", p.verify_ticks, false));
    if (percent != 0) p.canary_percent = percent;
    if (p.observe_ticks <= 0 || p.max_observe_ticks < p.observe_ticks ||
        p.verify_ticks <= 0) {
      return Invalid("pipeline", "observation windows must be positive");
    }
  }
  if (!out.suites.empty() && !out.suites.contains(out.pipeline.suite)) {
    return Invalid("pipeline.suite",
                   absl::StrCat("unknown suite ", out.pipeline.suite));
  }
  if (auto it = doc.find("probe"); it != doc.end()) {
    CND_RETURN_IF_ERROR(Get(*it, "suite", "probe", out.probe.suite, false));
    CND_RETURN_IF_ERROR(
        Get(*it, "cadence_ticks", "probe", out.probe.cadence_ticks, false));
    if (!out.probe.suite.empty() && !out.suites.contains(out.probe.suite)) {
      return Invalid("probe.suite", "unknown suite " + out.probe.suite);
    }
    if (out.probe.cadence_ticks <= 0) {
      return Invalid("probe.cadence_ticks", "must be > 0");
    }
  }
  CND_RETURN_IF_ERROR(Get(doc, "workers", "", out.workers, false));
  if (out.workers <= 0) return Invalid("workers", "must be > 0");
  return absl::OkStatus();
}

// Suites may only reference things the scenario defines.
absl::Status CheckSuiteReferences(const ScenarioConfig& cfg) {
  std::set<std::string> topics;
  for (const auto& t : cfg.topics) topics.insert(t.name);
  for (const auto& [id, suite] : cfg.suites) {
    const std::string sp = absl::StrCat("suites[", id, "]");
    for (const auto& test : suite.tests) {
      const std::string tp = Field(sp, test.id);
      for (const auto& s : test.setup) {
        const staging::TableSchema* schema = nullptr;
        for (const auto& t : cfg.tables) {
          if (t.name == s.copy_fake_from) schema = &t;
        }
        if (schema == nullptr || !schema->fake_label_column) {
          return Invalid(tp, absl::StrCat("setup copies from ",
                                          s.copy_fake_from,
                                          " which has no fake label"));
        }
      }
      for (const auto& step : test.steps) {
        if (step.kind == harness::TestStep::Kind::kRequest) {
          const mesh::ComponentSpec* c = cfg.topology->Find(step.entry.component);
          if (c == nullptr) {
            return Invalid(tp, absl::StrCat("unknown entry ", step.entry.component));
          }
        } else if (!topics.contains(step.topic)) {
          return Invalid(tp, absl::StrCat("unknown topic ", step.topic));
        }
        for (const auto& [component, marker] : step.expect.markers) {
          if (cfg.topology->Find(component) == nullptr) {
            return Invalid(tp, absl::StrCat("unknown component ", component));
          }
        }
        for (const auto& row : step.expect.rows) {
          if (row.setup_index >= test.setup.size()) {
            return Invalid(tp, "row expectation names a missing setup row");
          }
        }
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

const ComponentConfig* ScenarioConfig::FindComponent(
    const ComponentId& id) const {
  for (const auto& c : components) {
    if (c.spec.id == id) return &c;
  }
  return nullptr;
}

absl::StatusOr<ScenarioConfig> ParseScenario(
    std::string_view json_text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    return Invalid("", absl::StrCat("invalid JSON: ", e.what()));
  }
  if (!doc.is_object()) return Invalid("", "expected an object");
  ScenarioConfig out;
  CND_RETURN_IF_ERROR(Get(doc, "name", "", out.name, false));
  CND_RETURN_IF_ERROR(Get(doc, "seed", "", out.seed, false));
  CND_RETURN_IF_ERROR(Get(doc, "secret", "", out.secret));
  if (out.secret.empty()) return Invalid("secret", "must not be empty");

  CND_RETURN_IF_ERROR(ParseTables(doc, out));
  CND_RETURN_IF_ERROR(ParseComponents(doc, out));
  std::set<std::string> table_names;
  for (const auto& t : out.tables) table_names.insert(t.name);
  std::vector<mesh::ComponentSpec> specs;
  for (const auto& c : out.components) specs.push_back(c.spec);
  auto topology = mesh::Topology::Create(std::move(specs), table_names);
  if (!topology.ok()) {
    return Invalid("components", std::string(topology.status().message()));
  }
  out.topology = std::make_shared<const mesh::Topology>(*std::move(topology));
  for (const auto& t : out.tables) {
    if (t.owning_service && out.topology->Find(*t.owning_service) == nullptr) {
      return Invalid(absl::StrCat("tables[", t.name, "].owning_service"),
                     "unknown component");
    }
  }
  CND_RETURN_IF_ERROR(ParsePolicies(doc, out));
  for (const auto& c : out.lifecycle.high_risk) {
    if (out.topology->Find(c) == nullptr) {
      return Invalid("high_risk", absl::StrCat("unknown component ", c));
    }
  }
  CND_RETURN_IF_ERROR(ParseHarness(doc, base_dir, out));
  CND_RETURN_IF_ERROR(CheckSuiteReferences(out));
  return out;
}

absl::StatusOr<ScenarioConfig> LoadScenario(const std::filesystem::path& path) {
  CND_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseScenario(text, path.parent_path());
}

}  // namespace cnd::control
