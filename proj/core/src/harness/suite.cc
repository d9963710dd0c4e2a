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

#include "cnd/harness/suite.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "cnd/common/hash.h"
#include "cnd/common/json_fields.h"
#include "cnd/common/rng.h"
#include "cnd/common/status.h"
#include "cnd/mesh/router.h"

namespace cnd::harness {
namespace {

using json_fields::Field;
using json_fields::Get;
using json_fields::GetArray;
using json_fields::Index;
using json_fields::Invalid;
using json_fields::Json;

constexpr int kConsumeAttempts = 500;

absl::StatusOr<staging::Realm> ParseRealm(const std::string& text,
                                          const std::string& path) {
  if (text == "staging") return staging::Realm::kStaging;
  if (text == "production") return staging::Realm::kProduction;
  return Invalid(path, absl::StrCat("unknown realm '", text, "'"));
}

absl::StatusOr<StepExpectation> ParseExpectation(const Json& obj,
                                                 const std::string& path) {
  StepExpectation out;
  if (!obj.is_object()) return Invalid(path, "expected an object");
  std::string status;
  CND_RETURN_IF_ERROR(Get(obj, "status", path, status, false));
  if (status == "ok") {
    out.status = mesh::Outcome::kOk;
  } else if (status == "error") {
    out.status = mesh::Outcome::kError;
  } else if (!status.empty()) {
    return Invalid(Field(path, "status"), "expected ok or error");
  }
  if (auto it = obj.find("markers"); it != obj.end()) {
    if (it->is_string() && *it == "routed") {
      out.routed_markers = true;
    } else if (it->is_object()) {
      for (const auto& [component, marker] : it->items()) {
        if (!marker.is_string()) {
          return Invalid(Field(Field(path, "markers"), component),
                         "expected a string");
        }
        out.markers[component] = marker.get<std::string>();
      }
    } else {
      return Invalid(Field(path, "markers"),
                     "expected \"routed\" or a component->marker map");
    }
  }
  std::string realm;
  CND_RETURN_IF_ERROR(Get(obj, "store_realm", path, realm, false));
  if (!realm.empty()) {
    CND_ASSIGN_OR_RETURN(out.store_realm,
                         ParseRealm(realm, Field(path, "store_realm")));
  }
  const Json* rows = nullptr;
  CND_RETURN_IF_ERROR(GetArray(obj, "rows", path, rows, false));
  if (rows != nullptr) {
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const std::string rp = Index(Field(path, "rows"), i);
      const Json& r = (*rows)[i];
      RowExpectation e;
      std::string row_realm = "staging";
      CND_RETURN_IF_ERROR(Get(r, "table", rp, e.table));
      CND_RETURN_IF_ERROR(Get(r, "setup", rp, e.setup_index));
      CND_RETURN_IF_ERROR(Get(r, "realm", rp, row_realm, false));
      CND_RETURN_IF_ERROR(Get(r, "exists", rp, e.exists, false));
      CND_ASSIGN_OR_RETURN(e.realm, ParseRealm(row_realm, Field(rp, "realm")));
      out.rows.push_back(std::move(e));
    }
  }
  return out;
}

absl::StatusOr<TestStep> ParseStep(const Json& obj, const std::string& path) {
  TestStep step;
  if (!obj.is_object()) return Invalid(path, "expected an object");
  int kinds = 0;
  if (auto it = obj.find("request"); it != obj.end()) {
    ++kinds;
    step.kind = TestStep::Kind::kRequest;
    const std::string rp = Field(path, "request");
    CND_RETURN_IF_ERROR(Get(*it, "entry", rp, step.entry.component));
    CND_RETURN_IF_ERROR(Get(*it, "path", rp, step.entry.path, false));
  }
  if (auto it = obj.find("publish"); it != obj.end()) {
    ++kinds;
    step.kind = TestStep::Kind::kPublish;
    const std::string pp = Field(path, "publish");
    CND_RETURN_IF_ERROR(Get(*it, "topic", pp, step.topic));
    CND_RETURN_IF_ERROR(Get(*it, "payload", pp, step.payload, false));
  }
  if (auto it = obj.find("consume"); it != obj.end()) {
    ++kinds;
    step.kind = TestStep::Kind::kConsume;
    CND_RETURN_IF_ERROR(Get(*it, "topic", Field(path, "consume"), step.topic));
  }
  if (kinds != 1) {
    return Invalid(path, "exactly one of request, publish, consume required");
  }
  if (auto it = obj.find("expect"); it != obj.end()) {
    CND_ASSIGN_OR_RETURN(step.expect,
                         ParseExpectation(*it, Field(path, "expect")));
  }
  return step;
}

struct TestRunner {
  const TestCase& test;
  const std::map<ComponentId, DeployId>& overrides;
  MeshBinding& mesh;
  EventBus* bus;
  std::uint64_t seed;
  std::atomic<std::uint64_t>& production_writes;

  TestResult result;
  std::vector<std::int64_t> created;
  std::vector<std::string> published;

  void Fail(std::string message) {
    result.failures.push_back(std::move(message));
  }

  mesh::RoutingAnnotation Annotation(std::size_t step) const {
    mesh::RoutingAnnotation a;
    a.overrides = overrides;
    a.staging = true;
    a.issued_at = mesh.clock->Now();
    a.nonce = HashCombine(HashCombine(seed, test.id), step);
    return a;
  }

  // Full ingress path: sign, serialize, parse, verify.
  absl::StatusOr<mesh::RequestContext> Ingress(
      std::size_t step, const mesh::MeshSnapshot& snapshot) const {
    const std::string wire =
        mesh::SignAnnotation(Annotation(step), *mesh.key).ToWire();
    return mesh::VerifyIngressWire(
        wire, *mesh.key, snapshot,
        absl::StrCat("t:", test.id, ":", seed, ":", step), mesh.clock->Now());
  }

  bool Setup(Rng&) {
    auto ctx = mesh::RequestContext::FromAnnotation(
        absl::StrCat("t:", test.id, ":setup"), Annotation(0),
        mesh.clock->Now());
    auto handle =
        mesh.store->ResolveStore(ctx, {"integration-tests", DeployState::kReleased});
    if (!handle.ok()) {
      Fail(absl::StrCat("setup: ", handle.status().message()));
      return false;
    }
    for (const auto& s : test.setup) {
      const staging::TableSchema* schema = mesh.store->FindSchema(s.copy_fake_from);
      if (schema == nullptr || !schema->fake_label_column) {
        Fail(absl::StrCat("setup: ", s.copy_fake_from,
                          " has no fake-labelled rows"));
        return false;
      }
      auto ids = mesh.store->Ids(*handle, s.copy_fake_from);
      if (!ids.ok()) {
        Fail(absl::StrCat("setup: ", ids.status().message()));
        return false;
      }
      std::optional<staging::Row> source;
      for (std::int64_t id : *ids) {
        auto row = mesh.store->Read(*handle, s.copy_fake_from, id);
        if (!row.ok() || !row->has_value()) continue;
        auto fake = (*row)->find(*schema->fake_label_column);
        if (fake != (*row)->end() && fake->second == staging::Value(true)) {
          source = **row;
          break;
        }
      }
      if (!source) {
        Fail(absl::StrCat("setup: no static fake row in ", s.copy_fake_from));
        return false;
      }
      source->erase(schema->id_column);
      auto id = mesh.store->Insert(*handle, s.copy_fake_from, *source);
      if (!id.ok()) {
        Fail(absl::StrCat("setup: ", id.status().message()));
        return false;
      }
      created.push_back(*id);
    }
    return true;
  }

  void CheckMarker(std::size_t step, const mesh::MeshSnapshot& snapshot,
                   const StepExpectation& expect, const ComponentId& component,
                   const DeployId& deploy, const std::string& marker) {
    if (expect.routed_markers) {
      const mesh::DeployInfo* info = snapshot.FindDeploy(deploy);
      auto forced = overrides.find(component);
      std::string expected_deploy_rule;
      if (forced != overrides.end()) {
        if (deploy != forced->second) {
          Fail(absl::StrCat("step ", step, ": ", component, " served by ",
                            deploy, ", override is ", forced->second));
          return;
        }
      } else {
        const mesh::TrafficRule* rule = snapshot.RuleFor(component);
        if (rule == nullptr || rule->WeightOf(deploy) <= 0) {
          Fail(absl::StrCat("step ", step, ": ", component, " served by ",
                            deploy, " which carries no production weight"));
          return;
        }
      }
      if (info == nullptr || info->behavior.marker != marker) {
        Fail(absl::StrCat("step ", step, ": ", component, " marker '", marker,
                          "' does not match deploy ", deploy));
      }
    }
    if (auto it = expect.markers.find(component);
        it != expect.markers.end() && it->second != marker) {
      Fail(absl::StrCat("step ", step, ": ", component, " marker '", marker,
                        "' != expected '", it->second, "'"));
    }
  }

  void CheckRows(std::size_t step, const StepExpectation& expect) {
    for (const auto& r : expect.rows) {
      if (r.setup_index >= created.size()) {
        Fail(absl::StrCat("step ", step, ": no setup row #", r.setup_index));
        continue;
      }
      const std::int64_t id = created[r.setup_index];
      bool exists = false;
      if (r.realm == staging::Realm::kProduction) {
        auto row = mesh.store->ReadProduction(r.table, id);
        exists = row.ok() && row->has_value();
      } else {
        auto ctx = mesh::RequestContext::FromAnnotation(
            "row-check", Annotation(step), mesh.clock->Now());
        auto handle = mesh.store->ResolveStore(
            ctx, {"integration-tests", DeployState::kReleased});
        if (handle.ok()) {
          auto row = mesh.store->Read(*handle, r.table, id);
          exists = row.ok() && row->has_value();
        }
      }
      if (exists != r.exists) {
        Fail(absl::StrCat("step ", step, ": ", r.table, "#", id, " in ",
                          staging::RealmName(r.realm),
                          exists ? " exists" : " is absent"));
      }
    }
  }

  void RunRequest(std::size_t step, const TestStep& s, Rng& rng) {
    auto snapshot = mesh.routing->Current();
    auto ctx = Ingress(step, *snapshot);
    if (!ctx.ok()) {
      Fail(absl::StrCat("step ", step, ": ingress rejected: ",
                        ctx.status().message()));
      return;
    }
    auto exec = mesh::ExecuteRequest(s.entry, *ctx, *snapshot, *mesh.store,
                                     rng, mesh.metrics);
    if (!exec.ok()) {
      Fail(absl::StrCat("step ", step, ": ", exec.status().message()));
      return;
    }
    for (const auto& hop : exec->trace.hops) {
      if (hop.store == mesh::StoreUse::kProduction) {
        production_writes.fetch_add(hop.writes.size());
      }
    }
    const StepExpectation& expect = s.expect;
    if (expect.status && exec->response.status != *expect.status) {
      Fail(absl::StrCat("step ", step, ": status ",
                        mesh::OutcomeName(exec->response.status),
                        ", expected ", mesh::OutcomeName(*expect.status)));
    }
    for (const auto& m : exec->response.markers) {
      CheckMarker(step, *snapshot, expect, m.component, m.deploy, m.marker);
    }
    if (expect.store_realm) {
      const auto want = *expect.store_realm == staging::Realm::kStaging
                            ? mesh::StoreUse::kStaging
                            : mesh::StoreUse::kProduction;
      for (const auto& hop : exec->trace.hops) {
        if (hop.store != mesh::StoreUse::kNone && hop.store != want) {
          Fail(absl::StrCat("step ", step, ": ", hop.component, " used the ",
                            mesh::StoreUseName(hop.store), " store"));
        }
      }
    }
    CheckRows(step, expect);
  }

  void RunPublish(std::size_t step, const TestStep& s) {
    if (bus == nullptr) {
      Fail(absl::StrCat("step ", step, ": no event bus"));
      return;
    }
    auto snapshot = mesh.routing->Current();
    auto ctx = Ingress(step, *snapshot);
    if (!ctx.ok()) {
      Fail(absl::StrCat("step ", step, ": ingress rejected: ",
                        ctx.status().message()));
      return;
    }
    auto id = bus->Publish(s.topic, s.payload, *ctx);
    if (!id.ok()) {
      Fail(absl::StrCat("step ", step, ": ", id.status().message()));
      return;
    }
    published.push_back(*id);
  }

  void RunConsume(std::size_t step, const TestStep& s, Rng& rng) {
    if (bus == nullptr) {
      Fail(absl::StrCat("step ", step, ": no event bus"));
      return;
    }
    auto consumer = bus->ConsumerOf(s.topic);
    if (!consumer) {
      Fail(absl::StrCat("step ", step, ": unknown topic ", s.topic));
      return;
    }
    std::vector<std::string> mine;
    for (const auto& id : published) {
      if (id.rfind(s.topic + "#", 0) == 0) mine.push_back(id);
    }
    auto all_done = [&] {
      return std::all_of(mine.begin(), mine.end(), [&](const std::string& id) {
        auto rec = bus->Processed(id);
        return rec.has_value() && rec->outcome == mesh::Outcome::kOk;
      });
    };
    // Another test's consumer may already be processing our envelopes.
    for (int attempt = 0; attempt < kConsumeAttempts && !all_done(); ++attempt) {
      auto n = bus->Consume(s.topic, *consumer, mesh, rng);
      if (!n.ok()) {
        Fail(absl::StrCat("step ", step, ": ", n.status().message()));
        return;
      }
      if (!all_done()) std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
    auto snapshot = mesh.routing->Current();
    for (const auto& id : mine) {
      auto rec = bus->Processed(id);
      if (!rec) {
        Fail(absl::StrCat("step ", step, ": event ", id, " never processed"));
        continue;
      }
      if (rec->store == mesh::StoreUse::kProduction) {
        production_writes.fetch_add(1);
      }
      if (s.expect.status && rec->outcome != *s.expect.status) {
        Fail(absl::StrCat("step ", step, ": event ", id, " outcome ",
                          mesh::OutcomeName(rec->outcome)));
      }
      CheckMarker(step, *snapshot, s.expect, *consumer, rec->deploy,
                  rec->marker);
      if (s.expect.store_realm) {
        const auto want = *s.expect.store_realm == staging::Realm::kStaging
                              ? mesh::StoreUse::kStaging
                              : mesh::StoreUse::kProduction;
        if (rec->store != mesh::StoreUse::kNone && rec->store != want) {
          Fail(absl::StrCat("step ", step, ": event ", id, " used the ",
                            mesh::StoreUseName(rec->store), " store"));
        }
      }
    }
  }

  TestResult Run() {
    result.test_id = test.id;
    Rng rng(HashCombine(seed, test.id));
    if (Setup(rng)) {
      for (std::size_t i = 0; i < test.steps.size(); ++i) {
        const TestStep& s = test.steps[i];
        switch (s.kind) {
          case TestStep::Kind::kRequest:
            RunRequest(i, s, rng);
            break;
          case TestStep::Kind::kPublish:
            RunPublish(i, s);
            break;
          case TestStep::Kind::kConsume:
            RunConsume(i, s, rng);
            break;
        }
      }
    }
    result.passed = result.failures.empty();
    return std::move(result);
  }
};

}  // namespace

absl::StatusOr<Suite> ParseSuite(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    return Invalid("", absl::StrCat("invalid JSON: ", e.what()));
  }
  Suite suite;
  CND_RETURN_IF_ERROR(Get(doc, "id", "", suite.id));
  const Json* tests = nullptr;
  CND_RETURN_IF_ERROR(GetArray(doc, "tests", "", tests));
  std::set<std::string> ids;
  for (std::size_t i = 0; i < tests->size(); ++i) {
    const std::string tp = Index("tests", i);
    const Json& t = (*tests)[i];
    TestCase test;
    CND_RETURN_IF_ERROR(Get(t, "id", tp, test.id));
    if (!ids.insert(test.id).second) {
      return Invalid(Field(tp, "id"), "duplicate test id");
    }
    const Json* setup = nullptr;
    CND_RETURN_IF_ERROR(GetArray(t, "setup", tp, setup, false));
    if (setup != nullptr) {
      for (std::size_t j = 0; j < setup->size(); ++j) {
        SetupStep s;
        CND_RETURN_IF_ERROR(Get((*setup)[j], "copy_fake", Index(Field(tp, "setup"), j),
                                s.copy_fake_from));
        test.setup.push_back(std::move(s));
      }
    }
    const Json* steps = nullptr;
    CND_RETURN_IF_ERROR(GetArray(t, "steps", tp, steps));
    for (std::size_t j = 0; j < steps->size(); ++j) {
      CND_ASSIGN_OR_RETURN(TestStep step,
                           ParseStep((*steps)[j], Index(Field(tp, "steps"), j)));
      test.steps.push_back(std::move(step));
    }
    suite.tests.push_back(std::move(test));
  }
  return suite;
}

absl::StatusOr<Suite> LoadSuiteFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("cannot read suite file ", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseSuite(buf.str());
}

absl::StatusOr<SuiteRun> RunIntegrationSuite(
    const Suite& suite, const std::map<ComponentId, DeployId>& overrides,
    MeshBinding& mesh, EventBus* bus, const SuiteOptions& options) {
  auto snapshot = mesh.routing->Current();
  for (const auto& [component, deploy] : overrides) {
    if (!snapshot->IsRoutable(component, deploy)) {
      return MakeError(ErrorKind::kUnknownDeploy,
                       absl::StrCat("override ", component, "->", deploy,
                                    " names no live deploy"));
    }
  }
  if (mesh.store->CurrentClone() == nullptr) {
    return MakeError(ErrorKind::kNoStagingClone,
                     "integration suites need a staging clone");
  }

  SuiteRun run;
  run.suite_id = suite.id;
  run.started_tick = mesh.clock->Now();
  run.overrides = overrides;
  run.results.resize(suite.tests.size());

  std::vector<std::size_t> order(suite.tests.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_seed) {
    Rng shuffle(*options.shuffle_seed);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.Below(i)]);
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> production_writes{0};
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < order.size();
         k = next.fetch_add(1)) {
      const std::size_t i = order[k];
      TestRunner runner{suite.tests[i], overrides, mesh, bus, options.seed,
                        production_writes, {}, {}, {}};
      run.results[i] = runner.Run();
    }
  };
  const std::size_t workers = std::min<std::size_t>(
      std::max(1, options.workers), std::max<std::size_t>(1, order.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& r : run.results) {
    (r.passed ? run.pass_count : run.fail_count) += 1;
  }
  run.production_write_delta = production_writes.load();
  return run;
}

absl::StatusOr<std::optional<SuiteRun>> SyntheticProber::Poll(
    MeshBinding& mesh) {
  const Tick now = mesh.clock->Now();
  if (!next_due_) next_due_ = now;
  if (now < *next_due_) return std::optional<SuiteRun>();
  auto run = RunIntegrationSuite(*suite_, {}, mesh, bus_, options_);
  if (!run.ok()) return run.status();
  while (*next_due_ <= now) *next_due_ += cadence_;
  if (!run->AllPassed()) ++alerts_;
  runs_.push_back(*run);
  return std::optional<SuiteRun>(*std::move(run));
}

absl::StatusOr<std::vector<SuiteRun>> RunSyntheticProbes(
    const Suite& suite, Tick cadence_ticks, Tick ticks, MeshBinding& mesh,
    EventBus* bus, const SuiteOptions& options) {
  SyntheticProber prober(&suite, cadence_ticks, bus, options);
  for (Tick t = 0; t < ticks; ++t) {
    auto polled = prober.Poll(mesh);
    if (!polled.ok()) return polled.status();
    mesh.clock->Advance(1);
  }
  return prober.runs();
}

}  // namespace cnd::harness
