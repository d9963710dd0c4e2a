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

#include "cnd/control/api.h"

#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"
#include "cnd/control/json_codec.h"
#include "cnd/control/pipeline.h"
#include "cnd/mesh/router.h"
#include "httplib.h"

namespace cnd::control {

using json_fields::Get;
using json_fields::Json;

namespace {

std::vector<std::string> Segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string::npos ? path.size() : slash;
    if (end > start) out.push_back(path.substr(start, end - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return out;
}

ApiResponse Error(const absl::Status& status) {
  return {HttpStatusFor(status), ErrorJson(status)};
}

ApiResponse Ok(Json body, int status = 200) { return {status, std::move(body)}; }

template <typename T, typename F>
ApiResponse Respond(const absl::StatusOr<T>& result, F&& to_json,
                    int status = 200) {
  if (!result.ok()) return Error(result.status());
  return Ok(to_json(*result), status);
}

absl::StatusOr<Json> ParseBody(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    Json j = Json::parse(body);
    if (!j.is_object()) {
      return MakeError(ErrorKind::kValidationError, "body must be an object");
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("invalid JSON body: ", e.what()));
  }
}

absl::StatusOr<DeployRequest> DeployRequestFromJson(const Json& j) {
  DeployRequest r;
  CND_RETURN_IF_ERROR(Get(j, "component", "", r.component));
  CND_RETURN_IF_ERROR(Get(j, "version", "", r.version));
  CND_RETURN_IF_ERROR(Get(j, "branch", "", r.branch, false));
  CND_RETURN_IF_ERROR(Get(j, "commit", "", r.commit, false));
  if (auto it = j.find("behavior"); it != j.end()) {
    CND_ASSIGN_OR_RETURN(r.behavior, BehaviorFromJson(*it, "behavior"));
  }
  return r;
}

absl::StatusOr<Tick> QueryTick(const ApiRequest& req, const std::string& key,
                               Tick fallback) {
  auto it = req.query.find(key);
  if (it == req.query.end()) return fallback;
  try {
    std::size_t used = 0;
    const Tick v = std::stoll(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  return MakeError(ErrorKind::kValidationError,
                   absl::StrCat(key, ": expected an integer"));
}

Json ComponentJson(const ComponentStatus& c) {
  Json j = {{"id", c.spec.id},
            {"kind", mesh::ComponentKindName(c.spec.kind)},
            {"downstream", c.spec.downstream},
            {"tables", c.spec.tables}};
  j["released"] = c.released ? Json(*c.released) : Json(nullptr);
  j["in_flight"] = c.in_flight ? Json(*c.in_flight) : Json(nullptr);
  j["predecessor"] = c.predecessor ? Json(*c.predecessor) : Json(nullptr);
  j["rule"] = c.rule ? ToJson(*c.rule) : Json(nullptr);
  return j;
}

}  // namespace

int HttpStatusFor(const absl::Status& status) {
  if (status.ok()) return 200;
  auto kind = ErrorKindOf(status);
  if (!kind) {
    return status.code() == absl::StatusCode::kInvalidArgument ? 400 : 500;
  }
  switch (*kind) {
    case ErrorKind::kValidationError:
    case ErrorKind::kMalformedAnnotation:
    case ErrorKind::kPercentNotAllowed:
      return 400;
    case ErrorKind::kBadSignature:
      return 401;
    case ErrorKind::kAccessDenied:
      return 403;
    case ErrorKind::kUnknownDeploy:
    case ErrorKind::kUnknownComponent:
    case ErrorKind::kUnknownTopic:
      return 404;
    default:
      return 409;
  }
}

ApiResponse ApiRouter::Dispatch(const ApiRequest& req) {
  const std::vector<std::string> seg = Segments(req.path);
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";
  auto body = ParseBody(req.body);
  if (post && !body.ok()) return Error(body.status());
  const std::string& actor = req.actor;
  const std::size_t n = seg.size();
  auto at = [&](std::size_t i, const char* s) { return n > i && seg[i] == s; };

  if (get && n == 1 && at(0, "components")) {
    Json out = Json::array();
    for (const auto& c : cp_->Components()) out.push_back(ComponentJson(c));
    return Ok(out);
  }
  if (get && n == 3 && at(0, "components") && at(2, "deploys")) {
    return Respond(cp_->DeploysOf(seg[1]), [](const auto& records) {
      Json out = Json::array();
      for (const auto& r : records) out.push_back(ToJson(r));
      return out;
    });
  }
  if (post && n == 3 && at(0, "components") && at(2, "rollback")) {
    return Respond(cp_->Rollback(seg[1], actor),
                   [](const auto& r) { return ToJson(r); });
  }
  if (post && n == 1 && at(0, "deploys")) {
    auto request = DeployRequestFromJson(*body);
    if (!request.ok()) return Error(request.status());
    return Respond(cp_->CreateDeploy(*request, actor),
                   [](const auto& r) { return ToJson(r); }, 201);
  }
  if (post && n == 3 && at(0, "deploys")) {
    const DeployId& id = seg[1];
    const std::string& op = seg[2];
    if (op == "test") {
      std::string suite;
      if (auto s = Get(*body, "suite", "", suite, false); !s.ok()) {
        return Error(s);
      }
      return Respond(cp_->TestDeploy(id, suite, actor), [](const auto& t) {
        return Json{{"deploy", ToJson(t.record)}, {"run", ToJson(t.run)}};
      });
    }
    if (op == "canary") {
      std::optional<int> percent;
      if (auto it = body->find("percent"); it != body->end()) {
        if (!it->is_number_integer()) {
          return Error(MakeError(ErrorKind::kValidationError,
                                 "percent: expected an integer"));
        }
        percent = it->get<int>();
      }
      return Respond(cp_->StartCanary(id, percent, actor),
                     [](const auto& r) { return ToJson(r); });
    }
    if (op == "advance") {
      return Respond(cp_->Advance(id, actor),
                     [](const auto& r) { return ToJson(r); });
    }
    if (op == "abort") {
      return Respond(cp_->Abort(id, actor),
                     [](const auto& r) { return ToJson(r); });
    }
    if (op == "release") {
      return Respond(cp_->Release(id, actor),
                     [](const auto& r) { return ToJson(r); });
    }
  }
  if (post && n == 2 && at(0, "staging") && at(1, "clone")) {
    return Respond(cp_->CloneStaging(actor),
                   [](const auto& r) { return ToJson(r); });
  }
  if (get && n == 2 && at(0, "staging") && at(1, "report")) {
    auto report = cp_->StagingReport();
    if (!report) {
      return Error(MakeError(ErrorKind::kNoStagingClone, "no clone yet"));
    }
    return Ok(ToJson(*report));
  }
  if (get && n == 1 && at(0, "metrics")) {
    auto to = QueryTick(req, "to", cp_->clock().Now());
    if (!to.ok()) return Error(to.status());
    auto it = req.query.find("deploy");
    if (it == req.query.end() || it->second.empty()) {
      auto from = QueryTick(req, "from", 0);
      if (!from.ok()) return Error(from.status());
      Json out = Json::array();
      for (const auto& [id, w] : cp_->metrics().Windows(*from, *to)) {
        out.push_back(ToJson(w));
      }
      return Ok(out);
    }
    std::optional<Tick> from;
    if (req.query.contains("from")) {
      auto f = QueryTick(req, "from", 0);
      if (!f.ok()) return Error(f.status());
      from = *f;
    }
    auto window = cp_->Metrics(it->second, from, *to);
    if (!window.ok()) return Error(window.status());
    auto verdict = cp_->Verdict(it->second);
    if (!verdict.ok()) return Error(verdict.status());
    Json out = {{"window", ToJson(*window)}};
    out["verdict"] = *verdict ? ToJson(**verdict) : Json(nullptr);
    return Ok(out);
  }
  if (get && n == 1 && at(0, "budget")) {
    return Ok(ToJson(cp_->Budget()));
  }
  if (get && n == 1 && at(0, "audit")) {
    auto since = QueryTick(req, "since", 0);
    if (!since.ok()) return Error(since.status());
    Json out = Json::array();
    const auto entries = cp_->Audit();
    for (std::size_t i = static_cast<std::size_t>(std::max<Tick>(0, *since));
         i < entries.size(); ++i) {
      out.push_back(ToJson(entries[i]));
    }
    return Ok(out);
  }
  if (post && n == 1 && at(0, "simulate")) {
    Tick ticks = 0;
    if (auto s = Get(*body, "ticks", "", ticks, false); !s.ok()) return Error(s);
    std::optional<harness::TrafficProfile> profile;
    if (auto it = body->find("profile"); it != body->end()) {
      auto p = TrafficProfileFromJson(*it, "profile");
      if (!p.ok()) return Error(p.status());
      profile = *p;
    }
    if (ticks < 0) {
      return Error(MakeError(ErrorKind::kValidationError, "ticks must be >= 0"));
    }
    return Respond(cp_->Simulate(profile, ticks), [&](const auto& r) {
      Json out = ToJson(r);
      out["now"] = cp_->clock().Now();
      return out;
    });
  }
  if (post && n == 1 && at(0, "pipeline")) {
    auto request = DeployRequestFromJson(*body);
    if (!request.ok()) return Error(request.status());
    return Respond(RunPipeline(*cp_, *request, actor),
                   [](const auto& r) { return ToJson(r); });
  }
  if (get && n == 1 && at(0, "preview-url")) {
    std::set<DeployId> deploys;
    if (auto it = req.query.find("deploys"); it != req.query.end()) {
      const std::string& list = it->second;
      std::size_t start = 0;
      while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const auto end = comma == std::string::npos ? list.size() : comma;
        if (end > start) deploys.insert(list.substr(start, end - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    return Respond(cp_->PreviewUrl(deploys), [](const std::string& url) {
      return Json{{"url", url}, {"token", std::string(mesh::PreviewToken(url))}};
    });
  }
  const bool known_path =
      (n >= 1 && (at(0, "components") || at(0, "deploys") || at(0, "staging") ||
                  at(0, "metrics") || at(0, "budget") || at(0, "audit") ||
                  at(0, "simulate") || at(0, "pipeline") ||
                  at(0, "preview-url")));
  if (known_path && !get && !post) {
    return {405, {{"error", "MethodNotAllowed"}, {"message", req.method}}};
  }
  return {404,
          {{"error", "NotFound"},
           {"message", absl::StrCat("no route for ", req.method, " ", req.path)}}};
}

absl::Status ServeHttp(ApiRouter& router, const std::string& host, int port,
                       const std::function<void(int)>& on_listening,
                       const std::function<bool()>& stop) {
  httplib::Server server;
  auto handle = [&router](const httplib::Request& hreq,
                          httplib::Response& hres) {
    ApiRequest req;
    req.method = hreq.method;
    req.path = hreq.path;
    for (const auto& [k, v] : hreq.params) req.query[k] = v;
    req.body = hreq.body;
    if (hreq.has_header(kActorHeader)) {
      req.actor = hreq.get_header_value(kActorHeader);
    }
    ApiResponse res = router.Dispatch(req);
    hres.status = res.status;
    hres.set_content(res.body.dump(), "application/json");
  };
  server.Get(".*", handle);
  server.Post(".*", handle);
  server.Put(".*", handle);
  server.Delete(".*", handle);
  const int bound = port == 0 ? server.bind_to_any_port(host)
                              : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    return absl::UnavailableError(
        absl::StrCat("cannot bind ", host, ":", port));
  }
  std::atomic<bool> done{false};
  std::thread watcher;
  if (stop) {
    watcher = std::thread([&] {
      while (!done.load()) {
        if (stop()) {
          server.stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    });
  }
  if (on_listening) on_listening(bound);
  const bool ok = server.listen_after_bind();
  done.store(true);
  if (watcher.joinable()) watcher.join();
  return ok ? absl::OkStatus()
            : absl::UnavailableError("http server stopped with an error");
}

}  // namespace cnd::control
