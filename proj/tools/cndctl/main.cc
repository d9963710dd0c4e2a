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

// cndctl: drives the simulated system through its JSON API, either in-process
// (--scenario) or against a running `cndctl serve` (--api).

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "cnd/control/api.h"
#include "cnd/control/control_plane.h"
#include "cnd/control/scenario.h"

namespace {

using cnd::control::ApiRequest;
using cnd::control::ApiResponse;
using Json = cnd::json_fields::Json;

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop.store(true); }

struct Globals {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string api;
  std::string actor = "cli";
  std::string audit_log;
  std::string trace_log;
  bool compact = false;
};

// Local mode owns the control plane for the lifetime of the process.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ApiResponse Call(const ApiRequest& req) = 0;
};

class LocalTransport : public Transport {
 public:
  static std::unique_ptr<LocalTransport> Open(const Globals& g,
                                              std::string* error) {
    auto config = cnd::control::LoadScenario(g.scenario);
    if (!config.ok()) {
      *error = std::string(config.status().message());
      return nullptr;
    }
    auto t = std::unique_ptr<LocalTransport>(new LocalTransport);
    cnd::control::ControlOptions options;
    options.seed = g.seed;
    if (!g.audit_log.empty()) options.audit_path = g.audit_log;
    if (!g.trace_log.empty()) {
      t->trace_.open(g.trace_log, std::ios::app);
      if (!t->trace_) {
        *error = "cannot open trace log " + g.trace_log;
        return nullptr;
      }
      options.trace_log = &t->trace_;
    }
    auto cp = cnd::control::ControlPlane::Create(*std::move(config), options);
    if (!cp.ok()) {
      *error = std::string(cp.status().message());
      return nullptr;
    }
    t->cp_ = *std::move(cp);
    t->router_ = std::make_unique<cnd::control::ApiRouter>(t->cp_.get());
    return t;
  }

  ApiResponse Call(const ApiRequest& req) override {
    return router_->Dispatch(req);
  }
  cnd::control::ApiRouter& router() { return *router_; }

 private:
  LocalTransport() = default;
  std::ofstream trace_;
  std::unique_ptr<cnd::control::ControlPlane> cp_;
  std::unique_ptr<cnd::control::ApiRouter> router_;
};

class RemoteTransport : public Transport {
 public:
  explicit RemoteTransport(const std::string& base) : client_(base) {
    client_.set_read_timeout(600, 0);
  }

  ApiResponse Call(const ApiRequest& req) override {
    std::string path = req.path;
    char sep = '?';
    for (const auto& [k, v] : req.query) {
      path += sep + k + "=" + httplib::detail::encode_query_param(v);
      sep = '&';
    }
    httplib::Headers headers = {{cnd::control::kActorHeader, req.actor}};
    httplib::Result res =
        req.method == "GET"
            ? client_.Get(path, headers)
            : client_.Post(path, headers, req.body, "application/json");
    if (!res) {
      return {503, {{"error", "Unavailable"},
                    {"message", httplib::to_string(res.error())}}};
    }
    ApiResponse out;
    out.status = res->status;
    out.body = Json::parse(res->body, nullptr, false);
    if (out.body.is_discarded()) {
      out.body = {{"error", "BadResponse"}, {"message", res->body}};
    }
    return out;
  }

 private:
  httplib::Client client_;
};

int Emit(const Globals& g, const ApiResponse& res, bool success) {
  const std::string text = g.compact ? res.body.dump() : res.body.dump(2);
  (success ? std::cout : std::cerr) << text << "\n";
  return success ? 0 : 1;
}

bool Ok(const ApiResponse& res) { return res.status >= 200 && res.status < 300; }

// One line per request: METHOD PATH [JSON body]. Blank lines and # comments
// are skipped. Stops at the first failure.
int RunBatch(const Globals& g, Transport& t, const std::string& file) {
  std::ifstream in(file);
  if (!in) {
    std::cerr << Json{{"error", "ValidationError"},
                      {"message", "cannot open " + file}}
                     .dump()
              << "\n";
    return 1;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    ApiRequest req;
    std::string target;
    ls >> req.method >> target;
    std::getline(ls, req.body);
    req.actor = g.actor;
    const auto q = target.find('?');
    req.path = target.substr(0, q);
    if (q != std::string::npos) {
      std::istringstream qs(target.substr(q + 1));
      std::string kv;
      while (std::getline(qs, kv, '&')) {
        const auto eq = kv.find('=');
        req.query[kv.substr(0, eq)] =
            eq == std::string::npos ? "" : kv.substr(eq + 1);
      }
    }
    const ApiResponse res = t.Call(req);
    Json out = {{"line", lineno},
                {"request", req.method + " " + target},
                {"status", res.status},
                {"body", res.body}};
    std::cout << (g.compact ? out.dump() : out.dump(2)) << "\n";
    if (!Ok(res)) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cndctl - control plane for the simulated cloud-native stack"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario JSON (in-process mode)")
      ->envname("CND_SCENARIO");
  app.add_option("--seed", g.seed, "Override the scenario seed");
  app.add_option("--api", g.api, "Base URL of a running `cndctl serve`");
  app.add_option("--actor", g.actor, "Actor recorded in the audit log");
  app.add_option("--audit-log", g.audit_log, "Append audit entries to file");
  app.add_option("--trace-log", g.trace_log, "Append request traces to file");
  app.add_flag("--compact", g.compact, "Single-line JSON output");

  std::string component, version, branch = "main", commit, deploy, suite,
                                   deploys, host = "127.0.0.1", batch;
  std::optional<int> percent;
  std::optional<long long> ticks, since, from, to;
  int port = 8080;

  auto* c_deploy = app.add_subcommand("deploy", "Create a preproduction deploy");
  c_deploy->add_option("component,--component", component)->required();
  c_deploy->add_option("version,--version", version)->required();
  c_deploy->add_option("--branch", branch);
  c_deploy->add_option("--commit", commit);

  auto* c_test = app.add_subcommand("test", "Run the integration suite");
  c_test->add_option("deploy,--deploy", deploy)->required();
  c_test->add_option("--suite", suite);

  auto* c_canary = app.add_subcommand("canary", "Start a canary");
  c_canary->add_option("deploy,--deploy", deploy)->required();
  c_canary->add_option("--percent", percent);

  auto* c_advance = app.add_subcommand("advance", "Judge and shift one step");
  c_advance->add_option("deploy,--deploy", deploy)->required();

  auto* c_abort = app.add_subcommand("abort", "Abort an in-flight deploy");
  c_abort->add_option("deploy,--deploy", deploy)->required();

  auto* c_promote = app.add_subcommand("promote", "Finalize a release at 100%");
  c_promote->add_option("deploy,--deploy", deploy)->required();

  auto* c_rollback = app.add_subcommand("rollback", "Restore the predecessor");
  c_rollback->add_option("component,--component", component)->required();

  auto* c_clone = app.add_subcommand("clone-staging", "Re-clone production");

  auto* c_status = app.add_subcommand("status", "Components or one component's deploys");
  c_status->add_option("component,--component", component);

  auto* c_sim = app.add_subcommand("simulate", "Production traffic");
  c_sim->add_option("--ticks", ticks)->required();

  auto* c_pipe = app.add_subcommand("pipeline", "Full deploy-to-retire pipeline");
  c_pipe->add_option("component,--component", component)->required();
  c_pipe->add_option("version,--version", version)->required();
  c_pipe->add_option("--branch", branch);
  c_pipe->add_option("--commit", commit);

  auto* c_metrics = app.add_subcommand("metrics", "Metrics windows");
  c_metrics->add_option("--deploy", deploy);
  c_metrics->add_option("--from", from);
  c_metrics->add_option("--to", to);

  auto* c_budget = app.add_subcommand("budget", "Error budget");
  auto* c_audit = app.add_subcommand("audit", "Audit trail");
  c_audit->add_option("--since", since, "First entry index");

  auto* c_preview = app.add_subcommand("preview-url", "Signed preview URL");
  c_preview->add_option("--deploys", deploys, "Comma-separated deploy ids");

  auto* c_batch = app.add_subcommand("batch", "Run METHOD PATH [BODY] lines");
  c_batch->add_option("file", batch)->required();

  auto* c_serve = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  c_serve->add_option("--host", host);
  c_serve->add_option("--port", port, "0 picks a free port");

  CLI11_PARSE(app, argc, argv);

  auto fail = [&](const std::string& kind, const std::string& msg) {
    std::cerr << Json{{"error", kind}, {"message", msg}}.dump() << "\n";
    return 1;
  };

  std::unique_ptr<Transport> transport;
  LocalTransport* local = nullptr;
  if (!g.api.empty()) {
    if (c_serve->parsed()) return fail("ValidationError", "serve needs --scenario, not --api");
    transport = std::make_unique<RemoteTransport>(g.api);
  } else {
    if (g.scenario.empty()) {
      return fail("ValidationError", "one of --scenario or --api is required");
    }
    std::string error;
    auto t = LocalTransport::Open(g, &error);
    if (!t) return fail("ValidationError", error);
    local = t.get();
    transport = std::move(t);
  }

  if (c_serve->parsed()) {
    std::signal(SIGINT, OnSignal);
    std::signal(SIGTERM, OnSignal);
    auto s = cnd::control::ServeHttp(
        local->router(), host, port,
        [&](int bound) {
          std::cout << Json{{"listening", host + ":" + std::to_string(bound)}}.dump()
                    << std::endl;
        },
        [] { return g_stop.load(); });
    if (!s.ok()) return fail("Unavailable", std::string(s.message()));
    return 0;
  }
  if (c_batch->parsed()) return RunBatch(g, *transport, batch);

  ApiRequest req;
  req.actor = g.actor;
  req.method = "POST";
  Json body = Json::object();
  auto deploy_body = [&] {
    body = {{"component", component}, {"version", version}, {"branch", branch}};
    if (!commit.empty()) body["commit"] = commit;
  };
  if (c_deploy->parsed()) {
    req.path = "/deploys";
    deploy_body();
  } else if (c_test->parsed()) {
    req.path = "/deploys/" + deploy + "/test";
    if (!suite.empty()) body["suite"] = suite;
  } else if (c_canary->parsed()) {
    req.path = "/deploys/" + deploy + "/canary";
    if (percent) body["percent"] = *percent;
  } else if (c_advance->parsed()) {
    req.path = "/deploys/" + deploy + "/advance";
  } else if (c_abort->parsed()) {
    req.path = "/deploys/" + deploy + "/abort";
  } else if (c_promote->parsed()) {
    req.path = "/deploys/" + deploy + "/release";
  } else if (c_rollback->parsed()) {
    req.path = "/components/" + component + "/rollback";
  } else if (c_clone->parsed()) {
    req.path = "/staging/clone";
  } else if (c_status->parsed()) {
    req.method = "GET";
    req.path = component.empty() ? "/components"
                                  : "/components/" + component + "/deploys";
  } else if (c_sim->parsed()) {
    req.path = "/simulate";
    body["ticks"] = *ticks;
  } else if (c_pipe->parsed()) {
    req.path = "/pipeline";
    deploy_body();
  } else if (c_metrics->parsed()) {
    req.method = "GET";
    req.path = "/metrics";
    if (!deploy.empty()) req.query["deploy"] = deploy;
    if (from) req.query["from"] = std::to_string(*from);
    if (to) req.query["to"] = std::to_string(*to);
  } else if (c_budget->parsed()) {
    req.method = "GET";
    req.path = "/budget";
  } else if (c_audit->parsed()) {
    req.method = "GET";
    req.path = "/audit";
    if (since) req.query["since"] = std::to_string(*since);
  } else if (c_preview->parsed()) {
    req.method = "GET";
    req.path = "/preview-url";
    req.query["deploys"] = deploys;
  }
  if (req.method == "POST") req.body = body.dump();

  const ApiResponse res = transport->Call(req);
  bool success = Ok(res);
  // A pipeline that halted answered fine but did not release.
  if (success && c_pipe->parsed()) {
    success = res.body.value("status", "") == "released";
  }
  return Emit(g, res, success);
}
