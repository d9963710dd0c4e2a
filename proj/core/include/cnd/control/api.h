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

#include <functional>
#include <map>
#include <string>

#include "absl/status/status.h"
#include "cnd/common/json_fields.h"
#include "cnd/control/control_plane.h"

namespace cnd::control {

inline constexpr char kActorHeader[] = "X-Actor";

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  // From the X-Actor header; simulated identity only.
  std::string actor = "anonymous";
};

struct ApiResponse {
  int status = 200;
  json_fields::Json body;
};

// 400 validation, 401 bad signature, 403 access denied, 404 unknown ids,
// 409 lifecycle conflicts.
int HttpStatusFor(const absl::Status& status);

// Transport-independent JSON API over a ControlPlane. Every read goes to the
// live in-process state; nothing is cached here.
class ApiRouter {
 public:
  explicit ApiRouter(ControlPlane* cp) : cp_(cp) {}

  ApiResponse Dispatch(const ApiRequest& request);

 private:
  ControlPlane* cp_;
};

// Serves the router over HTTP until `stop` returns true or the server fails.
// `on_listening` receives the bound port (useful with port 0).
absl::Status ServeHttp(ApiRouter& router, const std::string& host, int port,
                       const std::function<void(int)>& on_listening = {},
                       const std::function<bool()>& stop = {});

}  // namespace cnd::control
