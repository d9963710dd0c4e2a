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
#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"
#include "nlohmann/json.hpp"

namespace cnd::json_fields {

using Json = nlohmann::json;

inline std::string Field(const std::string& path, const std::string& key) {
  return path.empty() ? key : absl::StrCat(path, ".", key);
}

inline std::string Index(const std::string& path, std::size_t i) {
  return absl::StrCat(path, "[", i, "]");
}

inline absl::Status Invalid(const std::string& path, const std::string& msg) {
  return MakeError(ErrorKind::kValidationError,
                   absl::StrCat(path.empty() ? "<root>" : path, ": ", msg));
}

// Reads obj[key] into `out`. Absent optional fields leave `out` untouched.
template <typename T>
absl::Status Get(const Json& obj, const std::string& key,
                 const std::string& path, T& out, bool required = true) {
  if (!obj.is_object()) return Invalid(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    return required ? Invalid(Field(path, key), "required field missing")
                    : absl::OkStatus();
  }
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    return Invalid(Field(path, key), absl::StrCat("wrong type (", e.what(), ")"));
  }
  return absl::OkStatus();
}

inline absl::Status GetArray(const Json& obj, const std::string& key,
                             const std::string& path, const Json*& out,
                             bool required = true) {
  out = nullptr;
  if (!obj.is_object()) return Invalid(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    return required ? Invalid(Field(path, key), "required field missing")
                    : absl::OkStatus();
  }
  if (!it->is_array()) return Invalid(Field(path, key), "expected an array");
  out = &*it;
  return absl::OkStatus();
}

}  // namespace cnd::json_fields
