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
#include <map>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "cnd/common/types.h"

namespace cnd::mesh {

// Per-request routing instructions: which preproduction deploys to use and
// whether the request belongs to the staging realm.
struct RoutingAnnotation {
  std::map<ComponentId, DeployId> overrides;
  bool staging = false;
  Tick issued_at = 0;
  std::uint64_t nonce = 0;

  bool operator==(const RoutingAnnotation&) const = default;
};

// Canonical payload bytes. Fields in fixed order (staging, issued-at, nonce,
// overrides sorted by component id); identical annotations always encode to
// identical bytes.
std::string EncodeAnnotation(const RoutingAnnotation& annotation);

// Strict inverse of EncodeAnnotation. Non-canonical input is rejected.
absl::StatusOr<RoutingAnnotation> DecodeAnnotation(std::string_view payload);

// Shared secret for annotation signing. Never empty.
class SigningKey {
 public:
  static absl::StatusOr<SigningKey> Create(std::string bytes);

  const std::string& bytes() const { return bytes_; }

 private:
  explicit SigningKey(std::string bytes) : bytes_(std::move(bytes)) {}
  std::string bytes_;
};

struct SignedAnnotation {
  std::string payload;
  // HMAC-SHA256 over `payload`, 32 bytes.
  std::string tag;

  // base64url(payload) "." base64url(tag), unpadded.
  std::string ToWire() const;
  static absl::StatusOr<SignedAnnotation> FromWire(std::string_view wire);

  bool operator==(const SignedAnnotation&) const = default;
};

SignedAnnotation SignAnnotation(const RoutingAnnotation& annotation,
                                const SigningKey& key);

// Constant-time tag check.
bool VerifyTag(const SignedAnnotation& signed_annotation,
               const SigningKey& key);

}  // namespace cnd::mesh
