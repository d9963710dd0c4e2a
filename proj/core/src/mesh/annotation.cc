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

#include "cnd/mesh/annotation.h"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <charconv>
#include <vector>

#include "absl/strings/escaping.h"
#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::mesh {
namespace {

constexpr std::string_view kVersionTag = "cnd1";

absl::Status Malformed(const std::string& why) {
  return MakeError(ErrorKind::kMalformedAnnotation, why);
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

bool TakeField(std::string_view part, std::string_view key,
               std::string_view& value) {
  if (part.size() <= key.size() || part.substr(0, key.size()) != key ||
      part[key.size()] != '=') {
    return false;
  }
  value = part.substr(key.size() + 1);
  return true;
}

}  // namespace

std::string EncodeAnnotation(const RoutingAnnotation& annotation) {
  std::string out = absl::StrCat(std::string(kVersionTag), ";staging=",
                                 annotation.staging ? 1 : 0,
                                 ";issued_at=", annotation.issued_at,
                                 ";nonce=", annotation.nonce, ";overrides=");
  bool first = true;
  for (const auto& [component, deploy] : annotation.overrides) {
    absl::StrAppend(&out, first ? "" : ",", component, ":", deploy);
    first = false;
  }
  return out;
}

absl::StatusOr<RoutingAnnotation> DecodeAnnotation(std::string_view payload) {
  const std::vector<std::string_view> parts = Split(payload, ';');
  if (parts.size() != 5 || parts[0] != kVersionTag) {
    return Malformed("unexpected annotation layout");
  }
  RoutingAnnotation out;
  std::string_view value;
  if (!TakeField(parts[1], "staging", value) ||
      (value != "0" && value != "1")) {
    return Malformed("bad staging flag");
  }
  out.staging = value == "1";
  if (!TakeField(parts[2], "issued_at", value) ||
      !ParseNumber(value, out.issued_at)) {
    return Malformed("bad issued_at");
  }
  if (!TakeField(parts[3], "nonce", value) || !ParseNumber(value, out.nonce)) {
    return Malformed("bad nonce");
  }
  if (!TakeField(parts[4], "overrides", value)) {
    return Malformed("bad overrides");
  }
  if (!value.empty()) {
    for (std::string_view pair : Split(value, ',')) {
      const auto colon = pair.find(':');
      if (colon == std::string_view::npos) return Malformed("bad override");
      std::string component(pair.substr(0, colon));
      std::string deploy(pair.substr(colon + 1));
      if (!IsValidToken(component) || !IsValidToken(deploy)) {
        return Malformed("override ids must be tokens");
      }
      if (!out.overrides.emplace(std::move(component), std::move(deploy))
               .second) {
        return Malformed("duplicate override");
      }
    }
  }
  // Canonical form only: rejects reordered overrides, leading zeros, etc.
  if (EncodeAnnotation(out) != payload) {
    return Malformed("annotation payload is not canonical");
  }
  return out;
}

absl::StatusOr<SigningKey> SigningKey::Create(std::string bytes) {
  if (bytes.empty()) {
    return MakeError(ErrorKind::kValidationError, "signing key is empty");
  }
  return SigningKey(std::move(bytes));
}

std::string SignedAnnotation::ToWire() const {
  std::string p, t;
  absl::WebSafeBase64Escape(payload, &p);
  absl::WebSafeBase64Escape(tag, &t);
  return absl::StrCat(p, ".", t);
}

absl::StatusOr<SignedAnnotation> SignedAnnotation::FromWire(
    std::string_view wire) {
  const auto dot = wire.find('.');
  if (dot == std::string_view::npos ||
      wire.find('.', dot + 1) != std::string_view::npos) {
    return Malformed("wire annotation must be <payload>.<tag>");
  }
  SignedAnnotation out;
  if (!absl::WebSafeBase64Unescape(
          absl::string_view(wire.data(), dot), &out.payload) ||
      !absl::WebSafeBase64Unescape(
          absl::string_view(wire.data() + dot + 1, wire.size() - dot - 1),
          &out.tag)) {
    return Malformed("invalid base64url");
  }
  return out;
}

SignedAnnotation SignAnnotation(const RoutingAnnotation& annotation,
                                const SigningKey& key) {
  SignedAnnotation out;
  out.payload = EncodeAnnotation(annotation);
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  HMAC(EVP_sha256(), key.bytes().data(), static_cast<int>(key.bytes().size()),
       reinterpret_cast<const unsigned char*>(out.payload.data()),
       out.payload.size(), mac, &mac_len);
  out.tag.assign(reinterpret_cast<const char*>(mac), mac_len);
  return out;
}

bool VerifyTag(const SignedAnnotation& signed_annotation,
               const SigningKey& key) {
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  HMAC(EVP_sha256(), key.bytes().data(), static_cast<int>(key.bytes().size()),
       reinterpret_cast<const unsigned char*>(signed_annotation.payload.data()),
       signed_annotation.payload.size(), mac, &mac_len);
  return signed_annotation.tag.size() == mac_len &&
         CRYPTO_memcmp(mac, signed_annotation.tag.data(), mac_len) == 0;
}

}  // namespace cnd::mesh
