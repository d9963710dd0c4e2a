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

#include "cnd/staging/schema.h"

#include <array>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"

namespace cnd::staging {
namespace {

constexpr std::array<std::pair<ColumnType, std::string_view>, 4> kTypes = {{
    {ColumnType::kInt, "int"},
    {ColumnType::kString, "string"},
    {ColumnType::kBool, "bool"},
    {ColumnType::kBlob, "blob"},
}};

constexpr std::array<std::pair<DataTag, std::string_view>, 5> kTags = {{
    {DataTag::kPiiDirect, "pii-direct"},
    {DataTag::kPiiQuasi, "pii-quasi"},
    {DataTag::kSensitiveFinancial, "sensitive-financial"},
    {DataTag::kPassword, "password"},
    {DataTag::kNone, "none"},
}};

bool Matches(const Value& v, ColumnType type) {
  switch (type) {
    case ColumnType::kInt:
      return std::holds_alternative<std::int64_t>(v);
    case ColumnType::kBool:
      return std::holds_alternative<bool>(v);
    case ColumnType::kString:
    case ColumnType::kBlob:
      return std::holds_alternative<std::string>(v);
  }
  return false;
}

absl::Status Violation(const std::string& message) {
  return MakeError(ErrorKind::kSchemaViolation, message);
}

}  // namespace

std::string ColumnTypeName(ColumnType type) {
  for (const auto& [t, n] : kTypes) {
    if (t == type) return std::string(n);
  }
  return "unknown";
}

std::optional<ColumnType> ParseColumnType(std::string_view name) {
  for (const auto& [t, n] : kTypes) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string DataTagName(DataTag tag) {
  for (const auto& [t, n] : kTags) {
    if (t == tag) return std::string(n);
  }
  return "unknown";
}

std::optional<DataTag> ParseDataTag(std::string_view name) {
  for (const auto& [t, n] : kTags) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string FormatValue(const Value& value) {
  if (std::holds_alternative<std::monostate>(value)) return "null";
  if (const auto* i = std::get_if<std::int64_t>(&value)) {
    return absl::StrCat(*i);
  }
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  return absl::StrCat("\"", std::get<std::string>(value), "\"");
}

const Column* TableSchema::Find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

absl::Status TableSchema::Validate() const {
  if (!IsValidToken(name)) {
    return Violation(absl::StrCat("table name '", name, "' is not a token"));
  }
  std::set<std::string> names;
  for (const auto& c : columns) {
    if (c.name.empty() || !names.insert(c.name).second) {
      return Violation(absl::StrCat(name, ": duplicate or empty column '",
                                    c.name, "'"));
    }
  }
  const Column* id = Find(id_column);
  if (id == nullptr || id->type != ColumnType::kInt) {
    return Violation(
        absl::StrCat(name, ": id column '", id_column, "' must be an int"));
  }
  if (id->tag != DataTag::kNone) {
    return Violation(absl::StrCat(name, ": id column must be tagged none"));
  }
  if (fake_label_column) {
    const Column* fake = Find(*fake_label_column);
    if (fake == nullptr || fake->type != ColumnType::kBool) {
      return Violation(absl::StrCat(name, ": fake label column '",
                                    *fake_label_column, "' must be a bool"));
    }
  }
  return absl::OkStatus();
}

absl::Status TableSchema::ValidateRow(const Row& row) const {
  for (const auto& [col, value] : row) {
    const Column* c = Find(col);
    if (c == nullptr) {
      return Violation(absl::StrCat(name, ": unknown column '", col, "'"));
    }
    if (col == id_column) continue;
    // Erased values stay null; the fake label never may.
    const bool null_ok = std::holds_alternative<std::monostate>(value) &&
                         col != fake_label_column.value_or("");
    if (!null_ok && !Matches(value, c->type)) {
      return Violation(absl::StrCat(name, ".", col, ": expected ",
                                    ColumnTypeName(c->type), ", got ",
                                    FormatValue(value)));
    }
  }
  for (const auto& c : columns) {
    if (c.name == id_column) continue;
    if (!row.count(c.name)) {
      return Violation(absl::StrCat(name, ": missing column '", c.name, "'"));
    }
  }
  return absl::OkStatus();
}

}  // namespace cnd::staging
