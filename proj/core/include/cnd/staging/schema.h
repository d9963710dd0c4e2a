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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "cnd/common/types.h"

namespace cnd::staging {

enum class ColumnType { kInt, kString, kBool, kBlob };

// Sensitivity classification driving de-identification at clone time.
enum class DataTag {
  kPiiDirect,
  kPiiQuasi,
  kSensitiveFinancial,
  kPassword,
  kNone,
};

std::string ColumnTypeName(ColumnType type);
std::optional<ColumnType> ParseColumnType(std::string_view name);
std::string DataTagName(DataTag tag);
std::optional<DataTag> ParseDataTag(std::string_view name);

// monostate is the null / erased sentinel. Blobs are held as strings.
using Value = std::variant<std::monostate, std::int64_t, bool, std::string>;
using Row = std::map<std::string, Value>;

std::string FormatValue(const Value& value);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kString;
  DataTag tag = DataTag::kNone;
};

struct TableSchema {
  std::string name;
  std::vector<Column> columns;
  std::string id_column = "id";
  bool auto_increment = true;
  // Boolean column marking static test rows as fake.
  std::optional<std::string> fake_label_column;
  // When set, production rows are reachable only from production deploys of
  // this component.
  std::optional<ComponentId> owning_service;

  const Column* Find(std::string_view column) const;

  // Exactly one int id column, unique column names, fake label is bool.
  absl::Status Validate() const;

  // Every non-id column present, non-null and of the declared type; no
  // unknown columns. The id column may be absent (allocated on insert).
  absl::Status ValidateRow(const Row& row) const;
};

}  // namespace cnd::staging
