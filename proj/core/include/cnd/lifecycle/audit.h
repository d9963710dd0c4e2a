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

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/types.h"

namespace cnd::lifecycle {

struct AuditEntry {
  Tick tick = 0;
  std::string actor;
  std::string action;
  ComponentId component;
  DeployId deploy;
  std::string commit;
  // ';'-separated key=value pairs. State transitions carry from= and to=.
  std::string detail;

  bool operator==(const AuditEntry&) const = default;
};

// Value of `key` in the entry's detail.
std::optional<std::string> DetailValue(const AuditEntry& entry,
                                       std::string_view key);
// True for entries recording a deploy state change.
bool IsTransitionEntry(const AuditEntry& entry);

// One tab-separated line, fields in declaration order; tab, newline and
// backslash escaped. No trailing newline.
std::string FormatAuditLine(const AuditEntry& entry);
absl::StatusOr<AuditEntry> ParseAuditLine(std::string_view line);

// Append-only, thread-safe. Optionally mirrors each entry to a file.
class AuditLog {
 public:
  AuditLog() = default;
  // Appends to `path` (created if missing).
  static absl::StatusOr<std::unique_ptr<AuditLog>> OpenFile(
      const std::filesystem::path& path);

  void Append(AuditEntry entry);
  std::vector<AuditEntry> Entries() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<AuditEntry> entries_;
  std::optional<std::ofstream> file_;
};

absl::StatusOr<std::vector<AuditEntry>> ReadAuditFile(
    const std::filesystem::path& path);

// State reconstructed purely from the log.
struct ReplayState {
  std::map<DeployId, DeployState> states;
  std::map<DeployId, ComponentId> components;
  // Latest rule per component, in FormatRule form.
  std::map<ComponentId, std::string> rules;
  std::size_t transitions = 0;
};

// Rejects logs whose from= disagrees with the replayed state or whose
// transitions are illegal.
absl::StatusOr<ReplayState> ReplayAudit(const std::vector<AuditEntry>& log);

}  // namespace cnd::lifecycle
