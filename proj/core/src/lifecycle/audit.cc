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

#include "cnd/lifecycle/audit.h"

#include <charconv>
#include <memory>

#include "absl/strings/str_cat.h"
#include "cnd/common/status.h"
#include "cnd/lifecycle/deploy.h"

namespace cnd::lifecycle {
namespace {

absl::Status Malformed(const std::string& message) {
  return MakeError(ErrorKind::kValidationError,
                   absl::StrCat("audit: ", message));
}

void AppendEscaped(std::string& out, std::string_view field) {
  for (char c : field) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
}

absl::StatusOr<std::vector<std::string>> SplitEscaped(std::string_view line) {
  std::vector<std::string> fields(1);
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\t') {
      fields.emplace_back();
    } else if (c == '\\') {
      if (++i == line.size()) return Malformed("dangling escape");
      switch (line[i]) {
        case '\\':
          fields.back() += '\\';
          break;
        case 't':
          fields.back() += '\t';
          break;
        case 'n':
          fields.back() += '\n';
          break;
        case 'r':
          fields.back() += '\r';
          break;
        default:
          return Malformed("unknown escape");
      }
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

std::optional<std::string> DetailValue(const AuditEntry& entry,
                                       std::string_view key) {
  std::string_view rest = entry.detail;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    std::string_view pair = rest.substr(0, semi);
    rest = semi == std::string_view::npos ? std::string_view()
                                          : rest.substr(semi + 1);
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == key) {
      return std::string(pair.substr(eq + 1));
    }
  }
  return std::nullopt;
}

bool IsTransitionEntry(const AuditEntry& entry) {
  return !entry.deploy.empty() && DetailValue(entry, "to").has_value();
}

std::string FormatAuditLine(const AuditEntry& e) {
  std::string out = absl::StrCat(e.tick);
  for (const std::string* f :
       {&e.actor, &e.action, &e.component, &e.deploy, &e.commit, &e.detail}) {
    out += '\t';
    AppendEscaped(out, *f);
  }
  return out;
}

absl::StatusOr<AuditEntry> ParseAuditLine(std::string_view line) {
  CND_ASSIGN_OR_RETURN(std::vector<std::string> f, SplitEscaped(line));
  if (f.size() != 7) {
    return Malformed(absl::StrCat("expected 7 fields, got ", f.size()));
  }
  AuditEntry e;
  auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(),
                                   e.tick);
  if (ec != std::errc() || ptr != f[0].data() + f[0].size()) {
    return Malformed("bad tick");
  }
  e.actor = std::move(f[1]);
  e.action = std::move(f[2]);
  e.component = std::move(f[3]);
  e.deploy = std::move(f[4]);
  e.commit = std::move(f[5]);
  e.detail = std::move(f[6]);
  return e;
}

absl::StatusOr<std::unique_ptr<AuditLog>> AuditLog::OpenFile(
    const std::filesystem::path& path) {
  auto log = std::make_unique<AuditLog>();
  log->file_.emplace(path, std::ios::app);
  if (!*log->file_) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("cannot open audit log ", path.string()));
  }
  return log;
}

void AuditLog::Append(AuditEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  if (file_) {
    *file_ << FormatAuditLine(entry) << '\n';
    file_->flush();
  }
  entries_.push_back(std::move(entry));
}

std::vector<AuditEntry> AuditLog::Entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

std::size_t AuditLog::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

absl::StatusOr<std::vector<AuditEntry>> ReadAuditFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kValidationError,
                     absl::StrCat("cannot read audit log ", path.string()));
  }
  std::vector<AuditEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CND_ASSIGN_OR_RETURN(AuditEntry e, ParseAuditLine(line));
    out.push_back(std::move(e));
  }
  return out;
}

absl::StatusOr<ReplayState> ReplayAudit(const std::vector<AuditEntry>& log) {
  ReplayState st;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const AuditEntry& e = log[i];
    const std::string where = absl::StrCat("entry ", i, " (", e.action, ")");
    if (auto rule = DetailValue(e, "rule")) st.rules[e.component] = *rule;
    if (!IsTransitionEntry(e)) continue;
    auto to = ParseDeployState(*DetailValue(e, "to"));
    if (!to) return Malformed(absl::StrCat(where, ": bad to= state"));
    auto from_text = DetailValue(e, "from");
    auto it = st.states.find(e.deploy);
    if (it == st.states.end()) {
      if (from_text) {
        return Malformed(absl::StrCat(where, ": first entry for ", e.deploy,
                                      " has a from= state"));
      }
      st.states[e.deploy] = *to;
      st.components[e.deploy] = e.component;
    } else {
      auto from = from_text ? ParseDeployState(*from_text) : std::nullopt;
      if (!from || *from != it->second) {
        return Malformed(absl::StrCat(where, ": from= disagrees with ",
                                      DeployStateName(it->second)));
      }
      if (!IsLegalTransition(*from, *to)) {
        return Malformed(absl::StrCat(where, ": illegal transition"));
      }
      it->second = *to;
    }
    ++st.transitions;
  }
  return st;
}

}  // namespace cnd::lifecycle
