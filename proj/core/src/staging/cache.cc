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

#include "cnd/staging/cache.h"

#include "absl/strings/str_cat.h"

namespace cnd::staging {

std::string RowCache::Key(const std::string& table, std::int64_t id,
                          const mesh::RequestContext& ctx) const {
  if (!staging_aware_) return absl::StrCat(table, "/", id);
  if (!ctx.staging()) return absl::StrCat("production/", table, "/", id);
  const auto date = store_ ? store_->CurrentStagingDate() : std::nullopt;
  return absl::StrCat("staging@", date.value_or(-1), "/", table, "/", id);
}

std::optional<Row> RowCache::Get(const std::string& table, std::int64_t id,
                                 const mesh::RequestContext& ctx) {
  const std::string key = Key(table, id, ctx);
  const Realm realm = ctx.staging() ? Realm::kStaging : Realm::kProduction;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++stats_.misses;
    return std::nullopt;
  }
  ++stats_.hits;
  if (it->second.realm != realm) ++stats_.cross_realm_hits;
  return it->second.row;
}

void RowCache::Put(const std::string& table, std::int64_t id, Row row,
                   const mesh::RequestContext& ctx) {
  const std::string key = Key(table, id, ctx);
  const Realm realm = ctx.staging() ? Realm::kStaging : Realm::kProduction;
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = Entry{std::move(row), realm};
}

CacheStats RowCache::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return stats_;
}

}  // namespace cnd::staging
