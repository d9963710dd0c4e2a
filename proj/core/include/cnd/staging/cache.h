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
#include <mutex>
#include <optional>
#include <string>

#include "cnd/mesh/context.h"
#include "cnd/staging/schema.h"
#include "cnd/staging/store.h"

namespace cnd::staging {

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  // Hits served from an entry written by the other realm.
  std::uint64_t cross_realm_hits = 0;
};

// Read-through row cache in front of a StagingAwareStore.
//
// A staging-aware cache keys entries by realm and staging date. A plain cache
// keys by (table, id) only and relies on disjoint id spaces to stay correct.
class RowCache {
 public:
  RowCache(const StagingAwareStore* store, bool staging_aware)
      : store_(store), staging_aware_(staging_aware) {}

  std::optional<Row> Get(const std::string& table, std::int64_t id,
                         const mesh::RequestContext& ctx);
  void Put(const std::string& table, std::int64_t id, Row row,
           const mesh::RequestContext& ctx);

  bool staging_aware() const { return staging_aware_; }
  CacheStats stats() const;

 private:
  struct Entry {
    Row row;
    Realm realm;
  };

  std::string Key(const std::string& table, std::int64_t id,
                  const mesh::RequestContext& ctx) const;

  const StagingAwareStore* store_;
  const bool staging_aware_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
  CacheStats stats_;
};

}  // namespace cnd::staging
