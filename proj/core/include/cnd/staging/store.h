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

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cnd/common/types.h"
#include "cnd/mesh/context.h"
#include "cnd/staging/schema.h"

namespace cnd::staging {

enum class Realm { kProduction, kStaging };

std::string RealmName(Realm realm);

enum class TransformAction { kErase, kRandomize, kKeep };

std::string TransformActionName(TransformAction action);
std::optional<TransformAction> ParseTransformAction(std::string_view name);

struct ClonePolicy {
  Tick cadence_ticks = kTicksPerDay;
  // Staging ids start at least this far above the production maximum.
  std::int64_t offset_gap = 1'000'000;
  // Per-clone jitter is drawn from [0, daily_jitter_range].
  std::int64_t daily_jitter_range = 10'000;
  std::map<DataTag, TransformAction> transforms = {
      {DataTag::kPiiDirect, TransformAction::kRandomize},
      {DataTag::kPiiQuasi, TransformAction::kKeep},
      {DataTag::kSensitiveFinancial, TransformAction::kRandomize},
      {DataTag::kPassword, TransformAction::kErase},
      {DataTag::kNone, TransformAction::kKeep},
  };
  // Partial copies. Empty include list means every table.
  std::set<std::string> include_tables;
  std::set<std::string> exclude_tables;

  TransformAction ActionFor(DataTag tag) const;
  bool Copies(const std::string& table) const;
  absl::Status Validate() const;
};

// Deterministic jitter for one table's clone on one day.
std::int64_t CloneJitter(std::int64_t date, std::uint64_t seed,
                         const std::string& table, std::int64_t range);

// De-identifies one value. The result is guaranteed to differ from `value`
// for kErase and kRandomize, and to equal it for kKeep.
Value TransformValue(const Value& value, ColumnType type,
                     TransformAction action, std::uint64_t pseudonym_seed);

struct TableCloneReport {
  std::string table;
  std::size_t rows = 0;
  std::int64_t production_max_id = 0;
  std::int64_t jitter = 0;
  // First id staging will allocate for this table.
  std::int64_t offset = 0;
  std::map<DataTag, std::size_t> transformed;
};

struct CloneReport {
  std::int64_t date = 0;
  Tick cloned_at = 0;
  std::vector<TableCloneReport> tables;
  std::vector<std::string> excluded;
};

std::string FormatCloneReport(const CloneReport& report);

class StagingDb;

// Handle returned by ResolveStore. The realm is fixed for the handle's
// lifetime; staging handles pin the clone they were issued for.
struct StoreHandle {
  Realm realm = Realm::kProduction;
  std::optional<std::int64_t> staging_date;
  // Requesting component; checked against table owners on production access.
  std::optional<ComponentId> owning_service;
  // The request that obtained this handle was a testing context.
  bool testing_origin = false;
  std::shared_ptr<StagingDb> staging;
};

struct Requester {
  ComponentId component;
  DeployState state = DeployState::kReleased;
};

struct CloneHooks {
  // Invoked after the clone has claimed its date but before it installs.
  std::function<void()> on_claimed;
};

// Production tables plus dated staging clones, with per-request realm
// selection. Safe for concurrent use.
class StagingAwareStore {
 public:
  explicit StagingAwareStore(std::vector<TableSchema> schemas);
  ~StagingAwareStore();

  StagingAwareStore(const StagingAwareStore&) = delete;
  StagingAwareStore& operator=(const StagingAwareStore&) = delete;

  static absl::Status ValidateSchemas(const std::vector<TableSchema>& schemas);

  const std::vector<TableSchema>& schemas() const { return schemas_; }
  const TableSchema* FindSchema(const std::string& table) const;

  // Clones production into a new staging database for `date`, replacing the
  // previous clone (and discarding its overlay). Handles already issued keep
  // their clone readable.
  absl::StatusOr<CloneReport> CloneStaging(const ClonePolicy& policy,
                                           std::int64_t date,
                                           std::uint64_t jitter_seed,
                                           Tick now = 0,
                                           const CloneHooks& hooks = {});

  // Staging contexts get the latest clone. Deploys not serving production
  // are never granted a production handle.
  absl::StatusOr<StoreHandle> ResolveStore(const mesh::RequestContext& ctx,
                                           const Requester& requester) const;

  absl::StatusOr<std::int64_t> Insert(const StoreHandle& handle,
                                      const std::string& table, Row row);
  absl::StatusOr<std::optional<Row>> Read(const StoreHandle& handle,
                                          const std::string& table,
                                          std::int64_t id) const;
  // Replaces the listed columns.
  absl::Status Update(const StoreHandle& handle, const std::string& table,
                      std::int64_t id, const Row& changes);
  absl::Status Delete(const StoreHandle& handle, const std::string& table,
                      std::int64_t id);

  // Ids visible through `handle`, ascending.
  absl::StatusOr<std::vector<std::int64_t>> Ids(const StoreHandle& handle,
                                                const std::string& table) const;

  // Inserts rows into production labelled fake. Requires a fake label column.
  absl::StatusOr<std::vector<std::int64_t>> SeedStaticTestData(
      const std::string& table, std::vector<Row> rows);

  // Operator-side production load, bypassing ownership checks.
  absl::StatusOr<std::int64_t> LoadProductionRow(const std::string& table,
                                                 Row row);

  // Production row count as shown to product views (fake rows hidden).
  absl::StatusOr<std::size_t> ProductViewCount(const std::string& table) const;
  absl::StatusOr<std::size_t> ProductionCount(const std::string& table) const;
  absl::StatusOr<std::optional<Row>> ReadProduction(const std::string& table,
                                                    std::int64_t id) const;

  std::shared_ptr<StagingDb> CurrentClone() const;
  std::optional<CloneReport> LastReport() const;
  std::optional<std::int64_t> CurrentStagingDate() const;

  std::uint64_t production_writes() const { return production_writes_.load(); }
  // Production writes made through handles obtained by testing contexts.
  std::uint64_t testing_production_writes() const {
    return testing_production_writes_.load();
  }

 private:
  struct ProductionTable;

  ProductionTable* FindTable(const std::string& table) const;
  absl::Status CheckProductionAccess(const StoreHandle& handle,
                                     const TableSchema& schema) const;
  void CountProductionWrite(const StoreHandle& handle);

  std::vector<TableSchema> schemas_;
  std::map<std::string, std::unique_ptr<ProductionTable>> tables_;

  mutable std::mutex clone_mu_;
  std::shared_ptr<StagingDb> current_;
  std::optional<CloneReport> last_report_;
  std::set<std::int64_t> clones_in_progress_;
  std::map<std::string, std::int64_t> last_offsets_;

  std::atomic<std::uint64_t> production_writes_{0};
  std::atomic<std::uint64_t> testing_production_writes_{0};
};

// A dated, de-identified clone: immutable base snapshot plus a
// copy-on-write overlay.
class StagingDb {
 public:
  std::int64_t date() const { return date_; }
  bool HasTable(const std::string& table) const;
  std::optional<std::int64_t> NextId(const std::string& table) const;
  std::optional<std::int64_t> FirstId(const std::string& table) const;

 private:
  friend class StagingAwareStore;
  struct Table;

  std::int64_t date_ = 0;
  std::map<std::string, std::unique_ptr<Table>> tables_;
};

}  // namespace cnd::staging
