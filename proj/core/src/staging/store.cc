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

#include "cnd/staging/store.h"

#include <algorithm>
#include <array>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cnd/common/hash.h"
#include "cnd/common/status.h"

namespace cnd::staging {

struct StagingAwareStore::ProductionTable {
  TableSchema schema;
  mutable std::mutex mu;
  std::map<std::int64_t, Row> rows;
  std::int64_t next_id = 1;
};

struct StagingDb::Table {
  TableSchema schema;
  std::shared_ptr<const std::map<std::int64_t, Row>> base;
  mutable std::mutex mu;
  // nullopt marks a row deleted in staging.
  std::map<std::int64_t, std::optional<Row>> overlay;
  std::int64_t next_id = 1;
  std::int64_t first_id = 1;
};

namespace {

constexpr std::array<std::pair<TransformAction, std::string_view>, 3>
    kActions = {{
        {TransformAction::kErase, "erase"},
        {TransformAction::kRandomize, "randomize"},
        {TransformAction::kKeep, "keep"},
    }};

absl::Status NoClone(const std::string& why) {
  return MakeError(ErrorKind::kNoStagingClone, why);
}

absl::Status RowNotFound(const std::string& table, std::int64_t id) {
  return absl::NotFoundError(absl::StrCat(table, " has no row ", id));
}

bool IsFake(const TableSchema& schema, const Row& row) {
  if (!schema.fake_label_column) return false;
  auto it = row.find(*schema.fake_label_column);
  return it != row.end() && std::holds_alternative<bool>(it->second) &&
         std::get<bool>(it->second);
}

}  // namespace

std::string RealmName(Realm realm) {
  return realm == Realm::kProduction ? "production" : "staging";
}

std::string TransformActionName(TransformAction action) {
  for (const auto& [a, n] : kActions) {
    if (a == action) return std::string(n);
  }
  return "unknown";
}

std::optional<TransformAction> ParseTransformAction(std::string_view name) {
  for (const auto& [a, n] : kActions) {
    if (n == name) return a;
  }
  return std::nullopt;
}

TransformAction ClonePolicy::ActionFor(DataTag tag) const {
  auto it = transforms.find(tag);
  return it == transforms.end() ? TransformAction::kKeep : it->second;
}

bool ClonePolicy::Copies(const std::string& table) const {
  if (exclude_tables.count(table)) return false;
  return include_tables.empty() || include_tables.count(table) > 0;
}

absl::Status ClonePolicy::Validate() const {
  auto bad = [](const std::string& m) {
    return MakeError(ErrorKind::kValidationError, m);
  };
  if (cadence_ticks <= 0) return bad("cadence_ticks must be positive");
  // A zero gap is accepted: it deliberately overlaps the id spaces.
  if (offset_gap < 0) return bad("offset_gap must be >= 0");
  if (daily_jitter_range < 0) return bad("daily_jitter_range must be >= 0");
  const TransformAction direct = ActionFor(DataTag::kPiiDirect);
  if (direct == TransformAction::kKeep) {
    return bad("pii-direct columns must be erased or randomized");
  }
  if (ActionFor(DataTag::kPassword) != TransformAction::kErase) {
    return bad("password columns must be erased");
  }
  if (ActionFor(DataTag::kSensitiveFinancial) != TransformAction::kRandomize) {
    return bad("sensitive-financial columns must be randomized");
  }
  if (ActionFor(DataTag::kNone) != TransformAction::kKeep) {
    return bad("untagged columns must be kept");
  }
  if (ActionFor(DataTag::kPiiQuasi) == TransformAction::kErase) {
    return bad("pii-quasi columns are kept or randomized");
  }
  return absl::OkStatus();
}

std::int64_t CloneJitter(std::int64_t date, std::uint64_t seed,
                         const std::string& table, std::int64_t range) {
  if (range <= 0) return 0;
  const std::uint64_t h = HashCombine(
      HashCombine(seed, static_cast<std::uint64_t>(date)), table);
  return static_cast<std::int64_t>(h % static_cast<std::uint64_t>(range + 1));
}

Value TransformValue(const Value& value, ColumnType type,
                     TransformAction action, std::uint64_t pseudonym_seed) {
  switch (action) {
    case TransformAction::kKeep:
      return value;
    case TransformAction::kErase:
      return std::monostate{};
    case TransformAction::kRandomize:
      break;
  }
  const std::uint64_t h = Mix64(pseudonym_seed);
  if (const auto* i = std::get_if<std::int64_t>(&value)) {
    // XOR with a non-zero mask can never be the identity.
    const auto mask = static_cast<std::int64_t>((h | 1) & 0x3fffffffffffffffULL);
    return *i ^ mask;
  }
  if (const auto* b = std::get_if<bool>(&value)) return !*b;
  std::string pseudonym = absl::StrFormat("anon-%016x", h);
  if (type == ColumnType::kBlob) pseudonym = absl::StrCat("blob:", pseudonym);
  if (const auto* s = std::get_if<std::string>(&value); s && *s == pseudonym) {
    pseudonym += "~";
  }
  return pseudonym;
}

std::string FormatCloneReport(const CloneReport& report) {
  std::string out = absl::StrCat("staging clone date=", report.date,
                                 " cloned_at=", report.cloned_at, "\n");
  for (const auto& t : report.tables) {
    absl::StrAppend(&out, "table ", t.table, " rows=", t.rows,
                    " production_max_id=", t.production_max_id,
                    " jitter=", t.jitter, " offset=", t.offset,
                    " transformed=");
    bool first = true;
    for (const auto& [tag, count] : t.transformed) {
      absl::StrAppend(&out, first ? "" : ",", DataTagName(tag), ":", count);
      first = false;
    }
    if (first) absl::StrAppend(&out, "-");
    absl::StrAppend(&out, "\n");
  }
  for (const auto& e : report.excluded) {
    absl::StrAppend(&out, "excluded ", e, "\n");
  }
  return out;
}

bool StagingDb::HasTable(const std::string& table) const {
  return tables_.count(table) > 0;
}

std::optional<std::int64_t> StagingDb::NextId(const std::string& table) const {
  auto it = tables_.find(table);
  if (it == tables_.end()) return std::nullopt;
  std::lock_guard<std::mutex> lock(it->second->mu);
  return it->second->next_id;
}

std::optional<std::int64_t> StagingDb::FirstId(
    const std::string& table) const {
  auto it = tables_.find(table);
  if (it == tables_.end()) return std::nullopt;
  return it->second->first_id;
}

StagingAwareStore::StagingAwareStore(std::vector<TableSchema> schemas)
    : schemas_(std::move(schemas)) {
  for (const auto& s : schemas_) {
    auto table = std::make_unique<ProductionTable>();
    table->schema = s;
    tables_.emplace(s.name, std::move(table));
  }
}

StagingAwareStore::~StagingAwareStore() = default;

absl::Status StagingAwareStore::ValidateSchemas(
    const std::vector<TableSchema>& schemas) {
  std::set<std::string> names;
  for (const auto& s : schemas) {
    CND_RETURN_IF_ERROR(s.Validate());
    if (!names.insert(s.name).second) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat("duplicate table ", s.name));
    }
  }
  return absl::OkStatus();
}

const TableSchema* StagingAwareStore::FindSchema(
    const std::string& table) const {
  auto it = tables_.find(table);
  return it == tables_.end() ? nullptr : &it->second->schema;
}

StagingAwareStore::ProductionTable* StagingAwareStore::FindTable(
    const std::string& table) const {
  auto it = tables_.find(table);
  return it == tables_.end() ? nullptr : it->second.get();
}

absl::StatusOr<CloneReport> StagingAwareStore::CloneStaging(
    const ClonePolicy& policy, std::int64_t date, std::uint64_t jitter_seed,
    Tick now, const CloneHooks& hooks) {
  CND_RETURN_IF_ERROR(policy.Validate());
  std::map<std::string, std::int64_t> previous_offsets;
  {
    std::lock_guard<std::mutex> lock(clone_mu_);
    if (!clones_in_progress_.insert(date).second) {
      return MakeError(ErrorKind::kCloneInProgress,
                       absl::StrCat("a clone for date ", date,
                                    " is already running"));
    }
    previous_offsets = last_offsets_;
  }
  struct Release {
    StagingAwareStore* self;
    std::int64_t date;
    ~Release() {
      std::lock_guard<std::mutex> lock(self->clone_mu_);
      self->clones_in_progress_.erase(date);
    }
  } release{this, date};

  auto db = std::make_shared<StagingDb>();
  db->date_ = date;
  CloneReport report;
  report.date = date;
  report.cloned_at = now;

  for (const auto& schema : schemas_) {
    if (!policy.Copies(schema.name)) {
      report.excluded.push_back(schema.name);
      continue;
    }
    const ProductionTable& source = *tables_.at(schema.name);
    std::map<std::int64_t, Row> rows;
    std::int64_t max_id = 0;
    {
      std::lock_guard<std::mutex> lock(source.mu);
      rows = source.rows;
      max_id = source.next_id - 1;
    }

    TableCloneReport table_report;
    table_report.table = schema.name;
    table_report.rows = rows.size();
    table_report.production_max_id = max_id;
    for (auto& [id, row] : rows) {
      for (const auto& col : schema.columns) {
        if (col.name == schema.id_column) continue;
        const TransformAction action = policy.ActionFor(col.tag);
        if (action == TransformAction::kKeep) continue;
        auto it = row.find(col.name);
        if (it == row.end()) continue;
        const std::uint64_t seed = HashCombine(
            HashCombine(HashCombine(HashCombine(jitter_seed,
                                                static_cast<std::uint64_t>(date)),
                                    schema.name),
                        static_cast<std::uint64_t>(id)),
            col.name);
        it->second = TransformValue(it->second, col.type, action, seed);
        ++table_report.transformed[col.tag];
      }
    }

    std::int64_t jitter =
        CloneJitter(date, jitter_seed, schema.name, policy.daily_jitter_range);
    std::int64_t offset = max_id + policy.offset_gap + jitter;
    auto prev = previous_offsets.find(schema.name);
    if (prev != previous_offsets.end() && prev->second == offset) {
      // Consecutive clones must never share a starting point.
      ++offset;
      ++jitter;
    }
    table_report.jitter = jitter;
    table_report.offset = offset;

    auto table = std::make_unique<StagingDb::Table>();
    table->schema = schema;
    table->base =
        std::make_shared<const std::map<std::int64_t, Row>>(std::move(rows));
    table->next_id = offset;
    table->first_id = offset;
    db->tables_.emplace(schema.name, std::move(table));
    report.tables.push_back(std::move(table_report));
  }

  if (hooks.on_claimed) hooks.on_claimed();

  std::lock_guard<std::mutex> lock(clone_mu_);
  current_ = std::move(db);
  last_report_ = report;
  for (const auto& t : report.tables) last_offsets_[t.table] = t.offset;
  return report;
}

absl::StatusOr<StoreHandle> StagingAwareStore::ResolveStore(
    const mesh::RequestContext& ctx, const Requester& requester) const {
  StoreHandle handle;
  handle.testing_origin = ctx.testing();
  if (ctx.staging()) {
    auto clone = CurrentClone();
    if (clone == nullptr) return NoClone("no staging clone has been made");
    handle.realm = Realm::kStaging;
    handle.staging_date = clone->date();
    handle.staging = std::move(clone);
    return handle;
  }
  if (!ServesProduction(requester.state)) {
    return MakeError(ErrorKind::kAccessDenied,
                     absl::StrCat("deploy of ", requester.component, " in state ",
                                  DeployStateName(requester.state),
                                  " may not use the production store"));
  }
  handle.realm = Realm::kProduction;
  handle.owning_service = requester.component;
  return handle;
}

absl::Status StagingAwareStore::CheckProductionAccess(
    const StoreHandle& handle, const TableSchema& schema) const {
  if (schema.owning_service &&
      handle.owning_service != schema.owning_service) {
    return MakeError(ErrorKind::kAccessDenied,
                     absl::StrCat(schema.name, " is only accessible from ",
                                  *schema.owning_service));
  }
  return absl::OkStatus();
}

void StagingAwareStore::CountProductionWrite(const StoreHandle& handle) {
  production_writes_.fetch_add(1);
  if (handle.testing_origin) testing_production_writes_.fetch_add(1);
}

absl::StatusOr<std::int64_t> StagingAwareStore::Insert(
    const StoreHandle& handle, const std::string& table, Row row) {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  CND_RETURN_IF_ERROR(prod->schema.ValidateRow(row));
  if (handle.realm == Realm::kStaging) {
    if (handle.staging == nullptr || !handle.staging->HasTable(table)) {
      return NoClone(absl::StrCat(table, " is not part of the staging clone"));
    }
    auto& t = *handle.staging->tables_.at(table);
    std::lock_guard<std::mutex> lock(t.mu);
    const std::int64_t id = t.next_id++;
    row[t.schema.id_column] = id;
    t.overlay[id] = std::move(row);
    return id;
  }
  CND_RETURN_IF_ERROR(CheckProductionAccess(handle, prod->schema));
  std::int64_t id;
  {
    std::lock_guard<std::mutex> lock(prod->mu);
    id = prod->next_id++;
    row[prod->schema.id_column] = id;
    prod->rows[id] = std::move(row);
  }
  CountProductionWrite(handle);
  return id;
}

absl::StatusOr<std::optional<Row>> StagingAwareStore::Read(
    const StoreHandle& handle, const std::string& table,
    std::int64_t id) const {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  if (handle.realm == Realm::kStaging) {
    if (handle.staging == nullptr || !handle.staging->HasTable(table)) {
      return NoClone(absl::StrCat(table, " is not part of the staging clone"));
    }
    const auto& t = *handle.staging->tables_.at(table);
    std::lock_guard<std::mutex> lock(t.mu);
    if (auto it = t.overlay.find(id); it != t.overlay.end()) return it->second;
    if (auto it = t.base->find(id); it != t.base->end()) {
      return std::optional<Row>(it->second);
    }
    return std::optional<Row>();
  }
  CND_RETURN_IF_ERROR(CheckProductionAccess(handle, prod->schema));
  std::lock_guard<std::mutex> lock(prod->mu);
  if (auto it = prod->rows.find(id); it != prod->rows.end()) {
    return std::optional<Row>(it->second);
  }
  return std::optional<Row>();
}

absl::Status StagingAwareStore::Update(const StoreHandle& handle,
                                       const std::string& table,
                                       std::int64_t id, const Row& changes) {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  const TableSchema& schema = prod->schema;
  for (const auto& [col, value] : changes) {
    if (col == schema.id_column || schema.Find(col) == nullptr) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(table, ": cannot update column '", col, "'"));
    }
  }
  auto apply = [&](Row row) -> absl::StatusOr<Row> {
    for (const auto& [col, value] : changes) row[col] = value;
    CND_RETURN_IF_ERROR(schema.ValidateRow(row));
    return row;
  };
  if (handle.realm == Realm::kStaging) {
    if (handle.staging == nullptr || !handle.staging->HasTable(table)) {
      return NoClone(absl::StrCat(table, " is not part of the staging clone"));
    }
    auto& t = *handle.staging->tables_.at(table);
    std::lock_guard<std::mutex> lock(t.mu);
    std::optional<Row> current;
    if (auto it = t.overlay.find(id); it != t.overlay.end()) {
      current = it->second;
    } else if (auto b = t.base->find(id); b != t.base->end()) {
      current = b->second;
    }
    if (!current) return RowNotFound(table, id);
    auto updated = apply(*std::move(current));
    if (!updated.ok()) return updated.status();
    t.overlay[id] = *std::move(updated);
    return absl::OkStatus();
  }
  CND_RETURN_IF_ERROR(CheckProductionAccess(handle, schema));
  {
    std::lock_guard<std::mutex> lock(prod->mu);
    auto it = prod->rows.find(id);
    if (it == prod->rows.end()) return RowNotFound(table, id);
    auto updated = apply(it->second);
    if (!updated.ok()) return updated.status();
    it->second = *std::move(updated);
  }
  CountProductionWrite(handle);
  return absl::OkStatus();
}

absl::Status StagingAwareStore::Delete(const StoreHandle& handle,
                                       const std::string& table,
                                       std::int64_t id) {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  if (handle.realm == Realm::kStaging) {
    if (handle.staging == nullptr || !handle.staging->HasTable(table)) {
      return NoClone(absl::StrCat(table, " is not part of the staging clone"));
    }
    auto& t = *handle.staging->tables_.at(table);
    std::lock_guard<std::mutex> lock(t.mu);
    const bool in_overlay = t.overlay.count(id) && t.overlay[id].has_value();
    const bool in_base = !t.overlay.count(id) && t.base->count(id);
    if (!in_overlay && !in_base) return RowNotFound(table, id);
    t.overlay[id] = std::nullopt;
    return absl::OkStatus();
  }
  CND_RETURN_IF_ERROR(CheckProductionAccess(handle, prod->schema));
  {
    std::lock_guard<std::mutex> lock(prod->mu);
    if (prod->rows.erase(id) == 0) return RowNotFound(table, id);
  }
  CountProductionWrite(handle);
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::int64_t>> StagingAwareStore::Ids(
    const StoreHandle& handle, const std::string& table) const {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  std::vector<std::int64_t> ids;
  if (handle.realm == Realm::kStaging) {
    if (handle.staging == nullptr || !handle.staging->HasTable(table)) {
      return NoClone(absl::StrCat(table, " is not part of the staging clone"));
    }
    const auto& t = *handle.staging->tables_.at(table);
    std::lock_guard<std::mutex> lock(t.mu);
    for (const auto& [id, row] : *t.base) {
      if (!t.overlay.count(id)) ids.push_back(id);
    }
    for (const auto& [id, row] : t.overlay) {
      if (row.has_value()) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }
  CND_RETURN_IF_ERROR(CheckProductionAccess(handle, prod->schema));
  std::lock_guard<std::mutex> lock(prod->mu);
  for (const auto& [id, row] : prod->rows) ids.push_back(id);
  return ids;
}

absl::StatusOr<std::int64_t> StagingAwareStore::LoadProductionRow(
    const std::string& table, Row row) {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  CND_RETURN_IF_ERROR(prod->schema.ValidateRow(row));
  std::lock_guard<std::mutex> lock(prod->mu);
  std::int64_t id;
  auto explicit_id = row.find(prod->schema.id_column);
  if (explicit_id != row.end() &&
      std::holds_alternative<std::int64_t>(explicit_id->second)) {
    id = std::get<std::int64_t>(explicit_id->second);
    if (id <= 0 || prod->rows.count(id)) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(table, ": id ", id, " unavailable"));
    }
    prod->next_id = std::max(prod->next_id, id + 1);
  } else {
    id = prod->next_id++;
    row[prod->schema.id_column] = id;
  }
  prod->rows[id] = std::move(row);
  production_writes_.fetch_add(1);
  return id;
}

absl::StatusOr<std::vector<std::int64_t>>
StagingAwareStore::SeedStaticTestData(const std::string& table,
                                      std::vector<Row> rows) {
  const TableSchema* schema = FindSchema(table);
  if (schema == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  if (!schema->fake_label_column) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(table, " has no fake label column"));
  }
  for (auto& row : rows) {
    row[*schema->fake_label_column] = true;
    CND_RETURN_IF_ERROR(schema->ValidateRow(row));
  }
  std::vector<std::int64_t> ids;
  for (auto& row : rows) {
    auto id = LoadProductionRow(table, std::move(row));
    if (!id.ok()) return id.status();
    ids.push_back(*id);
  }
  return ids;
}

absl::StatusOr<std::size_t> StagingAwareStore::ProductViewCount(
    const std::string& table) const {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  std::lock_guard<std::mutex> lock(prod->mu);
  return static_cast<std::size_t>(
      std::count_if(prod->rows.begin(), prod->rows.end(), [&](const auto& kv) {
        return !IsFake(prod->schema, kv.second);
      }));
}

absl::StatusOr<std::size_t> StagingAwareStore::ProductionCount(
    const std::string& table) const {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  std::lock_guard<std::mutex> lock(prod->mu);
  return prod->rows.size();
}

absl::StatusOr<std::optional<Row>> StagingAwareStore::ReadProduction(
    const std::string& table, std::int64_t id) const {
  ProductionTable* prod = FindTable(table);
  if (prod == nullptr) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("unknown table ", table));
  }
  std::lock_guard<std::mutex> lock(prod->mu);
  if (auto it = prod->rows.find(id); it != prod->rows.end()) {
    return std::optional<Row>(it->second);
  }
  return std::optional<Row>();
}

std::shared_ptr<StagingDb> StagingAwareStore::CurrentClone() const {
  std::lock_guard<std::mutex> lock(clone_mu_);
  return current_;
}

std::optional<CloneReport> StagingAwareStore::LastReport() const {
  std::lock_guard<std::mutex> lock(clone_mu_);
  return last_report_;
}

std::optional<std::int64_t> StagingAwareStore::CurrentStagingDate() const {
  std::lock_guard<std::mutex> lock(clone_mu_);
  if (current_ == nullptr) return std::nullopt;
  return current_->date();
}

}  // namespace cnd::staging
