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

#include "cnd/mesh/executor.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "cnd/common/status.h"
#include "cnd/mesh/router.h"

namespace cnd::mesh {
namespace {

staging::Row GeneratedRow(const staging::TableSchema& schema,
                          const ComponentId& component,
                          const RequestContext& ctx) {
  staging::Row row;
  for (const auto& col : schema.columns) {
    if (col.name == schema.id_column) continue;
    if (schema.fake_label_column && col.name == *schema.fake_label_column) {
      // Data created by test traffic is labelled fake like static test data.
      row[col.name] = ctx.testing();
      continue;
    }
    switch (col.type) {
      case staging::ColumnType::kInt:
        row[col.name] = static_cast<std::int64_t>(ctx.entry_tick());
        break;
      case staging::ColumnType::kBool:
        row[col.name] = false;
        break;
      case staging::ColumnType::kString:
      case staging::ColumnType::kBlob:
        row[col.name] = absl::StrCat(component, ":", ctx.trace_id());
        break;
    }
  }
  return row;
}

class Walker {
 public:
  Walker(const EntryRoute& entry, const RequestContext& ctx,
         const MeshSnapshot& snapshot, staging::StagingAwareStore& store,
         Rng& rng, HopObserver* observer)
      : entry_(entry),
        ctx_(ctx),
        snapshot_(snapshot),
        store_(store),
        rng_(rng),
        observer_(observer) {}

  absl::Status Visit(const ComponentId& id) {
    const ComponentSpec* spec = snapshot_.topology->Find(id);
    if (spec == nullptr) {
      return MakeError(ErrorKind::kUnknownComponent,
                       absl::StrCat("unknown component ", id));
    }
    const TrafficRule* rule = snapshot_.RuleFor(id);
    if (rule == nullptr) {
      return MakeError(ErrorKind::kNoLiveDeploy,
                       absl::StrCat("no traffic rule for ", id));
    }
    auto deploy = ResolveRoute(id, ctx_, *rule, rng_);
    if (!deploy.ok()) return deploy.status();
    const DeployInfo* info = snapshot_.FindDeploy(*deploy);
    if (info == nullptr) {
      return MakeError(ErrorKind::kNoLiveDeploy,
                       absl::StrCat("rule for ", id, " names missing deploy ",
                                    *deploy));
    }

    const VersionBehavior& b = info->behavior;
    Hop hop;
    hop.component = id;
    hop.deploy = info->id;
    const double u_latency = rng_.NextUnit();
    const double u_error = rng_.NextUnit();
    hop.latency_ms = std::max(
        0.0, b.latency_mean_ms + b.latency_jitter_ms * (2.0 * u_latency - 1.0));
    if (b.FaultsOn(entry_.path) && u_error < b.error_prob) {
      hop.outcome = Outcome::kError;
      hop.error = "injected fault";
    } else if (!spec->tables.empty()) {
      TouchStores(*spec, *info, hop);
    }

    result_.response.markers.push_back({id, info->id, b.marker});
    result_.response.latency_ms += hop.latency_ms;
    const bool failed = hop.outcome == Outcome::kError;
    if (failed) result_.response.status = Outcome::kError;
    if (observer_ != nullptr) observer_->OnHop(ctx_, hop);
    result_.trace.hops.push_back(std::move(hop));
    if (failed) return absl::OkStatus();

    for (const auto& next : spec->downstream) {
      CND_RETURN_IF_ERROR(Visit(next));
    }
    return absl::OkStatus();
  }

  ExecutionResult Take() && { return std::move(result_); }
  void SetTraceId(std::string id) { result_.trace.trace_id = std::move(id); }

 private:
  void TouchStores(const ComponentSpec& spec, const DeployInfo& info,
                   Hop& hop) {
    hop.store = ctx_.staging() ? StoreUse::kStaging : StoreUse::kProduction;
    auto handle = store_.ResolveStore(ctx_, {spec.id, info.state});
    if (!handle.ok()) {
      hop.outcome = Outcome::kError;
      hop.error = std::string(handle.status().message());
      return;
    }
    for (const auto& table : spec.tables) {
      absl::Status st;
      if (spec.Writes(table)) {
        const staging::TableSchema* schema = store_.FindSchema(table);
        auto id = store_.Insert(*handle, table,
                                GeneratedRow(*schema, spec.id, ctx_));
        if (id.ok()) hop.writes.emplace_back(table, *id);
        st = id.status();
      } else {
        st = store_.Read(*handle, table, 1).status();
      }
      if (!st.ok()) {
        hop.outcome = Outcome::kError;
        hop.error = std::string(st.message());
        return;
      }
    }
  }

  const EntryRoute& entry_;
  const RequestContext& ctx_;
  const MeshSnapshot& snapshot_;
  staging::StagingAwareStore& store_;
  Rng& rng_;
  HopObserver* observer_;
  ExecutionResult result_;
};

}  // namespace

std::string StoreUseName(StoreUse use) {
  switch (use) {
    case StoreUse::kNone:
      return "none";
    case StoreUse::kProduction:
      return "production";
    case StoreUse::kStaging:
      return "staging";
  }
  return "none";
}

std::string OutcomeName(Outcome outcome) {
  return outcome == Outcome::kOk ? "ok" : "error";
}

absl::StatusOr<ExecutionResult> ExecuteRequest(const EntryRoute& entry,
                                               const RequestContext& ctx,
                                               const MeshSnapshot& snapshot,
                                               staging::StagingAwareStore& store,
                                               Rng& rng,
                                               HopObserver* observer) {
  Walker walker(entry, ctx, snapshot, store, rng, observer);
  walker.SetTraceId(ctx.trace_id());
  CND_RETURN_IF_ERROR(walker.Visit(entry.component));
  ExecutionResult result = std::move(walker).Take();
  if (observer != nullptr) observer->OnRequest(ctx, result.response.status);
  return result;
}

std::string FormatTrace(const Trace& trace) {
  std::string out = trace.trace_id;
  for (const auto& hop : trace.hops) {
    absl::StrAppend(&out, " ", hop.component, "@", hop.deploy, "/",
                    StoreUseName(hop.store), "/",
                    absl::StrFormat("%.3f", hop.latency_ms), "/",
                    OutcomeName(hop.outcome));
  }
  return out;
}

}  // namespace cnd::mesh
