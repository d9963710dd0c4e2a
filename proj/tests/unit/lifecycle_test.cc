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

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "cnd/common/rng.h"
#include "cnd/common/status.h"
#include "cnd/lifecycle/audit.h"
#include "cnd/lifecycle/canary.h"
#include "cnd/lifecycle/deploy.h"
#include "cnd/lifecycle/error_budget.h"
#include "cnd/lifecycle/release_manager.h"
#include "gtest/gtest.h"
#include "support/lifecycle_fuzz.h"
#include "support/oracles.h"
#include "support/world.h"

namespace cnd::lifecycle {
namespace {

using S = DeployState;
using testkit::LifecycleWorld;
using testkit::MakeLifecycleWorld;
using testkit::MakeTestedDeploy;
using testkit::SpecFor;

constexpr S kAllStates[] = {S::kPreproduction, S::kTesting,  S::kTested,
                            S::kTestFailed,    S::kCanary,   S::kShifting,
                            S::kReleased,      S::kAborted,  S::kRetired};

CanaryVerdict Pass() {
  CanaryVerdict v;
  v.pass = true;
  return v;
}
CanaryVerdict Fail(VerdictReason r) {
  CanaryVerdict v;
  v.reasons = {r};
  return v;
}

harness::MetricsWindow Win(std::uint64_t n, std::uint64_t errors,
                           double latency_ms) {
  harness::MetricsWindow w;
  w.n = n;
  w.errors = errors;
  for (std::uint64_t i = 0; i < n; ++i) w.latency.Add(latency_ms);
  return w;
}

int WeightIn(const mesh::TrafficRule& rule, const DeployId& d) {
  for (const auto& e : rule.entries) {
    if (e.deploy == d) return e.weight;
  }
  return 0;
}

TEST(Transitions, ExhaustiveTable) {
  // Written out by hand; any change to the lifecycle must update this list.
  const std::set<std::pair<S, S>> legal = {
      {S::kPreproduction, S::kTesting}, {S::kPreproduction, S::kRetired},
      {S::kTesting, S::kTested},        {S::kTesting, S::kTestFailed},
      {S::kTested, S::kCanary},         {S::kCanary, S::kShifting},
      {S::kCanary, S::kAborted},        {S::kShifting, S::kReleased},
      {S::kShifting, S::kAborted},      {S::kReleased, S::kRetired},
      {S::kReleased, S::kAborted},      {S::kAborted, S::kTesting},
      {S::kAborted, S::kRetired},       {S::kAborted, S::kReleased}};
  for (S from : kAllStates) {
    for (S to : kAllStates) {
      EXPECT_EQ(IsLegalTransition(from, to), legal.count({from, to}) == 1)
          << DeployStateName(from) << " -> " << DeployStateName(to);
    }
  }
  // Canary is reachable only from Tested.
  for (S from : kAllStates) {
    if (from != S::kTested) {
      EXPECT_FALSE(IsLegalTransition(from, S::kCanary));
    }
  }
}

TEST(CreateDeploy, StartsInPreproduction) {
  auto w = MakeLifecycleWorld();
  auto rec = w->rm->CreateDeploy(SpecFor("svc-a", "v42", "main"), "dev");
  ASSERT_TRUE(rec.ok());
  EXPECT_EQ(rec->state, S::kPreproduction);
  EXPECT_EQ(rec->weight, 0);
  EXPECT_EQ(rec->test_status, TestStatus::kUntested);
  const auto last = w->audit.Entries().back();
  EXPECT_EQ(last.deploy, rec->id);
  EXPECT_EQ(last.commit, "c0ffeev42");
  auto other = w->rm->CreateDeploy(SpecFor("svc-a", "v42", "main"), "dev");
  EXPECT_NE(other->id, rec->id);
  EXPECT_EQ(w->rm->Rule("svc-a")->entries.size(), 1u);
  EXPECT_TRUE(HasErrorKind(w->rm->CreateDeploy(SpecFor("nope", "v1"), "dev").status(),
                           ErrorKind::kUnknownComponent));
}

TEST(RecordTestResult, PassAndFail) {
  auto w = MakeLifecycleWorld();
  auto a = *w->rm->CreateDeploy(SpecFor("svc-a", "v1"), "dev");
  auto b = *w->rm->CreateDeploy(SpecFor("svc-a", "v2"), "dev");
  EXPECT_EQ(w->rm->RecordTestResult(a.id, testkit::PassingSummary(), "ci")->state,
            S::kTested);
  auto failed = w->rm->RecordTestResult(b.id, testkit::FailingSummary(), "ci");
  EXPECT_EQ(failed->state, S::kTestFailed);
  EXPECT_EQ(failed->test_status, TestStatus::kFailed);
  EXPECT_TRUE(HasErrorKind(w->rm->StartCanary(b.id, 10, "dev").status(),
                           ErrorKind::kNotTested));
  // No suite results means not passed.
  auto c = *w->rm->CreateDeploy(SpecFor("svc-a", "v3"), "dev");
  EXPECT_EQ(w->rm->RecordTestResult(c.id, {"unit", 0, 0}, "ci")->state, S::kTestFailed);
  EXPECT_TRUE(HasErrorKind(
      w->rm->RecordTestResult(a.id, testkit::PassingSummary(), "ci").status(),
      ErrorKind::kIllegalTransition));
}

TEST(RecordTestResult, RetestAfterAbort) {
  auto w = MakeLifecycleWorld();
  const auto d = MakeTestedDeploy(*w, "svc-a", "v1");
  ASSERT_TRUE(w->rm->StartCanary(d, 10, "dev").ok());
  ASSERT_TRUE(w->rm->Abort(d, "dev").ok());
  auto again = w->rm->RecordTestResult(d, testkit::PassingSummary(), "ci");
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again->state, S::kTested);
  EXPECT_TRUE(w->rm->StartCanary(d, 1, "dev").ok());
  EXPECT_TRUE(HasErrorKind(
      w->rm->RecordTestResult(d, testkit::PassingSummary(), "ci").status(),
      ErrorKind::kIllegalTransition));
}

TEST(StartCanary, SplitsTrafficAndEnforcesGate) {
  auto w = MakeLifecycleWorld();
  const auto d = MakeTestedDeploy(*w, "svc-a", "v1");
  auto rule = w->rm->StartCanary(d, 1, "dev");
  ASSERT_TRUE(rule.ok());
  EXPECT_EQ(WeightIn(*rule, "svc-a-r0"), 99);
  EXPECT_EQ(WeightIn(*rule, d), 1);
  EXPECT_EQ(w->rm->Find(d)->state, S::kCanary);
  EXPECT_EQ(w->rm->Find(d)->weight, 1);

  auto untested = *w->rm->CreateDeploy(SpecFor("svc-b", "v1"), "dev");
  EXPECT_TRUE(HasErrorKind(w->rm->StartCanary(untested.id, 10, "dev").status(),
                           ErrorKind::kNotTested));
  auto feature = *w->rm->CreateDeploy(SpecFor("svc-b", "v2", "feature-x"), "dev");
  ASSERT_TRUE(w->rm->RecordTestResult(feature.id, testkit::PassingSummary(), "ci").ok());
  EXPECT_TRUE(HasErrorKind(w->rm->StartCanary(feature.id, 10, "dev").status(),
                           ErrorKind::kNotMainBranch));
  const auto ok = MakeTestedDeploy(*w, "svc-b", "v3");
  EXPECT_TRUE(HasErrorKind(w->rm->StartCanary(ok, 5, "dev").status(),
                           ErrorKind::kPercentNotAllowed));
  EXPECT_EQ(w->rm->Rule("svc-b")->entries.size(), 1u);
  // One in-flight deploy per component.
  const auto second = MakeTestedDeploy(*w, "svc-a", "v2");
  EXPECT_FALSE(w->rm->StartCanary(second, 10, "dev").ok());
}

TEST(EvaluateCanary, IdenticalWindowsPass) {
  auto v = EvaluateCanary(Win(5000, 5, 20), Win(5000, 5, 20), {});
  EXPECT_TRUE(v.pass);
  EXPECT_TRUE(v.reasons.empty());
  EXPECT_EQ(v.z, 0);
}

TEST(EvaluateCanary, ErrorRegressionMatchesHandComputedZ) {
  CanaryPolicy policy;
  policy.significance = 3;
  policy.error_delta_abs = 0.005;
  auto v = EvaluateCanary(Win(1000, 50, 20), Win(1000, 1, 20), policy);
  const long double z = oracle::PooledZ(1000, 50, 1000, 1);
  EXPECT_NEAR(v.z, static_cast<double>(z), 1e-9);
  EXPECT_NEAR(v.z, 7.0, 0.2);
  EXPECT_FALSE(v.pass);
  EXPECT_TRUE(v.Has(VerdictReason::kErrorRateRegression));
  EXPECT_FALSE(v.Has(VerdictReason::kLatencyRegression));
}

TEST(EvaluateCanary, ZAgreesWithOracleEverywhere) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const auto n1 = 1 + rng.Below(100000), n2 = 1 + rng.Below(100000);
    const auto e1 = rng.Below(n1 + 1), e2 = rng.Below(n2 + 1);
    const double z = TwoProportionZ(n1, e1, n2, e2);
    const long double want = oracle::PooledZ(n1, e1, n2, e2);
    EXPECT_NEAR(z, static_cast<double>(want), 1e-9 * (1 + std::fabs(z)));
  }
}

TEST(EvaluateCanary, SmallDeltaIsNotARegression) {
  // Significant but below the absolute floor.
  auto v = EvaluateCanary(Win(2000000, 2200, 20), Win(2000000, 1000, 20), {});
  EXPECT_GT(v.z, 3);
  EXPECT_TRUE(v.pass);
}

TEST(EvaluateCanary, LatencyRegression) {
  auto v = EvaluateCanary(Win(1000, 0, 30), Win(1000, 0, 20), {});
  EXPECT_FALSE(v.pass);
  EXPECT_TRUE(v.Has(VerdictReason::kLatencyRegression));
  EXPECT_TRUE(EvaluateCanary(Win(1000, 0, 23.5), Win(1000, 0, 20), {}).pass);
}

TEST(EvaluateCanary, FailsClosedOnFewSamples) {
  auto v = EvaluateCanary(Win(50, 0, 10), Win(5000, 0, 10), {});
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.reasons, std::vector<VerdictReason>{VerdictReason::kInsufficientSamples});
  EXPECT_FALSE(v.Regressed());
  EXPECT_FALSE(EvaluateCanary(Win(5000, 0, 10), Win(99, 0, 10), {}).pass);
}

class ShiftTest : public ::testing::Test {
 protected:
  void SetUp() override {
    w_ = MakeLifecycleWorld();
    d_ = MakeTestedDeploy(*w_, "svc-a", "v1");
    ASSERT_TRUE(w_->rm->StartCanary(d_, 10, "dev").ok());
  }
  absl::StatusOr<mesh::TrafficRule> Step(const CanaryVerdict& v = Pass()) {
    w_->clock.Advance(w_->rm->config().shift.hold_ticks);
    return w_->rm->AdvanceShift(d_, v, "dev");
  }
  std::unique_ptr<LifecycleWorld> w_;
  DeployId d_;
};

TEST_F(ShiftTest, AdvancesThroughSchedule) {
  auto r = Step();
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(WeightIn(*r, d_), 25);
  EXPECT_EQ(WeightIn(*r, "svc-a-r0"), 75);
  EXPECT_EQ(w_->rm->Find(d_)->state, S::kShifting);
  for (int want : {50, 75, 100}) {
    r = Step();
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(WeightIn(*r, d_), want);
    EXPECT_EQ(r->TotalWeight(), 100);
  }
  EXPECT_TRUE(HasErrorKind(Step().status(), ErrorKind::kScheduleExhausted));
  EXPECT_EQ(w_->rm->Find(d_)->state, S::kShifting);
}

TEST_F(ShiftTest, HoldMustElapse) {
  w_->clock.Advance(w_->rm->config().shift.hold_ticks - 1);
  EXPECT_TRUE(HasErrorKind(w_->rm->AdvanceShift(d_, Pass(), "dev").status(),
                           ErrorKind::kHoldNotElapsed));
  w_->clock.Advance(1);
  EXPECT_TRUE(w_->rm->AdvanceShift(d_, Pass(), "dev").ok());
}

TEST_F(ShiftTest, RegressionAtFiftyAutoAborts) {
  ASSERT_TRUE(Step().ok());
  ASSERT_TRUE(Step().ok());
  EXPECT_EQ(w_->rm->Find(d_)->weight, 50);
  EXPECT_TRUE(HasErrorKind(Step(Fail(VerdictReason::kErrorRateRegression)).status(),
                           ErrorKind::kMetricsRegression));
  EXPECT_EQ(w_->rm->Find(d_)->state, S::kAborted);
  EXPECT_EQ(w_->rm->Find(d_)->weight, 0);
  EXPECT_EQ(WeightIn(*w_->rm->Rule("svc-a"), "svc-a-r0"), 100);
}

TEST_F(ShiftTest, InsufficientSamplesHoldsPosition) {
  EXPECT_TRUE(HasErrorKind(Step(Fail(VerdictReason::kInsufficientSamples)).status(),
                           ErrorKind::kInsufficientSamples));
  EXPECT_EQ(w_->rm->Find(d_)->state, S::kCanary);
  EXPECT_EQ(w_->rm->Find(d_)->weight, 10);
}

TEST_F(ShiftTest, AbortFromCanaryAndShifting) {
  const auto before = w_->rm->Rule("svc-a")->version;
  auto r = w_->rm->Abort(d_, "dev");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(WeightIn(*r, "svc-a-r0"), 100);
  EXPECT_EQ(WeightIn(*r, d_), 0);
  EXPECT_EQ(r->version, before + 1);

  const auto d2 = MakeTestedDeploy(*w_, "svc-a", "v2");
  ASSERT_TRUE(w_->rm->StartCanary(d2, 10, "dev").ok());
  d_ = d2;
  for (int i = 0; i < 3; ++i) ASSERT_TRUE(Step().ok());
  EXPECT_EQ(w_->rm->Find(d2)->weight, 75);
  r = w_->rm->Abort(d2, "dev");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(WeightIn(*r, "svc-a-r0"), 100);
  EXPECT_TRUE(HasErrorKind(w_->rm->Abort("svc-a-r0", "dev").status(),
                           ErrorKind::kIllegalTransition));
  EXPECT_TRUE(HasErrorKind(w_->rm->Abort(d2, "dev").status(),
                           ErrorKind::kIllegalTransition));
}

TEST_F(ShiftTest, FinalizeRequiresFullWeight) {
  for (int i = 0; i < 3; ++i) ASSERT_TRUE(Step().ok());
  EXPECT_TRUE(HasErrorKind(w_->rm->FinalizeRelease(d_, "dev").status(),
                           ErrorKind::kNotAtFullWeight));
  ASSERT_TRUE(Step().ok());
  auto rec = w_->rm->FinalizeRelease(d_, "dev");
  ASSERT_TRUE(rec.ok());
  EXPECT_EQ(rec->state, S::kReleased);
  EXPECT_EQ(w_->rm->ReleasedOf("svc-a"), d_);
  EXPECT_EQ(w_->rm->PredecessorOf("svc-a"), "svc-a-r0");
  EXPECT_TRUE(w_->rm->CheckInvariants().ok());
}

class ReleasedTest : public ShiftTest {
 protected:
  void SetUp() override {
    ShiftTest::SetUp();
    for (int i = 0; i < 4; ++i) ASSERT_TRUE(Step().ok());
    ASSERT_TRUE(w_->rm->FinalizeRelease(d_, "dev").ok());
  }
};

TEST_F(ReleasedTest, RollbackWithinRetention) {
  const auto before = w_->rm->Rule("svc-a")->version;
  const auto audit_before = w_->audit.size();
  auto r = w_->rm->Rollback("svc-a", "oncall");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->version, before + 1);
  EXPECT_EQ(r->entries.size(), 1u);
  EXPECT_EQ(WeightIn(*r, "svc-a-r0"), 100);
  EXPECT_EQ(w_->rm->ReleasedOf("svc-a"), "svc-a-r0");
  EXPECT_EQ(w_->rm->Find(d_)->state, S::kAborted);
  const auto entries = w_->audit.Entries();
  bool emergency = false;
  for (std::size_t i = audit_before; i < entries.size(); ++i) {
    if (entries[i].detail.find("emergency") != std::string::npos) emergency = true;
  }
  EXPECT_TRUE(emergency);
  // Chain length one.
  EXPECT_TRUE(HasErrorKind(w_->rm->Rollback("svc-a", "oncall").status(),
                           ErrorKind::kNoPredecessor));
  EXPECT_TRUE(w_->rm->CheckInvariants().ok());
}

TEST_F(ReleasedTest, PredecessorRetiresAfterRetention) {
  const Tick retention = w_->rm->config().retention_ticks;
  w_->clock.Advance(retention - 1);
  EXPECT_EQ(w_->rm->ProcessDue(), 0);
  w_->clock.Advance(1);
  EXPECT_EQ(w_->rm->ProcessDue(), 1);
  EXPECT_EQ(w_->rm->Find("svc-a-r0")->state, S::kRetired);
  EXPECT_TRUE(HasErrorKind(w_->rm->Rollback("svc-a", "oncall").status(),
                           ErrorKind::kNoPredecessor));
}

TEST(Rollback, NothingToRollBackTo) {
  auto w = MakeLifecycleWorld();
  EXPECT_TRUE(HasErrorKind(w->rm->Rollback("svc-a", "oncall").status(),
                           ErrorKind::kNoPredecessor));
}

TEST(ErrorBudget, AllowedMinutesAreExact) {
  auto slo = Slo::FromFraction(0.9995, 30 * kTicksPerDay);
  ASSERT_TRUE(slo.ok());
  const auto budget = BudgetFor(*slo, 0);
  const auto want = oracle::AllowedErrorTicks(9995, 10000, 30 * kTicksPerDay);
  EXPECT_EQ(want.num, 1296);
  EXPECT_EQ(want.den, 1);
  EXPECT_EQ(budget.allowed_numerator * want.den, want.num * kPpb);
  EXPECT_NEAR(budget.allowed_error_minutes(), 21.6, 1e-9);
  EXPECT_FALSE(budget.depleted);
  EXPECT_EQ(budget.consumed_ticks, 0);
}

TEST(ErrorBudget, ArithmeticMatchesRationalOracle) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t num = static_cast<std::int64_t>(rng.Below(10000));
    const Tick window = 1 + static_cast<Tick>(rng.Below(90 * kTicksPerDay));
    auto slo = Slo::FromFraction((num + 1) / 10000.0, window);
    ASSERT_TRUE(slo.ok());
    const auto want = oracle::AllowedErrorTicks(num + 1, 10000, window);
    const auto budget = BudgetFor(*slo, 0);
    EXPECT_EQ(static_cast<__int128>(budget.allowed_numerator) * want.den,
              static_cast<__int128>(want.num) * kPpb);
  }
}

TEST(ErrorBudget, SeriesConsumption) {
  auto slo = *Slo::FromFraction(0.9995, 30 * kTicksPerDay);
  std::vector<harness::TickStats> series(1000);
  for (std::size_t i = 0; i < series.size(); ++i) {
    series[i] = {static_cast<Tick>(i), 10000, 0};
  }
  EXPECT_EQ(CheckErrorBudget(series, slo).consumed_ticks, 0);
  series[3].errors = 5;   // exactly at threshold: not a breach
  series[4].errors = 6;   // above
  series[5].errors = 10000;
  EXPECT_EQ(CheckErrorBudget(series, slo).consumed_ticks, 2);
  EXPECT_TRUE(CheckErrorBudget({}, slo).consumed_ticks == 0);
}

TEST(ErrorBudget, DepletionBlocksHighRiskCanaries) {
  LifecycleConfig config;
  config.high_risk = {"gateway"};
  auto w = MakeLifecycleWorld(config);
  const auto budget = BudgetFor(*Slo::FromFraction(0.9995, 30 * kTicksPerDay),
                                22 * kTicksPerMinute);
  EXPECT_TRUE(budget.depleted);
  w->rm->SetErrorBudget(budget);
  const auto gw = MakeTestedDeploy(*w, "gateway", "v2");
  EXPECT_TRUE(HasErrorKind(w->rm->StartCanary(gw, 10, "dev").status(),
                           ErrorKind::kBudgetDepleted));
  const auto a = MakeTestedDeploy(*w, "svc-a", "v2");
  EXPECT_TRUE(w->rm->StartCanary(a, 10, "dev").ok());
  w->rm->SetErrorBudget(BudgetFor(budget.slo, 21 * kTicksPerMinute));
  EXPECT_TRUE(w->rm->StartCanary(gw, 10, "dev").ok());
}

TEST(Audit, LineRoundTrip) {
  AuditEntry e{42, "a\tb", "transition", "svc-a", "svc-a-3", "abc",
               "from=Tested;to=Canary;note=line1\nline2\\"};
  auto back = ParseAuditLine(FormatAuditLine(e));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, e);
  EXPECT_EQ(FormatAuditLine(e).find('\n'), std::string::npos);
  EXPECT_FALSE(ParseAuditLine("too\tfew").ok());
  EXPECT_EQ(DetailValue(e, "to"), std::optional<std::string>("Canary"));
  EXPECT_FALSE(DetailValue(e, "missing").has_value());
}

TEST(Audit, FileMirrorAndReplay) {
  const auto path = std::filesystem::temp_directory_path() / "cnd_audit_test.tsv";
  std::filesystem::remove(path);
  {
    auto log = AuditLog::OpenFile(path);
    ASSERT_TRUE(log.ok());
    VirtualClock clock;
    auto rm = *ReleaseManager::Create(testkit::DemoTopology(), {}, &clock, log->get());
    ASSERT_TRUE(rm->Bootstrap("svc-a-r0", SpecFor("svc-a", "r0"), "setup").ok());
    auto d = *rm->CreateDeploy(SpecFor("svc-a", "v1"), "dev");
    ASSERT_TRUE(rm->RecordTestResult(d.id, testkit::PassingSummary(), "ci").ok());
    ASSERT_TRUE(rm->StartCanary(d.id, 10, "dev").ok());
    ASSERT_TRUE(rm->Abort(d.id, "dev").ok());
  }
  auto entries = ReadAuditFile(path);
  ASSERT_TRUE(entries.ok());
  auto replay = ReplayAudit(*entries);
  ASSERT_TRUE(replay.ok()) << replay.status();
  EXPECT_EQ(replay->states.at("svc-a-r0"), S::kReleased);
  std::filesystem::remove(path);
}

TEST(Audit, ReplayRejectsInconsistentLogs) {
  std::vector<AuditEntry> log = {
      {0, "x", "transition", "svc-a", "d1", "", "from=Tested;to=Released"}};
  EXPECT_FALSE(ReplayAudit(log).ok());
  log = {{0, "x", "create", "svc-a", "d1", "", "to=Preproduction"},
         {1, "x", "transition", "svc-a", "d1", "", "from=Testing;to=Tested"}};
  EXPECT_FALSE(ReplayAudit(log).ok());
}

TEST(GateFuzz, TenThousandSequences) {
  testkit::FuzzStats stats;
  for (std::uint64_t s = 0; s < 10000; ++s) testkit::FuzzLifecycle(s, 30, stats);
  EXPECT_EQ(stats.violations, 0u);
  EXPECT_EQ(stats.bad_rules, 0u);
  EXPECT_GT(stats.gate_rejections, 1000u);
  EXPECT_GT(stats.rule_revisions, 30000u);
}

TEST(Invariants, HappyPathKeepsOneRelease) {
  auto w = MakeLifecycleWorld();
  for (int round = 0; round < 5; ++round) {
    const auto d = MakeTestedDeploy(*w, "svc-a", "v" + std::to_string(round));
    ASSERT_TRUE(w->rm->StartCanary(d, 10, "dev").ok());
    for (int i = 0; i < 4; ++i) {
      w->clock.Advance(kTicksPerHour);
      ASSERT_TRUE(w->rm->AdvanceShift(d, Pass(), "dev").ok());
      ASSERT_TRUE(w->rm->CheckInvariants().ok());
    }
    ASSERT_TRUE(w->rm->FinalizeRelease(d, "dev").ok());
    int released = 0;
    for (const auto& r : w->rm->Deploys("svc-a")) released += r.state == S::kReleased;
    EXPECT_EQ(released, 1);
    w->clock.Advance(7 * kTicksPerHour);
    w->rm->ProcessDue();
  }
}

}  // namespace
}  // namespace cnd::lifecycle
