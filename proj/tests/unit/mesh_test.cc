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

#include <algorithm>
#include <set>
#include <sstream>

#include "cnd/common/hash.h"
#include "cnd/common/rng.h"
#include "cnd/common/status.h"
#include "cnd/harness/metrics.h"
#include "cnd/mesh/annotation.h"
#include "cnd/mesh/context.h"
#include "cnd/mesh/executor.h"
#include "cnd/mesh/router.h"
#include "gtest/gtest.h"
#include "support/oracles.h"
#include "support/world.h"

namespace cnd {
namespace {

using mesh::RoutingAnnotation;
using testkit::MakeLifecycleWorld;

RoutingAnnotation RandomAnnotation(Rng& rng) {
  static const char* kComponents[] = {"gateway", "svc-a", "svc-b", "svc-c",
                                      "web-app", "nl-c",  "x.y_z-1"};
  RoutingAnnotation a;
  const int n = static_cast<int>(rng.Below(5));
  for (int i = 0; i < n; ++i) {
    a.overrides[kComponents[rng.Below(7)]] = "d" + std::to_string(rng.Below(1000));
  }
  a.staging = rng.Below(2) == 1;
  a.issued_at = static_cast<Tick>(rng.Below(1u << 30));
  a.nonce = rng.Next();
  return a;
}

TEST(Annotation, EncodeDecodeRoundTripsRandomAnnotations) {
  Rng rng(11);
  const auto key = testkit::TestKey();
  for (int i = 0; i < 1000; ++i) {
    const RoutingAnnotation a = RandomAnnotation(rng);
    auto decoded = mesh::DecodeAnnotation(mesh::EncodeAnnotation(a));
    ASSERT_TRUE(decoded.ok()) << decoded.status();
    EXPECT_EQ(*decoded, a);
    const auto signed_a = mesh::SignAnnotation(a, key);
    auto wire = mesh::SignedAnnotation::FromWire(signed_a.ToWire());
    ASSERT_TRUE(wire.ok());
    EXPECT_EQ(*wire, signed_a);
    EXPECT_TRUE(mesh::VerifyTag(*wire, key));
  }
}

TEST(Annotation, EncodingIsCanonical) {
  RoutingAnnotation a;
  a.overrides["svc-b"] = "d2";
  a.overrides["svc-a"] = "d1";
  a.staging = true;
  a.nonce = 7;
  RoutingAnnotation b;
  b.staging = true;
  b.nonce = 7;
  b.overrides["svc-a"] = "d1";
  b.overrides["svc-b"] = "d2";
  EXPECT_EQ(mesh::EncodeAnnotation(a), mesh::EncodeAnnotation(b));
  const auto key = testkit::TestKey();
  EXPECT_EQ(mesh::SignAnnotation(a, key), mesh::SignAnnotation(b, key));
  // Overrides appear sorted by component in the payload.
  const std::string payload = mesh::EncodeAnnotation(a);
  EXPECT_LT(payload.find("svc-a"), payload.find("svc-b"));
}

TEST(Annotation, DecodeRejectsNonCanonicalInput) {
  RoutingAnnotation a;
  a.overrides["svc-a"] = "d1";
  a.overrides["svc-b"] = "d2";
  a.nonce = 7;
  const std::string payload = mesh::EncodeAnnotation(a);
  auto swap = [&](const std::string& from, const std::string& to) {
    std::string p = payload;
    const auto at = p.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return p.replace(at, from.size(), to);
  };
  EXPECT_TRUE(mesh::DecodeAnnotation(payload).ok());
  EXPECT_FALSE(mesh::DecodeAnnotation(swap("svc-a:d1,svc-b:d2", "svc-b:d2,svc-a:d1")).ok());
  EXPECT_FALSE(mesh::DecodeAnnotation(swap("nonce=7", "nonce=07")).ok());
  EXPECT_FALSE(mesh::DecodeAnnotation(swap("staging=0", "staging=2")).ok());
  EXPECT_FALSE(mesh::DecodeAnnotation(payload + ";extra=1").ok());
  EXPECT_FALSE(mesh::DecodeAnnotation("").ok());
}

TEST(Annotation, TagIsAtLeast128Bits) {
  const auto s = mesh::SignAnnotation({}, testkit::TestKey());
  EXPECT_GE(s.tag.size() * 8, 128u);
}

TEST(Annotation, EmptySecretRejected) {
  EXPECT_FALSE(mesh::SigningKey::Create("").ok());
}

TEST(Annotation, SingleByteTamperNeverVerifies) {
  Rng rng(2024);
  const auto key = testkit::TestKey();
  int accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    auto s = mesh::SignAnnotation(RandomAnnotation(rng), key);
    const std::size_t total = s.payload.size() + s.tag.size();
    const std::size_t pos = rng.Below(total);
    const auto flip = static_cast<char>(1 + rng.Below(255));
    if (pos < s.payload.size()) {
      s.payload[pos] = static_cast<char>(s.payload[pos] ^ flip);
    } else {
      s.tag[pos - s.payload.size()] =
          static_cast<char>(s.tag[pos - s.payload.size()] ^ flip);
    }
    if (mesh::VerifyTag(s, key)) ++accepted;
  }
  EXPECT_EQ(accepted, 0);
}

TEST(Annotation, WrongKeyFails) {
  auto other = mesh::SigningKey::Create("another-secret");
  ASSERT_TRUE(other.ok());
  const auto s = mesh::SignAnnotation({}, testkit::TestKey());
  EXPECT_FALSE(mesh::VerifyTag(s, *other));
}

TEST(Annotation, WireFormIsTwoUnpaddedBase64UrlParts) {
  RoutingAnnotation a;
  a.overrides["svc-a"] = "d7";
  a.staging = true;
  const std::string wire = mesh::SignAnnotation(a, testkit::TestKey()).ToWire();
  ASSERT_EQ(std::count(wire.begin(), wire.end(), '.'), 1);
  for (char c : wire) {
    EXPECT_TRUE(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                c == '_' || c == '.')
        << c;
  }
  EXPECT_FALSE(mesh::SignedAnnotation::FromWire("abc").ok());
  EXPECT_FALSE(mesh::SignedAnnotation::FromWire("a=.b").ok());
}

class IngressTest : public ::testing::Test {
 protected:
  void SetUp() override {
    lifecycle::LifecycleConfig cfg;
    cfg.preproduction_ttl = 100;
    w_ = MakeLifecycleWorld(cfg);
    auto rec = w_->rm->CreateDeploy(testkit::SpecFor("svc-a", "v43"), "dev");
    ASSERT_TRUE(rec.ok());
    d7_ = rec->id;
  }
  absl::StatusOr<mesh::RequestContext> Verify(const RoutingAnnotation& a) {
    return mesh::VerifyIngress(mesh::SignAnnotation(a, key_), key_,
                               *w_->rm->Current(), "t", w_->clock.Now());
  }

  std::unique_ptr<testkit::LifecycleWorld> w_;
  mesh::SigningKey key_ = testkit::TestKey();
  DeployId d7_;
};

TEST_F(IngressTest, NoAnnotationIsProduction) {
  auto ctx = mesh::VerifyIngress(std::nullopt, key_, *w_->rm->Current(), "t", 0);
  ASSERT_TRUE(ctx.ok());
  EXPECT_FALSE(ctx->testing());
  EXPECT_FALSE(ctx->staging());
  EXPECT_TRUE(ctx->annotation().overrides.empty());
}

TEST_F(IngressTest, UnsignedZeroAnnotationNormalizesToProduction) {
  auto ctx = Verify({});
  ASSERT_TRUE(ctx.ok());
  EXPECT_FALSE(ctx->testing());
}

TEST_F(IngressTest, OverrideForcesStaging) {
  RoutingAnnotation a;
  a.overrides["svc-a"] = d7_;
  a.staging = false;
  auto ctx = Verify(a);
  ASSERT_TRUE(ctx.ok()) << ctx.status();
  EXPECT_TRUE(ctx->testing());
  EXPECT_TRUE(ctx->staging());
  ASSERT_NE(ctx->OverrideFor("svc-a"), nullptr);
  EXPECT_EQ(*ctx->OverrideFor("svc-a"), d7_);
}

TEST_F(IngressTest, BadSignatureRejectedNotDowngraded) {
  RoutingAnnotation a;
  a.overrides["svc-a"] = d7_;
  auto s = mesh::SignAnnotation(a, key_);
  s.tag[0] = static_cast<char>(s.tag[0] ^ 1);
  auto ctx = mesh::VerifyIngress(s, key_, *w_->rm->Current(), "t", 0);
  ASSERT_FALSE(ctx.ok());
  EXPECT_TRUE(HasErrorKind(ctx.status(), ErrorKind::kBadSignature));
}

TEST_F(IngressTest, TamperedWireNeverYieldsContext) {
  RoutingAnnotation a;
  a.overrides["svc-a"] = d7_;
  const std::string wire = mesh::SignAnnotation(a, key_).ToWire();
  Rng rng(5);
  static const std::string kAlphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.";
  for (int i = 0; i < 2000; ++i) {
    std::string t = wire;
    const std::size_t pos = rng.Below(t.size());
    char c;
    do {
      c = kAlphabet[rng.Below(kAlphabet.size())];
    } while (c == t[pos]);
    t[pos] = c;
    auto ctx = mesh::VerifyIngressWire(std::string_view(t), key_,
                                       *w_->rm->Current(), "t", 0);
    // Base64 may decode two spellings to the same bytes at the final
    // character; those still carry the original, valid annotation.
    if (ctx.ok()) {
      ASSERT_TRUE(ctx->testing());
      ASSERT_EQ(*ctx->OverrideFor("svc-a"), d7_);
    }
  }
}

TEST_F(IngressTest, UnknownAndWrongComponentOverridesRejected) {
  RoutingAnnotation a;
  a.overrides["svc-a"] = "d999";
  auto ctx = Verify(a);
  ASSERT_FALSE(ctx.ok());
  EXPECT_TRUE(HasErrorKind(ctx.status(), ErrorKind::kUnknownDeploy));
  EXPECT_NE(ctx.status().message().find("svc-a"), std::string_view::npos);

  RoutingAnnotation b;
  b.overrides["svc-b"] = d7_;  // d7 belongs to svc-a
  EXPECT_TRUE(HasErrorKind(Verify(b).status(), ErrorKind::kUnknownDeploy));
}

TEST_F(IngressTest, RetiredOverrideRejected) {
  w_->clock.Advance(101);
  ASSERT_GE(w_->rm->ProcessDue(), 1);
  ASSERT_EQ(w_->rm->Find(d7_)->state, DeployState::kRetired);
  RoutingAnnotation a;
  a.overrides["svc-a"] = d7_;
  EXPECT_TRUE(HasErrorKind(Verify(a).status(), ErrorKind::kUnknownDeploy));
}

TEST_F(IngressTest, TestingFlagSoundnessOverRandomAnnotations) {
  Rng rng(99);
  const auto snap = w_->rm->Current();
  std::vector<std::pair<ComponentId, DeployId>> live;
  for (const auto& [id, info] : snap->deploys) live.emplace_back(info.component, id);
  for (int i = 0; i < 2000; ++i) {
    RoutingAnnotation a;
    a.staging = rng.Below(2) == 1;
    const int n = static_cast<int>(rng.Below(3));
    for (int k = 0; k < n; ++k) {
      const auto& [c, d] = live[rng.Below(live.size())];
      a.overrides[c] = d;
    }
    auto ctx = Verify(a);
    ASSERT_TRUE(ctx.ok()) << ctx.status();
    EXPECT_EQ(ctx->testing(),
              ctx->staging() || !ctx->annotation().overrides.empty());
    if (!ctx->annotation().overrides.empty()) {
      EXPECT_TRUE(ctx->staging());
    }
    if (!ctx->testing()) {
      EXPECT_FALSE(ctx->staging());
      EXPECT_TRUE(ctx->annotation().overrides.empty());
    }
  }
}

mesh::TrafficRule Rule(std::vector<mesh::WeightedDeploy> entries) {
  return {"svc-a", std::move(entries), 1};
}

TEST(ResolveRoute, SingleEntryAlwaysWins) {
  Rng rng(1);
  const auto ctx = mesh::RequestContext::Production("t", 0);
  for (int i = 0; i < 1000; ++i) {
    auto d = mesh::ResolveRoute("svc-a", ctx, Rule({{"d1", 100}}), rng);
    ASSERT_TRUE(d.ok());
    EXPECT_EQ(*d, "d1");
  }
}

TEST(ResolveRoute, OverrideSupremacyOverRandomRules) {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const int w = static_cast<int>(rng.Below(101));
    RoutingAnnotation a;
    a.overrides["svc-a"] = "d9";
    const auto ctx = mesh::RequestContext::FromAnnotation("t", a, 0);
    auto d = mesh::ResolveRoute("svc-a", ctx, Rule({{"d1", w}, {"d2", 100 - w}}),
                                rng);
    ASSERT_TRUE(d.ok());
    EXPECT_EQ(*d, "d9");
  }
}

TEST(ResolveRoute, OverrideOnOtherComponentDoesNotApply) {
  Rng rng(3);
  RoutingAnnotation a;
  a.overrides["svc-b"] = "d9";
  const auto ctx = mesh::RequestContext::FromAnnotation("t", a, 0);
  auto d = mesh::ResolveRoute("svc-a", ctx, Rule({{"d1", 100}}), rng);
  ASSERT_TRUE(d.ok());
  EXPECT_EQ(*d, "d1");
}

class WeightedDraw : public ::testing::TestWithParam<int> {};

TEST_P(WeightedDraw, FractionWithinBand) {
  const int w = GetParam();
  constexpr std::uint64_t kDraws = 100000;
  const auto [lo3, hi3] = oracle::BinomialBand(w / 100.0, kDraws, 3);
  // The fixed +-0.01 band is wider than 3 sigma at this n.
  ASSERT_LT(hi3 - w / 100.0, 0.01);
  Rng rng(HashCombine(77, static_cast<std::uint64_t>(w)));
  const auto ctx = mesh::RequestContext::Production("t", 0);
  const auto rule = Rule({{"d1", w}, {"d2", 100 - w}});
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < kDraws; ++i) {
    if (*mesh::ResolveRoute("svc-a", ctx, rule, rng) == "d1") ++hits;
  }
  const double frac = static_cast<double>(hits) / kDraws;
  EXPECT_NEAR(frac, w / 100.0, 0.01);
}

INSTANTIATE_TEST_SUITE_P(Weights, WeightedDraw, ::testing::Values(1, 10, 50, 90));

TEST(ResolveRoute, ConsumesExactlyOneValue) {
  const auto prod = mesh::RequestContext::Production("t", 0);
  RoutingAnnotation a;
  a.overrides["svc-a"] = "d9";
  const auto test = mesh::RequestContext::FromAnnotation("t", a, 0);
  for (const auto* ctx : {&prod, &test}) {
    Rng used(5), reference(5);
    ASSERT_TRUE(mesh::ResolveRoute("svc-a", *ctx, Rule({{"d1", 60}, {"d2", 40}}),
                                   used)
                    .ok());
    reference.Next();
    EXPECT_EQ(used.Next(), reference.Next());
  }
}

TEST(ResolveRoute, AllZeroRuleIsNoLiveDeploy) {
  Rng rng(1);
  auto d = mesh::ResolveRoute("svc-a", mesh::RequestContext::Production("t", 0),
                              Rule({{"d1", 0}}), rng);
  EXPECT_TRUE(HasErrorKind(d.status(), ErrorKind::kNoLiveDeploy));
}

class ExecuteTest : public ::testing::Test {
 protected:
  void SetUp() override {
    w_ = MakeLifecycleWorld();
    store_ = std::make_unique<staging::StagingAwareStore>(testkit::DemoSchemas());
    ASSERT_TRUE(store_
                    ->LoadProductionRow("users", {{"email", "a@x"},
                                                  {"name", "A"},
                                                  {"zip", "1"},
                                                  {"password", "p"},
                                                  {"age", std::int64_t{30}},
                                                  {"locale", "en"},
                                                  {"is_fake", false}})
                    .ok());
    ASSERT_TRUE(store_->CloneStaging({}, 0, 1).ok());
  }

  absl::StatusOr<mesh::ExecutionResult> Run(const mesh::RequestContext& ctx,
                                            Rng& rng,
                                            const std::string& entry = "gateway") {
    return mesh::ExecuteRequest({entry, "/"}, ctx, *w_->rm->Current(), *store_,
                                rng);
  }

  std::map<std::string, std::vector<std::string>> Adjacency() const {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& s : testkit::DemoSpecs()) adj[s.id] = s.downstream;
    return adj;
  }

  std::unique_ptr<testkit::LifecycleWorld> w_;
  std::unique_ptr<staging::StagingAwareStore> store_;
};

TEST_F(ExecuteTest, ProductionWalkMatchesDagOracle) {
  Rng rng(1);
  auto r = Run(mesh::RequestContext::Production("t1", 0), rng);
  ASSERT_TRUE(r.ok()) << r.status();
  const auto order = oracle::DfsOrder(Adjacency(), "gateway");
  ASSERT_EQ(order.size(), 5u);
  ASSERT_EQ(r->trace.hops.size(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& hop = r->trace.hops[i];
    EXPECT_EQ(hop.component, order[i]);
    EXPECT_EQ(hop.deploy, *w_->rm->ReleasedOf(order[i]));
    const bool touches = order[i] != "gateway";
    EXPECT_EQ(hop.store,
              touches ? mesh::StoreUse::kProduction : mesh::StoreUse::kNone);
    EXPECT_EQ(hop.outcome, mesh::Outcome::kOk) << hop.error;
  }
  EXPECT_EQ(r->response.status, mesh::Outcome::kOk);
  ASSERT_EQ(r->response.markers.size(), 5u);
  EXPECT_EQ(r->response.markers[1].marker, "svc-a@r0");
}

TEST_F(ExecuteTest, FrontendBundleRoutesLikeAService) {
  Rng rng(1);
  auto r = Run(mesh::RequestContext::Production("t", 0), rng, "web-app");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->trace.hops.size(), 6u);
  EXPECT_EQ(r->response.markers[0].marker, "web-app@r0");
}

TEST_F(ExecuteTest, ErrorShortCircuitsDescendantsOnly) {
  auto b = testkit::SpecFor("svc-a", "r0").behavior;
  b.error_prob = 1.0;
  ASSERT_TRUE(w_->rm->InjectBehavior(*w_->rm->ReleasedOf("svc-a"), b).ok());
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    auto r = Run(mesh::RequestContext::Production("t", 0), rng);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->response.status, mesh::Outcome::kError);
    std::vector<std::string> comps;
    for (const auto& h : r->trace.hops) comps.push_back(h.component);
    // svc-a fails, its svc-c call is skipped, the svc-b branch still runs.
    EXPECT_EQ(comps, (std::vector<std::string>{"gateway", "svc-a", "svc-b", "svc-c"}));
    EXPECT_EQ(r->trace.hops[1].outcome, mesh::Outcome::kError);
  }
}

TEST_F(ExecuteTest, LatencyStaysWithinUniformBounds) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    auto r = Run(mesh::RequestContext::Production("t", 0), rng);
    for (const auto& h : r->trace.hops) {
      EXPECT_GE(h.latency_ms, 8.0);
      EXPECT_LE(h.latency_ms, 12.0);
    }
  }
}

TEST_F(ExecuteTest, StagingProbeUsesReleasesAndStagingStores) {
  RoutingAnnotation a;
  a.staging = true;
  const auto ctx = mesh::RequestContext::FromAnnotation("t", a, 0);
  const auto before = store_->production_writes();
  Rng rng(1);
  auto r = Run(ctx, rng);
  ASSERT_TRUE(r.ok());
  for (const auto& hop : r->trace.hops) {
    EXPECT_EQ(hop.deploy, *w_->rm->ReleasedOf(hop.component));
    if (hop.component != "gateway") {
      EXPECT_EQ(hop.store, mesh::StoreUse::kStaging);
    }
  }
  EXPECT_EQ(store_->production_writes(), before);
}

TEST_F(ExecuteTest, OverrideServesPreproductionDeployInStaging) {
  auto rec = w_->rm->CreateDeploy(testkit::SpecFor("svc-a", "v43"), "dev");
  ASSERT_TRUE(rec.ok());
  RoutingAnnotation a;
  a.overrides["svc-a"] = rec->id;
  const auto ctx = mesh::RequestContext::FromAnnotation("t", a, 0);
  Rng rng(1);
  auto r = Run(ctx, rng);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->trace.hops[1].deploy, rec->id);
  EXPECT_EQ(r->trace.hops[1].store, mesh::StoreUse::kStaging);
  EXPECT_EQ(r->trace.hops[1].outcome, mesh::Outcome::kOk);
  EXPECT_EQ(r->response.markers[1].marker, "svc-a@v43");
}

TEST_F(ExecuteTest, ProductionPurityOver10kRequests) {
  for (const char* c : {"svc-a", "svc-b", "svc-c", "gateway"}) {
    ASSERT_TRUE(w_->rm->CreateDeploy(testkit::SpecFor(c, "pre"), "dev").ok());
  }
  testkit::MakeTestedDeploy(*w_, "svc-c", "tested-only");
  Rng rng(10);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    auto r = Run(mesh::RequestContext::Production("p" + std::to_string(i), 0), rng);
    ASSERT_TRUE(r.ok());
    for (const auto& hop : r->trace.hops) {
      if (hop.deploy != *w_->rm->ReleasedOf(hop.component) ||
          hop.store == mesh::StoreUse::kStaging) {
        ++violations;
      }
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST_F(ExecuteTest, OwnedTableDeniesOtherProductionServices) {
  // Point svc-a at the payments table owned by svc-b through a scratch
  // store: production access from svc-a must fail, svc-b succeeds.
  auto handle_a = store_->ResolveStore(mesh::RequestContext::Production("t", 0),
                                       {"svc-a", DeployState::kReleased});
  ASSERT_TRUE(handle_a.ok());
  auto row = staging::Row{{"card", "4111"}, {"amount", std::int64_t{5}},
                          {"currency", "USD"}};
  EXPECT_TRUE(HasErrorKind(store_->Insert(*handle_a, "payments", row).status(),
                           ErrorKind::kAccessDenied));
  auto handle_b = store_->ResolveStore(mesh::RequestContext::Production("t", 0),
                                       {"svc-b", DeployState::kReleased});
  EXPECT_TRUE(store_->Insert(*handle_b, "payments", row).ok());
}

TEST(Preview, UrlRoundTripsThroughIngress) {
  auto w = MakeLifecycleWorld();
  auto rec = w->rm->CreateDeploy(testkit::SpecFor("svc-a", "v43"), "dev");
  const auto key = testkit::TestKey();
  auto url = mesh::PreviewUrl({rec->id}, key, *w->rm->Current(), 0, 1);
  ASSERT_TRUE(url.ok());
  EXPECT_EQ(url->rfind(mesh::kPreviewUrlPrefix, 0), 0u);
  auto ctx = mesh::VerifyIngressWire(mesh::PreviewToken(*url), key,
                                     *w->rm->Current(), "t", 0);
  ASSERT_TRUE(ctx.ok());
  EXPECT_TRUE(ctx->testing());
  EXPECT_EQ(*ctx->OverrideFor("svc-a"), rec->id);
}

TEST(Preview, EmptySetIsPureStagingProbe) {
  auto w = MakeLifecycleWorld();
  const auto key = testkit::TestKey();
  auto url = mesh::PreviewUrl({}, key, *w->rm->Current(), 0, 1);
  ASSERT_TRUE(url.ok());
  auto ctx = mesh::VerifyIngressWire(mesh::PreviewToken(*url), key,
                                     *w->rm->Current(), "t", 0);
  ASSERT_TRUE(ctx.ok());
  EXPECT_TRUE(ctx->testing());
  EXPECT_TRUE(ctx->staging());
  EXPECT_TRUE(ctx->annotation().overrides.empty());
}

TEST(Preview, UnknownAndRetiredDeploysRejected) {
  lifecycle::LifecycleConfig cfg;
  cfg.preproduction_ttl = 10;
  auto w = MakeLifecycleWorld(cfg);
  const auto key = testkit::TestKey();
  EXPECT_TRUE(HasErrorKind(
      mesh::PreviewUrl({"nope"}, key, *w->rm->Current(), 0, 1).status(),
      ErrorKind::kUnknownDeploy));
  auto rec = w->rm->CreateDeploy(testkit::SpecFor("svc-a", "v43"), "dev");
  auto url = mesh::PreviewUrl({rec->id}, key, *w->rm->Current(), 0, 1);
  ASSERT_TRUE(url.ok());
  w->clock.Advance(11);
  w->rm->ProcessDue();
  auto ctx = mesh::VerifyIngressWire(mesh::PreviewToken(*url), key,
                                     *w->rm->Current(), "t", 11);
  EXPECT_TRUE(HasErrorKind(ctx.status(), ErrorKind::kUnknownDeploy));
}

TEST(Trace, SameSeedGivesByteIdenticalTraceLog) {
  auto run = [](std::uint64_t seed) {
    std::ostringstream log;
    control::ControlOptions options;
    options.seed = seed;
    options.trace_log = &log;
    auto cp = testkit::MakePlane(testkit::LoadDefaultScenario(), options);
    EXPECT_TRUE(cp->Simulate(std::nullopt, 120).ok());
    return log.str();
  };
  const std::string a = run(42), b = run(42), c = run(43);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

}  // namespace
}  // namespace cnd
