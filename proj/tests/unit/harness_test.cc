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

#include <sstream>
#include <thread>

#include "cnd/common/rng.h"
#include "cnd/common/status.h"
#include "cnd/harness/events.h"
#include "cnd/harness/metrics.h"
#include "cnd/harness/suite.h"
#include "cnd/harness/traffic.h"
#include "gtest/gtest.h"
#include "support/oracles.h"
#include "support/world.h"

namespace cnd::harness {
namespace {

using control::ControlPlane;
using control::DeployRequest;

mesh::RequestContext OverrideCtx(const ComponentId& c, const DeployId& d,
                                 const std::string& trace) {
  mesh::RoutingAnnotation a;
  a.overrides[c] = d;
  return mesh::RequestContext::FromAnnotation(trace, a, 0);
}

control::ScenarioConfig WithReleasedBehavior(const ComponentId& c,
                                             double error_prob) {
  auto config = testkit::LoadDefaultScenario();
  for (auto& cc : config.components) {
    if (cc.spec.id == c) cc.release.spec.behavior.error_prob = error_prob;
  }
  return config;
}

DeployRequest Request(const ComponentId& c, const std::string& version) {
  DeployRequest r;
  r.component = c;
  r.version = version;
  return r;
}

const Suite& Core(ControlPlane& cp) { return cp.config().suites.at("core"); }

std::uint64_t Count(ControlPlane& cp, const std::string& table) {
  return *cp.store().ProductionCount(table);
}

TEST(Traffic, RateTimesTicksRequests) {
  auto cp = testkit::MakeDefaultPlane();
  TrafficProfile p = cp->config().traffic;
  p.rate = 10;
  auto r = RunProductionTraffic(p, cp->binding(), 100);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->requests, 1000u);
  EXPECT_EQ(r->to - r->from, 100);
  EXPECT_EQ(cp->clock().Now(), 100);
  EXPECT_EQ(r->errors, 0u);
}

TEST(Traffic, InjectedErrorRateObserved) {
  auto cp = testkit::MakePlane(WithReleasedBehavior("svc-a", 0.02));
  TrafficProfile p = cp->config().traffic;
  p.rate = 100;
  p.mix = {{{"gateway", "/enroll"}, 1}};
  auto r = RunProductionTraffic(p, cp->binding(), 100);
  ASSERT_TRUE(r.ok());
  const auto released = *cp->releases().ReleasedOf("svc-a");
  const auto& w = r->windows.at(released);
  EXPECT_EQ(w.n, 10000u);
  EXPECT_GE(w.ErrorRate(), 0.015);
  EXPECT_LE(w.ErrorRate(), 0.025);
  const auto [lo, hi] = oracle::BinomialBand(0.02, w.n, 4.0);
  EXPECT_GE(w.ErrorRate(), lo);
  EXPECT_LE(w.ErrorRate(), hi);
  // Request-level errors: a failing hop fails the request.
  EXPECT_EQ(r->errors, w.errors);
}

TEST(Traffic, SameSeedSameTrace) {
  std::string logs[2];
  for (auto& log : logs) {
    auto cp = testkit::MakeDefaultPlane(99);
    std::ostringstream out;
    TrafficOptions opts;
    opts.trace_log = &out;
    ASSERT_TRUE(RunProductionTraffic(cp->config().traffic, cp->binding(), 50, opts).ok());
    log = out.str();
  }
  EXPECT_EQ(logs[0], logs[1]);
  EXPECT_FALSE(logs[0].empty());
}

TEST(Traffic, ProfileValidation) {
  TrafficProfile p;
  EXPECT_FALSE(p.Validate().ok());  // empty mix
  p.mix = {{{"gateway", "/"}, 1}};
  EXPECT_TRUE(p.Validate().ok());
  p.rate = 0;
  EXPECT_FALSE(p.Validate().ok());
  p.rate = 1;
  p.mix[0].weight = 0;
  EXPECT_FALSE(p.Validate().ok());
}

TEST(Suite, PassesWithOverrideAndEchoesMarkers) {
  auto cp = testkit::MakeDefaultPlane();
  auto d = cp->CreateDeploy(Request("svc-a", "v43"), "t");
  ASSERT_TRUE(d.ok());
  auto run = RunIntegrationSuite(Core(*cp), {{"svc-a", d->id}}, cp->binding(),
                                 &cp->bus());
  ASSERT_TRUE(run.ok()) << run.status();
  EXPECT_EQ(run->pass_count, 12);
  EXPECT_EQ(run->fail_count, 0);
  EXPECT_EQ(run->production_write_delta, 0u);
  for (const auto& r : run->results) {
    EXPECT_TRUE(r.passed) << r.test_id << ": "
                          << (r.failures.empty() ? "" : r.failures[0]);
  }
  // Overridden traffic never reaches production metrics.
  EXPECT_EQ(cp->metrics().Window(d->id, 0, 1 << 30).n, 0u);
  EXPECT_GT(cp->metrics().testing_hops(), 0u);
}

TEST(Suite, MarkerMismatchIsCaught) {
  auto cp = testkit::MakeDefaultPlane();
  mesh::VersionBehavior b;
  b.marker = "not-what-was-asked";
  auto d = cp->CreateDeploy(DeployRequest{"svc-a", "v44", "main", "", b}, "t");
  ASSERT_TRUE(d.ok());
  Suite suite = Core(*cp);
  for (auto& t : suite.tests) {
    for (auto& s : t.steps) s.expect.markers["svc-a"] = "svc-a-v44";
  }
  auto run = RunIntegrationSuite(suite, {{"svc-a", d->id}}, cp->binding(), &cp->bus());
  ASSERT_TRUE(run.ok());
  EXPECT_GT(run->fail_count, 0);
}

TEST(Suite, ConcurrentRunsAgree) {
  auto cp = testkit::MakeDefaultPlane();
  auto d = cp->CreateDeploy(Request("svc-a", "v43"), "t");
  ASSERT_TRUE(d.ok());
  absl::StatusOr<SuiteRun> runs[2];
  std::thread a([&] {
    runs[0] = RunIntegrationSuite(Core(*cp), {{"svc-a", d->id}}, cp->binding(), &cp->bus());
  });
  std::thread b([&] {
    runs[1] = RunIntegrationSuite(Core(*cp), {{"svc-a", d->id}}, cp->binding(), &cp->bus());
  });
  a.join();
  b.join();
  ASSERT_TRUE(runs[0].ok() && runs[1].ok());
  EXPECT_EQ(runs[0]->pass_count, runs[1]->pass_count);
  EXPECT_EQ(runs[0]->fail_count, runs[1]->fail_count);
  EXPECT_EQ(runs[0]->pass_count, 12);
}

TEST(Suite, BrokenDeployFails) {
  auto cp = testkit::MakeDefaultPlane();
  auto d = cp->CreateDeploy(Request("svc-a", "v43-broken"), "t");
  ASSERT_TRUE(d.ok());
  auto run = RunIntegrationSuite(Core(*cp), {{"svc-a", d->id}}, cp->binding(), &cp->bus());
  ASSERT_TRUE(run.ok());
  EXPECT_GT(run->fail_count, 0);
  EXPECT_FALSE(run->AllPassed());
  auto outcome = cp->TestDeploy(d->id, "core", "t");
  ASSERT_TRUE(outcome.ok());
  EXPECT_EQ(outcome->record.state, DeployState::kTestFailed);
}

TEST(Suite, ShuffledInterleavingsAreSafe) {
  auto cp = testkit::MakeDefaultPlane();
  auto d = cp->CreateDeploy(Request("svc-a", "v43"), "t");
  ASSERT_TRUE(d.ok());
  const auto writes = cp->store().production_writes();
  for (std::uint64_t s = 0; s < 50; ++s) {
    SuiteOptions opts;
    opts.seed = s;
    opts.shuffle_seed = s;
    opts.workers = 1 + static_cast<int>(s % 8);
    auto run = RunIntegrationSuite(Core(*cp), {{"svc-a", d->id}}, cp->binding(),
                                   &cp->bus(), opts);
    ASSERT_TRUE(run.ok());
    EXPECT_EQ(run->pass_count, 12) << "shuffle " << s;
    EXPECT_EQ(run->production_write_delta, 0u);
  }
  EXPECT_EQ(cp->store().production_writes(), writes);
}

TEST(Suite, ParseErrors) {
  EXPECT_FALSE(ParseSuite("not json").ok());
  EXPECT_FALSE(ParseSuite(R"({"id":"x"})").ok());
  EXPECT_FALSE(ParseSuite(R"({"id":"x","tests":[{"id":"t","steps":[{"kind":"teleport"}]}]})").ok());
  EXPECT_FALSE(LoadSuiteFile("/nonexistent/suite.json").ok());
  EXPECT_TRUE(LoadSuiteFile(testkit::SourceDir() / "scenarios/suites/core.json").ok());
}

TEST(Probes, HealthyReleasePassesWithoutWrites) {
  auto cp = testkit::MakeDefaultPlane();
  const auto writes = cp->store().production_writes();
  auto runs = RunSyntheticProbes(Core(*cp), 10, 30, cp->binding(), &cp->bus());
  ASSERT_TRUE(runs.ok());
  ASSERT_EQ(runs->size(), 3u);
  for (const auto& r : *runs) {
    EXPECT_TRUE(r.AllPassed());
    EXPECT_EQ(r.production_write_delta, 0u);
    EXPECT_TRUE(r.overrides.empty());
  }
  EXPECT_EQ(cp->store().production_writes(), writes);
}

TEST(Probes, DegradedReleaseRaisesAlert) {
  auto cp = testkit::MakePlane(WithReleasedBehavior("svc-b", 1.0));
  SyntheticProber prober(&Core(*cp), 60, &cp->bus());
  auto run = prober.Poll(cp->binding());
  ASSERT_TRUE(run.ok() && run->has_value());
  EXPECT_FALSE((*run)->AllPassed());
  EXPECT_EQ(prober.alerts(), 1u);
  // Not due again until the cadence elapses.
  cp->clock().Advance(59);
  EXPECT_FALSE(prober.Poll(cp->binding())->has_value());
  cp->clock().Advance(1);
  EXPECT_TRUE(prober.Poll(cp->binding())->has_value());
  EXPECT_EQ(prober.alerts(), 2u);
}

TEST(Events, AnnotationTravelsWithEvent) {
  auto cp = testkit::MakeDefaultPlane();
  auto d = cp->CreateDeploy(Request("nl-c", "v2"), "t");
  ASSERT_TRUE(d.ok());
  auto& bus = cp->bus();
  const std::string topic = "enrollment-events";
  ASSERT_EQ(bus.ConsumerOf(topic), std::optional<ComponentId>("nl-c"));
  const auto prod_before = Count(*cp, "events");
  const auto staging = *cp->store().ResolveStore(OverrideCtx("nl-c", d->id, "x"),
                                                 {"nl-c", DeployState::kPreproduction});
  const auto staging_before = cp->store().Ids(staging, "events")->size();
  Rng rng(5);
  std::set<std::string> test_events, prod_events;
  for (int i = 0; i < 200; ++i) {
    if (rng.Below(2) ? test_events.size() < 100 : prod_events.size() >= 100) {
      auto id = bus.Publish(topic, "t", OverrideCtx("nl-c", d->id, "e" + std::to_string(i)));
      ASSERT_TRUE(id.ok());
      test_events.insert(*id);
    } else {
      auto id = bus.Publish(topic, "p", mesh::RequestContext::Production("e", 0));
      ASSERT_TRUE(id.ok());
      prod_events.insert(*id);
    }
  }
  EXPECT_EQ(bus.Pending(topic), 200u);
  Rng consume_rng(6);
  auto n = bus.Consume(topic, "nl-c", cp->binding(), consume_rng);
  ASSERT_TRUE(n.ok()) << n.status();
  EXPECT_EQ(*n, 200u);
  EXPECT_EQ(bus.Pending(topic), 0u);
  for (const auto& e : test_events) {
    auto rec = bus.Processed(e);
    ASSERT_TRUE(rec.has_value());
    EXPECT_EQ(rec->deploy, d->id);
    EXPECT_EQ(rec->store, mesh::StoreUse::kStaging);
  }
  const auto released = *cp->releases().ReleasedOf("nl-c");
  for (const auto& e : prod_events) {
    auto rec = bus.Processed(e);
    ASSERT_TRUE(rec.has_value());
    EXPECT_EQ(rec->deploy, released);
    EXPECT_EQ(rec->store, mesh::StoreUse::kProduction);
  }
  EXPECT_EQ(Count(*cp, "events"), prod_before + 100);
  EXPECT_EQ(cp->store().Ids(staging, "events")->size(), staging_before + 100);
}

TEST(Events, UnknownTopicAndWrongConsumer) {
  auto cp = testkit::MakeDefaultPlane();
  auto& bus = cp->bus();
  EXPECT_FALSE(bus.Publish("nope", "x", mesh::RequestContext::Production("e", 0)).ok());
  Rng rng(1);
  EXPECT_FALSE(bus.Consume("enrollment-events", "svc-a", cp->binding(), rng).ok());
  EXPECT_FALSE(bus.RegisterTopic("enrollment-events", "svc-b").ok());
}

TEST(Metrics, HistogramQuantilesMatchOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    LatencyHistogram h;
    std::vector<double> samples;
    const int n = 1 + static_cast<int>(rng.Below(5000));
    for (int i = 0; i < n; ++i) {
      const double v = rng.NextUnit() * 200.0;
      samples.push_back(v);
      h.Add(v);
    }
    for (double q : {0.0, 0.01, 0.5, 0.9, 0.99, 1.0}) {
      EXPECT_DOUBLE_EQ(h.Quantile(q), oracle::BucketQuantile(samples, q))
          << "n=" << n << " q=" << q;
    }
  }
  EXPECT_EQ(LatencyHistogram().Quantile(0.99), 0.0);
}

TEST(Metrics, MergeAddsCounts) {
  LatencyHistogram a, b;
  a.Add(1.5);
  b.Add(7.2);
  b.Add(7.9);
  a.Merge(b);
  EXPECT_EQ(a.Total(), 3u);
  EXPECT_EQ(a.Quantile(1.0), 8.0);
}

TEST(Metrics, OnlyProductionIsRecorded) {
  auto cp = testkit::MakeDefaultPlane();
  ASSERT_TRUE(RunProductionTraffic(cp->config().traffic, cp->binding(), 20).ok());
  const auto hops = cp->metrics().production_hops();
  const auto series = cp->metrics().ProductionSeries(0, 20);
  ASSERT_EQ(series.size(), 20u);
  for (std::size_t i = 0; i < series.size(); ++i) {
    EXPECT_EQ(series[i].tick, static_cast<Tick>(i));
    EXPECT_EQ(series[i].requests, 10u);
  }
  auto run = RunIntegrationSuite(Core(*cp), {}, cp->binding(), &cp->bus());
  ASSERT_TRUE(run.ok());
  EXPECT_EQ(cp->metrics().production_hops(), hops);
}

// Production traffic replayed alone and with concurrent suites and probes
// must produce byte-identical traces and production state.
TEST(Isolation, ConcurrentTestingLeavesProductionUntouched) {
  struct Outcome {
    std::string trace;
    std::uint64_t writes;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t suite_writes = 0;
    int suite_failures = 0;
    int suites = 0;
  };
  auto run = [](bool with_testing) {
    auto cp = testkit::MakeDefaultPlane(4242);
    auto d = cp->CreateDeploy(Request("svc-a", "v43"), "t");
    auto nl = cp->CreateDeploy(Request("nl-c", "v2"), "t");
    Outcome out;
    std::ostringstream trace;
    std::atomic<bool> done{false};
    std::vector<std::thread> testers;
    std::mutex mu;
    if (with_testing) {
      for (int t = 0; t < 2; ++t) {
        testers.emplace_back([&, t] {
          std::map<ComponentId, DeployId> overrides;
          if (t == 0) overrides = {{"svc-a", d->id}, {"nl-c", nl->id}};
          SuiteOptions opts;
          opts.workers = 2;
          for (std::uint64_t i = 0; !done.load(); ++i) {
            opts.seed = i;
            auto r = RunIntegrationSuite(cp->config().suites.at("core"), overrides,
                                         cp->binding(), &cp->bus(), opts);
            std::lock_guard<std::mutex> lock(mu);
            if (!r.ok() || !r->AllPassed()) ++out.suite_failures;
            if (r.ok()) out.suite_writes += r->production_write_delta;
            ++out.suites;
          }
        });
      }
    }
    TrafficProfile p = cp->config().traffic;
    TrafficOptions opts;
    opts.trace_log = &trace;
    auto r = RunProductionTraffic(p, cp->binding(), 1000, opts);
    done = true;
    for (auto& th : testers) th.join();
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r->requests, 10000u);
    out.trace = trace.str();
    out.writes = cp->store().production_writes();
    for (const auto& t : cp->config().tables) out.counts[t.name] = Count(*cp, t.name);
    return out;
  };
  const Outcome alone = run(false);
  const Outcome mixed = run(true);
  EXPECT_GT(mixed.suites, 0);
  EXPECT_EQ(mixed.suite_failures, 0);
  EXPECT_EQ(mixed.suite_writes, 0u);
  EXPECT_EQ(alone.writes, mixed.writes);
  EXPECT_EQ(alone.counts, mixed.counts);
  EXPECT_TRUE(alone.trace == mixed.trace);
}

}  // namespace
}  // namespace cnd::harness
