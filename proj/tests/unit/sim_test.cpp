#include <gtest/gtest.h>

#include <cmath>

#include "hymos/error.hpp"
#include "hymos/sim/config.hpp"
#include "hymos/sim/engine.hpp"
#include "hymos/sim/traffic.hpp"
#include "hymos/xlate/translate.hpp"
#include "support/experiments.hpp"

namespace hymos::sim {
namespace {

using hymos::testing::experiment;

SourceGroup cbr_group(double load, uint32_t size = 800) {
  SourceGroup g;
  g.sources = {0};
  g.load = load;
  g.sizes = {{size, 1}};
  g.destinations = {{parse_subnet("10.0.4.0/25"), 1}};
  return g;
}

TEST(Traffic, CbrSpacing) {
  for (auto [load, gap] : {std::pair{0.8, 800.0}, std::pair{1.0, 640.0}}) {
    auto g = cbr_group(load);
    PortSource src(g, 0, 10, 1);
    EXPECT_DOUBLE_EQ(src.cbr_gap_ns(800), gap);
    std::vector<Arrival> out;
    src.generate_until(100000, out);
    ASSERT_GT(out.size(), 10u);
    EXPECT_LT(out[0].time_ns, gap);
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_NEAR(out[i].time_ns - out[i - 1].time_ns, gap, 1e-6);
  }
}

TEST(Traffic, ZeroLoadEmitsNothing) {
  auto g = cbr_group(0);
  PortSource src(g, 0, 10, 1);
  std::vector<Arrival> out;
  src.generate_until(1e9, out);
  EXPECT_TRUE(out.empty());
}

TEST(Traffic, UniformDestinationsSplitEvenly) {
  SourceGroup g = cbr_group(1.0, 64);
  g.destinations.clear();
  for (int s : {4, 5, 6, 7, 12, 13, 14, 15}) g.destinations.push_back({parse_subnet("10.0." + std::to_string(s) + ".0/24"), 1});
  PortSource src(g, 3, 10, 99);
  std::vector<uint64_t> counts(8, 0);
  std::vector<Arrival> out;
  uint64_t total = 0;
  double t = 0;
  while (total < 1000000) {
    t += 1e6;
    out.clear();
    src.generate_until(t, out);
    for (const auto& a : out) {
      ++counts[a.destination];
      EXPECT_EQ(a.dst_ip >> 8, (10u << 16) | ((a.destination < 4 ? 4u : 8u) + a.destination));
      ++total;
    }
  }
  for (auto c : counts) EXPECT_NEAR(static_cast<double>(c) / static_cast<double>(total), 0.125, 0.01 * 0.125);
}

TEST(Traffic, BernoulliMeanMatchesLoadAndHigherLoadOnlyAddsPackets) {
  auto lo = cbr_group(0.3), hi = cbr_group(0.6);
  lo.process = hi.process = ArrivalProcess::kBernoulli;
  PortSource a(lo, 0, 10, 5), b(hi, 0, 10, 5);
  std::vector<Arrival> x, y;
  a.generate_until(64e6, x);
  b.generate_until(64e6, y);
  EXPECT_NEAR(static_cast<double>(x.size()) / 100000.0, 0.3, 0.01);
  EXPECT_NEAR(static_cast<double>(y.size()) / 100000.0, 0.6, 0.01);
  std::size_t j = 0;
  for (const auto& p : x) {
    while (j < y.size() && y[j].time_ns < p.time_ns) ++j;
    ASSERT_LT(j, y.size());
    ASSERT_EQ(y[j].time_ns, p.time_ns);
    ASSERT_EQ(y[j].dst_ip, p.dst_ip);
  }
}

TEST(Config, LoadsBundledExperiments) {
  for (const char* name : {"exp_l3_2x8.json", "exp_size_sweep.json", "exp_stability_95.json", "exp_two_class_overload.json"}) {
    auto cfg = experiment(name);
    EXPECT_NO_THROW(validate_experiment(cfg)) << name;
  }
  auto two = experiment("exp_two_class_overload.json");
  EXPECT_EQ(two.voq_cap_bytes, 262144u);
  EXPECT_TRUE(two.traffic[0].vlan);
  EXPECT_EQ(two.traffic[0].pcp.size(), 2u);
}

TEST(Config, RejectsInconsistentSettings) {
  auto base = experiment("exp_l3_2x8.json", 1000);
  auto c = base;
  c.traffic[0].sources.push_back(77);
  EXPECT_THROW(validate_experiment(c), ConfigError);
  c = base;
  c.traffic[0].load = 1.5;
  EXPECT_THROW(validate_experiment(c), ConfigError);
  c = base;
  c.warmup_slots = c.duration_slots;
  EXPECT_THROW(validate_experiment(c), ConfigError);
  c = base;
  c.traffic[0].sizes = {{40, 1}};
  EXPECT_THROW(validate_experiment(c), ConfigError);
  c = base;
  c.traffic.push_back(c.traffic[0]);
  EXPECT_THROW(validate_experiment(c), ConfigError);
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Config, SchemaErrorsCarryPaths) {
  nlohmann::json doc = nlohmann::json::parse(hymos::testing::data_file("exp_l3_2x8.json"));
  doc["traffic"][0]["bogus"] = 1;
  try {
    experiment_from_json(doc, HYMOS_DATA_DIR);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.traffic[0].bogus");
  }
  EXPECT_THROW(parse_subnet("10.0.0.0/40"), ConfigError);
}

TEST(Run, ZeroLoadIsQuiet) {
  auto cfg = with_param(experiment("exp_l3_2x8.json", 2000), SweepParam::kLoad, 0);
  auto r = run(cfg);
  EXPECT_EQ(r.delivered_gbps, 0);
  EXPECT_EQ(r.drops, 0u);
  EXPECT_EQ(r.latency_samples, 0u);
  EXPECT_TRUE(r.invariants.ok());
}

TEST(Run, DeterministicAndInvariantClean) {
  auto cfg = experiment("exp_l3_2x8.json", 5000);
  auto a = run(cfg), b = run(cfg);
  EXPECT_EQ(a.mean_lat_us, b.mean_lat_us);
  EXPECT_EQ(a.p99_us, b.p99_us);
  EXPECT_EQ(a.delivered_gbps, b.delivered_gbps);
  EXPECT_EQ(a.max_voq_trace, b.max_voq_trace);
  EXPECT_TRUE(a.invariants.ok());
  EXPECT_GT(a.latency_samples, 1000u);
  EXPECT_LE(a.delivered_gbps, a.offered_gbps);
  EXPECT_EQ(a.in_flight_at_end, 0u);
  cfg.seed = 43;
  EXPECT_NE(run(cfg).mean_lat_us, a.mean_lat_us);
}

TEST(Run, BaselineLatencyWithoutQueueingIsProcessingPlusSerialization) {
  auto cfg = experiment("exp_l3_2x8.json", 2000);
  cfg.traffic[0].sources = {0};
  cfg.traffic[0].process = ArrivalProcess::kCbr;
  cfg.traffic[0].load = 0.1;
  cfg.processing_ns = 250;
  auto r = run_baseline(cfg);
  ASSERT_GT(r.latency_samples, 0u);
  // Untagged frames to ports 12..15 gain a 4-byte tag; others leave at 800 bytes.
  EXPECT_GE(r.p50_us, (250 + 640) / 1000.0 - 1e-9);
  EXPECT_LE(r.p99_us, (250 + 643.2) / 1000.0 + 1e-9);
  EXPECT_EQ(r.wasted_grants, 0u);
  EXPECT_EQ(r.max_voq_bytes, 0u);
  EXPECT_EQ(r.invariants.leaked_internal, 0u);
}

TEST(Run, DeeperPipelineDelaysSparseFabricTraffic) {
  // Under continuous demand every stale snapshot still shows a backlog, so
  // staleness only shows when VOQs run dry between packets.
  auto cfg = experiment("exp_l3_2x8.json", 5000);
  cfg.traffic[0].sources = {0};
  cfg.traffic[0].process = ArrivalProcess::kCbr;
  cfg.traffic[0].load = 0.05;
  cfg.traffic[0].destinations = {{parse_subnet("10.0.12.0/24"), 1}};
  auto d1 = run(cfg);
  cfg.pipeline_depth = 3;
  auto d3 = run(cfg);
  EXPECT_TRUE(d3.invariants.ok());
  EXPECT_NEAR(d3.mean_lat_us - d1.mean_lat_us, 2 * cfg.slot_ns / 1000.0, 1e-6);
  // Snapshots are taken before the slot's transfers, so an isolated packet is
  // seen by depth + 1 snapshots and leaves `depth` grants with nothing to move.
  for (auto [r, depth] : {std::pair{&d1, 1.0}, std::pair{&d3, 3.0}}) {
    auto useful = static_cast<double>(r->grants - r->wasted_grants);
    EXPECT_NEAR(static_cast<double>(r->wasted_grants), depth * useful, depth * 2);
  }
}

TEST(Run, TwoClassOverloadKeepsPriorityStrict) {
  auto cfg = experiment("exp_two_class_overload.json", 20000);
  cfg.max_drain_slots = 0;
  auto r = run(cfg);
  EXPECT_EQ(r.invariants.priority, 0u);
  EXPECT_EQ(r.invariants.matching, 0u);
  EXPECT_GT(r.drops, 0u);
  ASSERT_GT(r.per_priority[7].packets, 0u);
  ASSERT_GT(r.per_priority[0].packets, 0u);
  EXPECT_LT(r.per_priority[7].mean_latency_us, r.per_priority[0].mean_latency_us);
}

TEST(Run, UntranslatableSetupFailsBeforeSimulating) {
  auto cfg = experiment("exp_l3_2x8.json", 1000);
  cfg.program.tables[0].name = "hymos_lpm";
  EXPECT_THROW(run(cfg), ValidationError);  // the pipeline still applies the old name
  auto cfg2 = experiment("exp_l3_2x8.json", 1000);
  cfg2.entries.front().action.args = {99};  // route to a port nobody owns
  EXPECT_THROW(run(cfg2), xlate::TranslateError);
}

TEST(Sweep, SingletonMatchesDirectRun) {
  auto cfg = experiment("exp_l3_2x8.json", 3000);
  std::vector<double> v = {0.5};
  auto rows = sweep(cfg, SweepParam::kLoad, v, false, 1);
  auto direct = run(with_param(cfg, SweepParam::kLoad, 0.5));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].hymos.param, "0.5");
  EXPECT_EQ(rows[0].hymos.mean_lat_us, direct.mean_lat_us);
  EXPECT_EQ(rows[0].hymos.delivered_gbps, direct.delivered_gbps);
}

TEST(Sweep, ParallelEqualsSequential) {
  auto cfg = experiment("exp_l3_2x8.json", 2000);
  std::vector<double> v = {0.2, 0.6, 1.0};
  auto a = sweep(cfg, SweepParam::kLoad, v, true, 1);
  auto b = sweep(cfg, SweepParam::kLoad, v, true, 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(a[i].hymos.mean_lat_us, b[i].hymos.mean_lat_us);
    EXPECT_EQ(a[i].norm_latency, b[i].norm_latency);
  }
}

TEST(Sweep, RejectsBadValueLists) {
  auto cfg = experiment("exp_l3_2x8.json", 1000);
  std::vector<double> none, zigzag = {0.2, 0.8, 0.4}, bad_load = {0.5, 1.5};
  EXPECT_THROW(sweep(cfg, SweepParam::kLoad, none, false), ConfigError);
  EXPECT_THROW(sweep(cfg, SweepParam::kLoad, zigzag, false), ConfigError);
  EXPECT_THROW(sweep(cfg, SweepParam::kLoad, bad_load, false), ConfigError);
  EXPECT_THROW(sweep_param_from_name("ttl"), ConfigError);
  EXPECT_EQ(sweep_param_from_name("size"), SweepParam::kPacketSize);
}

}  // namespace
}  // namespace hymos::sim
