// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hymos/cli/cli.hpp"
#include "hymos/io.hpp"
#include "hymos/p4ir/interpreter.hpp"
#include "hymos/p4ir/json_io.hpp"
#include "hymos/sched/matching.hpp"
#include "hymos/sim/engine.hpp"
#include "hymos/switchcore/capacity.hpp"
#include "hymos/switchcore/linecard.hpp"
#include "hymos/xlate/distributed.hpp"
#include "hymos/xlate/translate.hpp"
#include "support/hungarian.hpp"
#include "support/random_frames.hpp"
#include "support/test_data.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hymos;
using hymos::testing::data_file;
using hymos::testing::data_path;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome translator_equivalence() {
  auto t0 = Clock::now();
  auto program = p4ir::load_program(data_file("l3_router.program.json"));
  auto entries = p4ir::load_entries(data_file("l3_router.entries.json"), program);
  auto topo = xlate::load_topology(data_file("topo_4x4_gen3x8.json"));
  auto tr = xlate::translate(program, entries, topo);
  xlate::DistributedSwitch dist(tr, topo, entries);
  p4ir::ProgramInstance mono(program, entries);
  hymos::testing::RandomFrameSource src(20240601, topo.all_ports());
  int match = 0, forwarded = 0, crossed = 0;
  const int total = 10000;
  for (int i = 0; i < total; ++i) {
    auto f = src.next();
    auto m = mono.execute(f.bytes, f.ingress_port);
    auto d = dist.process(f.bytes, f.ingress_port);
    bool same = d.disposition == m.disposition && (!m.disposition.is_forward() || d.bytes == m.bytes);
    match += same;
    forwarded += m.disposition.is_forward();
    crossed += d.crossed_fabric;
  }
  double secs = seconds_since(t0);
  return {match == total && secs < 30,
          fmt("%d/%d packets identical (%d forwarded, %d via fabric), %.2f s", match, total, forwarded, crossed, secs)};
}

Outcome matching_oracle() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  int agree = 0, total = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    auto ms = sched::enumerate_matchings(n);
    std::vector<uint32_t> all(n);
    for (uint32_t i = 0; i < n; ++i) all[i] = i;
    for (int t = 0; t < 1000; ++t) {
      std::vector<uint64_t> w(n * n);
      std::vector<int64_t> ws(n * n);
      for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = rng() % 3 == 0 ? 0 : rng() % 1000000;
        ws[k] = static_cast<int64_t>(w[k]);
      }
      auto r = sched::max_weight_matching(w, n, all, all, *ms);
      agree += static_cast<int64_t>(r.weight) == hymos::testing::hungarian_max_weight(ws, n);
      ++total;
    }
  }
  double secs = seconds_since(t0);
  return {agree == total && secs < 10, fmt("%d/%d matrices (N=2..5) equal the Hungarian weight, %.2f s", agree, total, secs)};
}

Outcome voq_law() {
  auto program = p4ir::load_program(data_file("l3_router.program.json"));
  auto entries = p4ir::load_entries(data_file("l3_router.entries.json"), program);
  std::string bad;
  for (std::size_t n = 2; n <= 8; ++n) {
    // 16 ports dealt round-robin over n cards.
    xlate::Topology topo;
    for (uint32_t c = 0; c < n; ++c) topo.cards.push_back({c, {3, 8}, {}});
    for (uint32_t p = 0; p < 16; ++p) topo.cards[p % n].ports.push_back({p, 10});
    auto tr = xlate::translate(program, entries, topo);
    std::vector<switchcore::LineCard> cards;
    for (uint32_t c = 0; c < n; ++c) {
      auto inst = std::make_shared<const p4ir::ProgramInstance>(tr.cards[c].program, tr.card_entries(c, entries));
      cards.emplace_back(c, n, inst, topo.cards[c].ports);
    }
    for (const auto& c : cards) {
      if (c.voq_count() != 8 * (n - 1)) bad += fmt(" N=%zu card %u has %zu;", n, c.id(), c.voq_count());
    }
    if (switchcore::snapshot_demand(cards).size() != n) bad += fmt(" N=%zu demand matrix size;", n);
  }
  return {bad.empty(), bad.empty() ? "every card has 8(N-1) VOQs for N=2..8" : "mismatch:" + bad};
}

Outcome matching_and_priority() {
  auto t0 = Clock::now();
  auto uniform = sim::load_experiment(data_path("exp_4card_uniform.json"));
  auto u = sim::run(uniform);
  auto two = sim::load_experiment(data_path("exp_two_class_overload.json"));
  auto t = sim::run(two);
  double p7 = t.per_priority[7].mean_latency_us, p0 = t.per_priority[0].mean_latency_us;
  bool pass = uniform.duration_slots >= 100000 && two.duration_slots >= 100000 && u.invariants.matching == 0 &&
              u.invariants.zero_grants == 0 && t.invariants.matching == 0 && t.invariants.priority == 0 &&
              t.per_priority[7].packets > 0 && t.per_priority[0].packets > 0 && p7 < p0;
  return {pass, fmt("4-card run: %llu grants, %llu matching violations; overload run: %llu priority violations, "
                    "mean latency pcp7 %.2f us < pcp0 %.2f us, %.2f s",
                    static_cast<unsigned long long>(u.grants), static_cast<unsigned long long>(u.invariants.matching),
                    static_cast<unsigned long long>(t.invariants.priority), p7, p0, seconds_since(t0))};
}

Outcome stability() {
  auto t0 = Clock::now();
  auto cfg = sim::load_experiment(data_path("exp_stability_95.json"));
  auto r = sim::run(cfg);
  double secs = seconds_since(t0);
  const auto& tr = r.max_voq_trace;
  std::size_t n = tr.size();
  uint64_t q2 = 0, last = 0;
  for (std::size_t i = n / 4; i < n / 2; ++i) q2 = std::max(q2, tr[i]);
  for (std::size_t i = n / 2; i < n; ++i) last = std::max(last, tr[i]);
  double ratio = r.delivered_gbps / r.offered_gbps;
  bool pass = n == 100000 && ratio >= 0.93 && last <= 2 * q2 && secs < 60 && r.invariants.ok();
  return {pass, fmt("delivered/offered %.4f, max VOQ last half %llu B vs second quarter %llu B, %.2f s", ratio,
                    static_cast<unsigned long long>(last), static_cast<unsigned long long>(q2), secs)};
}

Outcome table_one() {
  const double want[3][5] = {{0.5, 1, 2, 4, 8}, {1, 2, 4, 8, 16}, {2, 4, 8, 16, 32}};
  const unsigned lanes[5] = {1, 2, 4, 8, 16};
  int exact = 0;
  for (unsigned g = 1; g <= 3; ++g) {
    for (int l = 0; l < 5; ++l) exact += switchcore::link_bandwidth(g, lanes[l]) == want[g - 1][l];
  }
  auto ok = switchcore::check_nonblocking(xlate::load_topology(data_file("topo_2x8_gen3x8.json")));
  auto bad = switchcore::check_nonblocking(xlate::load_topology(data_file("topo_blocking_2x100g_gen2x8.json")));
  bool ok_pass = ok[0].nonblocking && ok[0].utilization == 0.625;
  bool bad_pass = !bad[0].nonblocking;
  return {exact == 15 && ok_pass && bad_pass,
          fmt("%d/15 cells exact; 8x10G on Gen3 x8 %s at %.1f%%; 2x100G on Gen2 x8 %s", exact,
              ok[0].nonblocking ? "non-blocking" : "blocking", ok[0].utilization * 100,
              bad[0].nonblocking ? "non-blocking" : "blocking")};
}

struct CsvRow {
  std::string param;
  double mean = 0, norm = 0;
};

std::vector<CsvRow> read_csv(const fs::path& p) {
  std::istringstream in(read_text_file(p));
  std::string line;
  std::getline(in, line);
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back({cells.at(0), std::stod(cells.at(3)), std::stod(cells.at(9))});
  }
  return rows;
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome curve_shapes(const fs::path& dir) {
  auto t0 = Clock::now();
  auto load_csv = dir / "load.csv", size_csv = dir / "size.csv";
  if (cli({"sweep", "--experiment", data_path("exp_l3_2x8.json"), "--param", "load", "--values", "0.2,0.4,0.6,0.8,1.0",
           "--baseline", "--out", load_csv.string()}) != 0 ||
      cli({"sweep", "--experiment", data_path("exp_size_sweep.json"), "--param", "packet_size", "--values",
           "64,256,800,1500", "--baseline", "--out", size_csv.string()}) != 0) {
    return {false, "sweep command failed"};
  }
  auto load = read_csv(load_csv), size = read_csv(size_csv);
  bool monotone = load.size() == 5, norm_ok = size.size() == 4;
  std::string curve;
  for (std::size_t i = 0; i < load.size(); ++i) {
    if (i > 0 && load[i].mean < load[i - 1].mean) monotone = false;
    curve += fmt("%s%.3f", i ? " <= " : "", load[i].mean);
  }
  double min_norm = 1e9;
  for (const auto* rows : {&load, &size}) {
    for (const auto& r : *rows) min_norm = std::min(min_norm, r.norm);
  }
  norm_ok = norm_ok && min_norm >= 1.0;
  return {monotone && norm_ok, fmt("mean latency by load (us): %s; min norm_latency %.4f over 9 points, %.2f s",
                                   curve.c_str(), min_norm, seconds_since(t0))};
}

Outcome determinism(const fs::path& dir) {
  auto a = dir / "a.csv", b = dir / "b.csv";
  for (const auto& p : {a, b}) {
    if (cli({"sweep", "--experiment", data_path("exp_l3_2x8.json"), "--param", "load", "--values", "0.3,0.9",
             "--baseline", "--seed", "42", "--out", p.string()}) != 0) {
      return {false, "sweep command failed"};
    }
  }
  auto x = read_text_file(a), y = read_text_file(b);
  return {x == y && !x.empty(), fmt("two --seed 42 invocations: %zu vs %zu bytes, %s", x.size(), y.size(),
                                    x == y ? "identical" : "different")};
}

}  // namespace

int main() {
  auto dir = fs::temp_directory_path() / "hymos_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"translator equivalence", translator_equivalence},
      {"max-weight matching vs Hungarian oracle", matching_oracle},
      {"VOQ count law", voq_law},
      {"matching validity and priority strictness", matching_and_priority},
      {"stability at 95% load", stability},
      {"PCI-e table and capacity check", table_one},
      {"load and size curve shapes", [&] { return curve_shapes(dir); }},
      {"byte-identical CSV for a fixed seed", [&] { return determinism(dir); }},
  };
  int passed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    passed += o.pass;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", passed, checks.size());
  fs::remove_all(dir);
  return passed == static_cast<int>(checks.size()) ? 0 : 1;
}
