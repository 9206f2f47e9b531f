#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "hymos/cli/cli.hpp"
#include "hymos/io.hpp"
#include "hymos/p4ir/json_io.hpp"
#include "hymos/p4ir/validate.hpp"
#include "support/test_data.hpp"

namespace hymos::cli {
namespace {

namespace fs = std::filesystem;
using hymos::testing::data_path;

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args, const char* env_seed = nullptr) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err, env_seed);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hymos_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Short copy of the bundled experiment with absolute file references.
  std::string small_experiment(const std::string& extra = "") {
    auto p = dir_ / "exp.json";
    std::string doc = R"({"topology": ")" + data_path("topo_2x8_gen3x8.json") + R"(", "program": ")" +
                      data_path("l3_router.program.json") + R"(", "entries": ")" + data_path("l3_router.entries.json") +
                      R"(", "seed": 3, "duration_slots": 2000, "warmup_slots": 200)" + extra +
                      R"(, "traffic": [{"sources": [0, 1, 8, 9], "process": "bernoulli", "load": 0.6, "packet_size": 800,
                          "destinations": ["10.0.5.0/24", "10.0.13.0/24"]}]})";
    write_file_atomic(p, doc);
    return p.string();
  }

  fs::path dir_;
};

TEST_F(CliTest, TranslateWritesCardFiles) {
  auto r = cli({"translate", "--program", data_path("l3_router.program.json"), "--entries",
                data_path("l3_router.entries.json"), "--topology", data_path("topo_2x8_gen3x8.json"), "--out-dir",
                dir_.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("2 cards, 6 tables each"), std::string::npos);
  for (int c = 0; c < 2; ++c) {
    auto base = (dir_ / ("card" + std::to_string(c))).string();
    auto prog = p4ir::load_program(read_text_file(base + ".program.json"));
    EXPECT_TRUE(p4ir::validate(prog).empty());
    EXPECT_EQ(prog.tables.size(), 6u);
    EXPECT_FALSE(p4ir::load_entries(read_text_file(base + ".entries.json"), prog).empty());
  }
}

TEST_F(CliTest, TranslateUsageAndInputErrors) {
  EXPECT_EQ(cli({"translate", "--program", data_path("l3_router.program.json"), "--out-dir", dir_.string()}).code,
            kExitUsage);
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);

  auto text = read_text_file(data_path("l3_router.program.json"));
  auto pos = text.find("\"fib\"");
  while (pos != std::string::npos) {
    text.replace(pos, 5, "\"hymos_fib\"");
    pos = text.find("\"fib\"", pos + 11);
  }
  write_file_atomic(dir_ / "bad.json", text);
  auto r = cli({"translate", "--program", (dir_ / "bad.json").string(), "--topology", data_path("topo_2x8_gen3x8.json"),
                "--out-dir", (dir_ / "out").string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("hymos_fib"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out" / "card0.program.json"));
}

TEST_F(CliTest, CheckExitCodes) {
  auto ok = cli({"check", "--topology", data_path("topo_2x8_gen3x8.json")});
  EXPECT_EQ(ok.code, kExitOk);
  EXPECT_NE(ok.out.find("62.5%"), std::string::npos);
  auto bad = cli({"check", "--topology", data_path("topo_blocking_2x100g_gen2x8.json")});
  EXPECT_EQ(bad.code, kExitCapacity);
  EXPECT_NE(bad.out.find("BLOCKING"), std::string::npos);

  write_file_atomic(dir_ / "t.json", R"({"cards": [{"id": 0, "link": {"gen": 3, "lanes": 8}, "ports": [{"global_id": 0, "rate_gbps": 10}]},
                                                   {"id": 1, "link": {"gen": 1, "lanes": 1}, "ports": []}]})");
  auto empty = cli({"check", "--topology", (dir_ / "t.json").string()});
  EXPECT_EQ(empty.code, kExitOk);
  EXPECT_NE(empty.out.find(" 0.0%"), std::string::npos);
  EXPECT_EQ(cli({"check", "--topology", (dir_ / "missing.json").string()}).code, kExitInput);
  EXPECT_EQ(cli({"check"}).code, kExitUsage);
}

TEST_F(CliTest, RunIsDeterministicPerSeed) {
  auto exp = small_experiment();
  auto a = (dir_ / "a.csv").string(), b = (dir_ / "b.csv").string();
  ASSERT_EQ(cli({"run", "--experiment", exp, "--out", a, "--seed", "42"}).code, kExitOk);
  ASSERT_EQ(cli({"run", "--experiment", exp, "--out", b, "--seed", "42"}).code, kExitOk);
  auto csv = read_text_file(a);
  EXPECT_EQ(csv, read_text_file(b));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_EQ(csv.find("norm_latency"), std::string::npos);
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 4), "run,");
}

TEST_F(CliTest, SeedPrecedence) {
  auto exp = small_experiment();
  auto plain = cli({"run", "--experiment", exp}).out;
  auto env7 = cli({"run", "--experiment", exp}, "7").out;
  auto flag7 = cli({"run", "--experiment", exp, "--seed", "7"}).out;
  auto both = cli({"run", "--experiment", exp, "--seed", "7"}, "9").out;
  EXPECT_NE(plain, env7);
  EXPECT_EQ(env7, flag7);
  EXPECT_EQ(both, flag7);
  EXPECT_EQ(cli({"run", "--experiment", exp}, "seven").code, kExitUsage);
}

TEST_F(CliTest, SweepWithBaselineAddsNormLatency) {
  auto exp = small_experiment();
  auto out = (dir_ / "s.csv").string();
  auto r = cli({"sweep", "--experiment", exp, "--param", "load", "--values", "0.2,0.5", "--baseline", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(read_text_file(out));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, std::string(kCsvHeader) + ",norm_latency");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    auto norm = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_GE(norm, 1.0);
  }
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, SweepUsageErrors) {
  auto exp = small_experiment();
  EXPECT_EQ(cli({"sweep", "--experiment", exp, "--param", "load", "--values", ""}).code, kExitUsage);
  EXPECT_EQ(cli({"sweep", "--experiment", exp, "--param", "load", "--values", "0.2,abc"}).code, kExitUsage);
  EXPECT_EQ(cli({"sweep", "--experiment", exp, "--param", "ttl", "--values", "1"}).code, kExitUsage);
  EXPECT_EQ(cli({"sweep", "--experiment", exp, "--values", "1"}).code, kExitUsage);
}

TEST_F(CliTest, ConfigErrorsLeaveNoPartialOutput) {
  auto exp = small_experiment(R"(, "pipeline_depth": 1000)");
  auto out = dir_ / "x.csv";
  auto r = cli({"sweep", "--experiment", exp, "--param", "load", "--values", "0.2,0.4", "--out", out.string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(cli({"sweep", "--experiment", small_experiment(), "--param", "load", "--values", "0.2,1.5", "--out",
                 out.string()}).code,
            kExitInput);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(cli({"run", "--experiment", (dir_ / "nope.json").string()}).code, kExitInput);
}

TEST(FormatCsv, NanWhenBaselineHasNoSamples) {
  sim::SweepRow row;
  row.hymos.param = "0";
  row.baseline = sim::StatsReport{};
  auto csv = format_csv({&row, 1}, true);
  EXPECT_EQ(csv.substr(csv.find('\n') + 1), "0,0.000000,0.000000,0.000000,0.000000,0.000000,0,0,0,nan\n");
}

}  // namespace
}  // namespace hymos::cli
