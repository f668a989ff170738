#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "depthfuse/cli.hpp"
#include "json.hpp"

using namespace depthfuse;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("depthfuse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "depthfuse");
    return run_cli(args);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesAllOutputs) {
  const auto out = dir_ / "sim";
  ::testing::internal::CaptureStdout();
  const int rc = run({"simulate", "--scenario", "continuous", "--seed", "2", "--duration", "10",
                      "--out", out.string()});
  EXPECT_TRUE(::testing::internal::GetCapturedStdout().empty());
  ASSERT_EQ(rc, kExitOk);
  for (const char* f : {"stream.csv", "trace.csv", "metrics.json", "plotdata.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto j = nlohmann::json::parse(slurp(out / "metrics.json"));
  EXPECT_EQ(j.size(), 3u);
}

TEST_F(CliTest, DiscreteSeedSevenFusedBeatsDepth) {
  const auto out = dir_ / "d7";
  ASSERT_EQ(run({"simulate", "--scenario", "discrete", "--seed", "7", "--out", out.string()}),
            kExitOk);
  double fused = 0.0, depth = 0.0;
  for (const auto& r : nlohmann::json::parse(slurp(out / "metrics.json"))) {
    if (r["method"] == "fused") fused = r["rmse_cm"];
    if (r["method"] == "depth") depth = r["rmse_cm"];
  }
  EXPECT_LT(fused, depth);
}

TEST_F(CliTest, SimulateIsDeterministicAndReplayCloses) {
  const auto a = dir_ / "a", b = dir_ / "b", r = dir_ / "r";
  for (const auto& d : {a, b}) {
    ASSERT_EQ(run({"simulate", "--scenario", "lateral", "--seed", "42", "--duration", "15",
                   "--out", d.string()}),
              kExitOk);
  }
  for (const char* f : {"stream.csv", "trace.csv", "metrics.json", "plotdata.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  ASSERT_EQ(run({"replay", "--log", (a / "stream.csv").string(), "--out", r.string()}), kExitOk);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(r / "trace.csv"));
  EXPECT_EQ(slurp(a / "metrics.json"), slurp(r / "metrics.json"));
}

TEST_F(CliTest, MissingOutIsUsageError) {
  EXPECT_EQ(run({"simulate", "--scenario", "lateral"}), kExitConfig);
}

TEST_F(CliTest, UnknownScenarioIsUsageError) {
  EXPECT_EQ(run({"simulate", "--scenario", "diagonal", "--out", dir_.string()}), kExitConfig);
}

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run({}), kExitConfig); }

TEST_F(CliTest, InvalidParameterIsConfigError) {
  EXPECT_EQ(run({"simulate", "--scenario", "lateral", "--sigma-z-sq", "-1", "--out",
                 (dir_ / "x").string()}),
            kExitConfig);
}

TEST_F(CliTest, ReplayWithoutGroundTruthSkipsMetrics) {
  spit(dir_ / "field.csv",
       "t,sh_px,depth_cb_m,gt_cb_m\n0.000000,210.0,2.1,\n0.033333,210.2,2.1,\n0.066667,,2.09,\n");
  const auto out = dir_ / "field";
  ASSERT_EQ(run({"replay", "--log", (dir_ / "field.csv").string(), "--out", out.string()}),
            kExitOk);
  EXPECT_TRUE(fs::exists(out / "trace.csv"));
  EXPECT_FALSE(fs::exists(out / "metrics.json"));
}

TEST_F(CliTest, EmptyLogIsError) {
  spit(dir_ / "empty.csv", "");
  EXPECT_EQ(run({"replay", "--log", (dir_ / "empty.csv").string(), "--out", dir_.string()}),
            kExitConfig);
  spit(dir_ / "header_only.csv", "t,sh_px,depth_cb_m,gt_cb_m\n");
  EXPECT_EQ(run({"replay", "--log", (dir_ / "header_only.csv").string(), "--out", dir_.string()}),
            kExitConfig);
}

TEST_F(CliTest, MalformedLogIsError) {
  spit(dir_ / "bad.csv", "t,sh_px,depth_cb_m,gt_cb_m\n0.0,abc,2.0,\n");
  EXPECT_EQ(run({"replay", "--log", (dir_ / "bad.csv").string(), "--out", dir_.string()}),
            kExitConfig);
}

TEST_F(CliTest, MissingLogIsIoError) {
  EXPECT_EQ(run({"replay", "--log", (dir_ / "nope.csv").string(), "--out", dir_.string()}),
            kExitIo);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  spit(dir_ / "file", "x");
  EXPECT_EQ(run({"simulate", "--scenario", "lateral", "--duration", "1", "--out",
                 (dir_ / "file" / "sub").string()}),
            kExitIo);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  spit(dir_ / "params.cfg", "scenario=continuous\nseed=5\nduration=4\n");
  const auto from_file = dir_ / "file", from_flags = dir_ / "flags", overridden = dir_ / "over",
             seed6 = dir_ / "seed6";
  ASSERT_EQ(run({"simulate", "--config", (dir_ / "params.cfg").string(), "--out",
                 from_file.string()}),
            kExitOk);
  ASSERT_EQ(run({"simulate", "--scenario", "continuous", "--seed", "5", "--duration", "4",
                 "--out", from_flags.string()}),
            kExitOk);
  EXPECT_EQ(slurp(from_file / "stream.csv"), slurp(from_flags / "stream.csv"));

  ASSERT_EQ(run({"simulate", "--config", (dir_ / "params.cfg").string(), "--seed", "6", "--out",
                 overridden.string()}),
            kExitOk);
  ASSERT_EQ(run({"simulate", "--scenario", "continuous", "--seed", "6", "--duration", "4",
                 "--out", seed6.string()}),
            kExitOk);
  EXPECT_EQ(slurp(overridden / "stream.csv"), slurp(seed6 / "stream.csv"));
  EXPECT_NE(slurp(overridden / "stream.csv"), slurp(from_file / "stream.csv"));
}

TEST_F(CliTest, MissingConfigFileIsIoError) {
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "absent.cfg").string(), "--scenario", "lateral",
                 "--out", dir_.string()}),
            kExitIo);
}

TEST_F(CliTest, FilterOptionsChangeTheTrace) {
  const auto a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run({"simulate", "--scenario", "lateral", "--duration", "5", "--out", a.string()}),
            kExitOk);
  ASSERT_EQ(run({"simulate", "--scenario", "lateral", "--duration", "5", "--sigma-z-sq", "0.5",
                 "--out", b.string()}),
            kExitOk);
  EXPECT_EQ(slurp(a / "stream.csv"), slurp(b / "stream.csv"));
  EXPECT_NE(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
}
