#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "app.hpp"

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("qladder_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qladder");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    err_.str("");
    return qladder::cli::run_app(static_cast<int>(argv.size()), argv.data(), err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

  fs::path dir_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, StationaryWritesDistribution) {
  const auto cfg = write_config("s.json", R"({"ladder": {"a": 0.5, "q": [0.6, 0.4]}})");
  ASSERT_EQ(run({"stationary", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0) << err_.str();
  const auto summary = read_json(dir_ / "out" / "summary.json");
  EXPECT_NEAR(summary["f1"].get<double>(), 1.0 / 1.4, 1e-12);
  EXPECT_NEAR(summary["second_eigenvalue_modulus"].get<double>(), 0.3, 1e-12);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "stationary.csv"));
}

TEST_F(CliTest, InvalidLadderExitsTwoWithoutOutput) {
  const auto cfg = write_config("s.json", R"({"ladder": {"a": 0.5, "q": [0.5, 0.4]}})");
  EXPECT_EQ(run({"stationary", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2);
  EXPECT_NE(err_.str().find("error"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, MalformedJsonAndMissingConfig) {
  const auto cfg = write_config("bad.json", "{\"ladder\": ");
  EXPECT_EQ(run({"stationary", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2);
  EXPECT_EQ(run({"stationary", "--config", (dir_ / "missing.json").string()}), 2);
  EXPECT_EQ(run({"nonsense"}), 2);
  EXPECT_EQ(run({}), 2);
}

TEST_F(CliTest, DensityTable) {
  const auto cfg = write_config("d.json", R"({"density": {"m": 20, "a": 0.5, "q_m": [0.1, 0.5]}})");
  ASSERT_EQ(run({"density", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0) << err_.str();
  std::istringstream summary(slurp(dir_ / "out" / "summary.csv"));
  std::string line;
  std::getline(summary, line);
  EXPECT_EQ(line, "index,q_m,mu,x1,at_boundary");
  std::vector<double> mu;
  while (std::getline(summary, line)) {
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < 3; ++c) std::getline(row, cell, ',');
    mu.push_back(std::stod(cell));
  }
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_NEAR(mu[0], 1.0288, 1e-4);
  EXPECT_NEAR(mu[1], 0.5371, 1e-4);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "profile_000.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "profile_001.csv"));
}

TEST_F(CliTest, DensityRejectsBoundaryQm) {
  const auto cfg = write_config("d.json", R"({"density": {"m": 20, "a": 0.5, "q_m": 0}})");
  EXPECT_EQ(run({"density", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, BellmanLeapfrogAndZeroCost) {
  const auto cfg = write_config(
      "b.json",
      R"({"bellman": {"a": 0.5, "lambda": 1.05, "beta0": 0.9, "C": 0, "m": 40, "j_min": 0, "mode": "leapfrog"}})");
  ASSERT_EQ(run({"bellman", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0) << err_.str();
  EXPECT_EQ(read_json(dir_ / "out" / "result.json")["support_size"].get<int>(), 1);
  const std::string values = slurp(dir_ / "out" / "values.csv");
  EXPECT_EQ(values.rfind("j,V,V_LF,V_NLF\n", 0), 0u);
}

TEST_F(CliTest, BellmanImitationReportsSupport) {
  const auto cfg = write_config("b.json", R"({"bellman": {"a": 0.5, "lambda": 1.05, "beta0": 0.9, "C": 2,
      "m": 40, "j_min": 0, "mode": "imitation", "q_m": 0.3}})");
  ASSERT_EQ(run({"bellman", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0) << err_.str();
  const auto result = read_json(dir_ / "out" / "result.json");
  EXPECT_EQ(result["support_size"].get<int>(), 15);
  EXPECT_FALSE(result["visited_support_sizes"].empty());
}

TEST_F(CliTest, BrwIsByteReproducibleAndAnalyzable) {
  const auto cfg = write_config("r.json", R"({"seed": 7, "replicas": 2,
      "brw": {"a": 0.25, "mu": 1.0, "policy": {"type": "keep_top_n", "n": 1000}, "steps": 3000,
              "snapshot_every": 10}})");
  const fs::path one = dir_ / "one";
  const fs::path two = dir_ / "two";
  ASSERT_EQ(run({"brw", "--config", cfg.string(), "--out", one.string()}), 0) << err_.str();
  ASSERT_EQ(run({"brw", "--config", cfg.string(), "--out", two.string()}), 0) << err_.str();
  for (const char* f : {"manifest.json", "replica_000/trajectory.csv", "replica_001/snapshots.csv"}) {
    EXPECT_EQ(slurp(one / f), slurp(two / f)) << f;
  }
  EXPECT_EQ(read_json(one / "manifest.json")["runs"].size(), 2u);

  const auto acfg = write_config("a.json", R"({"analyze": {"input": ")" + one.generic_string() +
                                                R"(", "burn_in": 500}})");
  ASSERT_EQ(run({"analyze", "--config", acfg.string(), "--out", (dir_ / "an").string()}), 0) << err_.str();
  const auto verdict = read_json(dir_ / "an" / "verdict.json");
  EXPECT_TRUE(verdict["velocity"]["below_v_c"].get<bool>());
  EXPECT_TRUE(fs::exists(dir_ / "an" / "velocity.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "an" / "shape.csv"));
}

TEST_F(CliTest, BrwSeedOverrideChangesOutput) {
  const auto cfg = write_config("r.json", R"({"seed": 7,
      "brw": {"a": 0.25, "mu": 1.0, "policy": {"type": "window", "width": 6}, "steps": 500}})");
  ASSERT_EQ(run({"brw", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0) << err_.str();
  ASSERT_EQ(run({"brw", "--config", cfg.string(), "--out", (dir_ / "b").string(), "--seed", "8"}), 0);
  EXPECT_NE(slurp(dir_ / "a" / "replica_000" / "trajectory.csv"),
            slurp(dir_ / "b" / "replica_000" / "trajectory.csv"));
  EXPECT_EQ(read_json(dir_ / "b" / "manifest.json")["base_seed"].get<std::uint64_t>(), 8u);
}

TEST_F(CliTest, BrwRequiresSeedAndValidPolicy) {
  const auto no_seed = write_config(
      "r.json", R"({"brw": {"a": 0.25, "mu": 1.0, "policy": {"type": "keep_top_n", "n": 10}, "steps": 10}})");
  EXPECT_EQ(run({"brw", "--config", no_seed.string(), "--out", (dir_ / "o").string()}), 2);
  const auto bad = write_config(
      "p.json", R"({"seed": 1, "brw": {"a": 0.25, "mu": 1.5, "policy": {"type": "keep_top_n", "n": 10}, "steps": 10}})");
  EXPECT_EQ(run({"brw", "--config", bad.string(), "--out", (dir_ / "o").string()}), 2);
  EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(CliTest, AnalyzeMissingInputExitsThree) {
  const auto acfg = write_config("a.json", R"({"analyze": {"input": ")" + (dir_ / "nowhere").generic_string() +
                                                R"(", "burn_in": 10}})");
  EXPECT_EQ(run({"analyze", "--config", acfg.string(), "--out", (dir_ / "an").string()}), 3);
  EXPECT_FALSE(fs::exists(dir_ / "an"));
}

TEST_F(CliTest, AnalyzeCorruptTrajectoryExitsThree) {
  const auto cfg = write_config("r.json", R"({"seed": 3,
      "brw": {"a": 0.25, "mu": 1.0, "policy": {"type": "keep_top_n", "n": 100}, "steps": 400}})");
  ASSERT_EQ(run({"brw", "--config", cfg.string(), "--out", (dir_ / "run").string()}), 0) << err_.str();
  std::ofstream(dir_ / "run" / "replica_000" / "trajectory.csv", std::ios::app) << "garbage,row\n";
  const auto acfg = write_config("a.json", R"({"analyze": {"input": ")" + (dir_ / "run").generic_string() +
                                                R"(", "burn_in": 10}})");
  EXPECT_EQ(run({"analyze", "--config", acfg.string(), "--out", (dir_ / "an").string()}), 3);
}
