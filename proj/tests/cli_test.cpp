#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace disorder::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "disorder");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("disorder_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("DISORDER_OUTPUT_DIR");
  }
  void TearDown() override {
    unsetenv("DISORDER_OUTPUT_DIR");
    fs::remove_all(dir_);
  }

  std::string config(const std::string& name) const { return (fs::path(DISORDER_CONFIG_DIR) / name).string(); }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ValidateGoodAndBad) {
  EXPECT_EQ(run({"validate", config("m2.json")}).code, kSuccess);

  std::ofstream(out("bad.json")) << R"({"alphabet_size": 2, "d": 0, "x0": 0, "b": [[1.0]], "pi": [[0.0]],
    "p": [[1.5]], "pre_kernels": [[[0.8, 0.2], [0.8, 0.2]]], "post_kernels": [[[0.2, 0.8], [0.2, 0.8]]]})";
  const Result bad = run({"validate", out("bad.json")});
  EXPECT_EQ(bad.code, kValidation);
  const auto record = nlohmann::json::parse(bad.err.substr(0, bad.err.find('\n')));
  EXPECT_EQ(record["error"], "validation");

  std::ofstream(out("broken.json")) << "{";
  EXPECT_EQ(run({"validate", out("broken.json")}).code, kValidation);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kUsage);
  const Result missing_seed = run({"simulate", "--config", config("m2.json"), "--out", out("x.csv")});
  EXPECT_EQ(missing_seed.code, kUsage);
  EXPECT_EQ(nlohmann::json::parse(missing_seed.err.substr(0, missing_seed.err.find('\n')))["error"], "usage");
  EXPECT_EQ(run({"evaluate", "--config", config("m2.json"), "--rules", "cusum", "--seed", "1", "--out",
                 out("r.csv"), "--n", "10"}).code,
            kUsage);
}

TEST_F(CliTest, CrosscheckPassesOnM2) {
  const Result r = run({"crosscheck", "--config", config("m2.json"), "--horizon", "6", "--probe", "50"});
  EXPECT_EQ(r.code, kSuccess) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, SimulateIsByteReproducible) {
  const std::vector<std::string> base{"simulate", "--config", config("m3.json"), "--n", "200", "--horizon", "10",
                                      "--seed", "17", "--out"};
  auto args = base;
  args.push_back(out("a.csv"));
  ASSERT_EQ(run(args).code, kSuccess);
  args.back() = out("b.csv");
  ASSERT_EQ(run(args).code, kSuccess);
  const std::string a = slurp(out("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(out("b.csv")));
  args.back() = out("c.csv");
  args[8] = "18";
  ASSERT_EQ(run(args).code, kSuccess);
  EXPECT_NE(a, slurp(out("c.csv")));
}

TEST_F(CliTest, EvaluateWritesCsvAndJson) {
  const std::vector<std::string> args{"evaluate", "--config", config("m2.json"), "--rules", "optimal,fixed",
                                      "--n", "300", "--horizon", "10", "--seed", "3", "--out", out("r.csv"),
                                      "--json", out("r.json"), "--kmax", "5"};
  ASSERT_EQ(run(args).code, kSuccess);
  const std::string csv = slurp(out("r.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rule,metric,value");
  const auto json = nlohmann::json::parse(slurp(out("r.json")));
  EXPECT_EQ(json["rules"].size(), 2u);
  auto threaded = args;
  threaded.push_back("--threads");
  threaded.push_back("3");
  threaded[12] = out("r3.csv");
  threaded[14] = out("r3.json");
  ASSERT_EQ(run(threaded).code, kSuccess);
  EXPECT_EQ(csv, slurp(out("r3.csv")));
}

TEST_F(CliTest, OutputDirectoryOverride) {
  setenv("DISORDER_OUTPUT_DIR", dir_.c_str(), 1);
  ASSERT_EQ(run({"simulate", "--config", config("m2.json"), "--n", "5", "--horizon", "4", "--seed", "1", "--out",
                 "nested/sim.csv"}).code,
            kSuccess);
  EXPECT_TRUE(fs::exists(dir_ / "nested" / "sim.csv"));
}

TEST_F(CliTest, OracleAndValueIterate) {
  const Result oracle = run({"oracle", "--config", config("m2.json"), "--horizon", "5", "--dump", out("dump")});
  ASSERT_EQ(oracle.code, kSuccess) << oracle.err;
  const auto values = nlohmann::json::parse(oracle.out);
  EXPECT_NEAR(values["optimal_value"].get<double>(), values["optimal_value_state_indexed"].get<double>(), 1e-12);
  EXPECT_GE(values["optimal_value"].get<double>(), values["fixed_rule_value"].get<double>());
  EXPECT_TRUE(fs::exists(dir_ / "dump" / "joint.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "dump" / "history.csv"));

  const Result vi = run({"value-iterate", "--config", config("m3.json"), "--kmax", "4", "--probe", "20", "--out",
                         out("vi.csv")});
  EXPECT_EQ(vi.code, kSuccess) << vi.err;
  EXPECT_TRUE(fs::exists(out("vi.csv")));
}

}  // namespace
}  // namespace disorder::cli
