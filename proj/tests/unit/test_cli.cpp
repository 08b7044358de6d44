#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gembed/cli.hpp"
#include "gembed/cli_io.hpp"

namespace fs = std::filesystem;
using gembed::Json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gembed_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const Json& j) {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return gembed::cli::run(args, out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static Json bounds_config() {
    return Json{{"vertices", 6},
                {"space", {{"kind", "euclidean"}, {"radius", 1.0}}},
                {"g", {{"tau_x", 1.0}}},
                {"noise", {{"alpha", "inf"}, {"c", 6.0}}},
                {"S", {100, 1000, 10000}}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

}  // namespace

TEST_F(CliTest, BoundsWritesOneRowPerSampleSize) {
  const auto cfg = write_config("c.json", bounds_config());
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(run({"bounds", "--config", cfg, "--out", out}), 0) << err_.str();
  const std::string csv = slurp(fs::path(out) / "bounds.csv");
  EXPECT_EQ(csv.rfind("# gembed 0.1.0 config_hash=", 0), 0u);
  const auto rows = data_lines(csv);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].substr(0, 5), "S,r0,");
  EXPECT_EQ(rows[1].substr(0, 4), "100,");
  const Json resolved = Json::parse(slurp(fs::path(out) / "config.resolved.json"));
  EXPECT_EQ(resolved["lambda_mode"], "worst_metric");
  EXPECT_DOUBLE_EQ(resolved["resolved_inputs"]["var_const"].get<double>(), 36.0);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const auto cfg = write_config("c.json", bounds_config());
  ASSERT_EQ(run({"bounds", "--config", cfg, "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run({"bounds", "--config", cfg, "--out", (dir_ / "b").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "bounds.csv"), slurp(dir_ / "b" / "bounds.csv"));

  const Json emb{{"graph", {{"generator", "complete_ary_tree"}, {"arity", 2}, {"levels", 3}}},
                 {"calibrate", true},
                 {"S", 300},
                 {"optimizer", {{"restarts", 2}, {"steps", 60}}}};
  const auto ecfg = write_config("e.json", emb);
  ASSERT_EQ(run({"embed", "--config", ecfg, "--seed", "9", "--out", (dir_ / "c").string()}), 0) << err_.str();
  ASSERT_EQ(run({"embed", "--config", ecfg, "--seed", "9", "--out", (dir_ / "d").string()}), 0);
  for (const char* f : {"embedding.csv", "dataset.csv"}) EXPECT_EQ(slurp(dir_ / "c" / f), slurp(dir_ / "d" / f)) << f;
  ASSERT_EQ(run({"embed", "--config", ecfg, "--seed", "10", "--out", (dir_ / "e").string()}), 0);
  EXPECT_NE(slurp(dir_ / "c" / "dataset.csv"), slurp(dir_ / "e" / "dataset.csv"));
  const Json report = Json::parse(slurp(dir_ / "c" / "report.json"));
  EXPECT_EQ(report["restart_values"].size(), 3u);
}

TEST_F(CliTest, UnknownFlagFailsWithoutOutputs) {
  const auto out = dir_ / "never";
  EXPECT_EQ(run({"bounds", "--frobnicate", "--out", out.string()}), 1);
  EXPECT_FALSE(fs::exists(out));
  const Json e = Json::parse(err_.str());
  EXPECT_EQ(e["error"]["kind"], "usage");
  EXPECT_EQ(run({"nosuch"}), 1);
  EXPECT_EQ(run({}), 1);
}

TEST_F(CliTest, UnknownConfigKeyIsValidationError) {
  Json c = bounds_config();
  c["space"]["curvature"] = -1;
  const auto cfg = write_config("c.json", c);
  const auto out = dir_ / "never";
  EXPECT_EQ(run({"bounds", "--config", cfg, "--out", out.string()}), 1);
  EXPECT_FALSE(fs::exists(out));
  const Json e = Json::parse(err_.str());
  EXPECT_EQ(e["error"]["kind"], "validation");
  EXPECT_NE(e["error"]["message"].get<std::string>().find("space.curvature"), std::string::npos);
}

TEST_F(CliTest, PrecisionEnvelopeIsValidationError) {
  const Json emb{{"graph", {{"generator", "path"}, {"vertices", 4}}},
                 {"space", {{"kind", "hyperbolic"}, {"radius", 20.0}}},
                 {"g", {{"tau_x", 1.0}}},
                 {"S", 10}};
  EXPECT_EQ(run({"embed", "--config", write_config("e.json", emb), "--out", (dir_ / "x").string()}), 1);
}

TEST_F(CliTest, ReproduceExample43) {
  const auto out = dir_ / "r";
  ASSERT_EQ(run({"reproduce", "example43", "--out", out.string()}), 0) << err_.str();
  const Json j = Json::parse(out_.str());
  EXPECT_EQ(j, Json::parse(slurp(out / "example43.json")));
  const double q1 = j["calibrations"][0]["q1"]["threshold"].get<double>();
  EXPECT_NEAR(q1 / 1.19e9, 1.0, 0.02);
  EXPECT_TRUE(j["calibrations"][0].contains("old_bound_threshold"));
  EXPECT_EQ(j["calibrations"].size(), 2u);
}

TEST_F(CliTest, ReproduceRemark62d) {
  ASSERT_EQ(run({"reproduce", "remark62d", "--out", (dir_ / "r").string()}), 0) << err_.str();
  const Json j = Json::parse(out_.str());
  const double lg = j["old_bound_threshold_log10"].get<double>();
  EXPECT_GE(lg, 70.0);
  EXPECT_LE(lg, 76.0);
  EXPECT_GE(j["log10_ratio"].get<double>(), 60.0);
}

TEST_F(CliTest, RcEstimateAndExperimentSummaries) {
  const Json rc{{"graph", {{"generator", "path"}, {"vertices", 4}}},
                {"space", {{"kind", "euclidean"}, {"radius", 1.0}}},
                {"g", {{"tau_x", 1.0}}},
                {"S", 8},
                {"trials", 30},
                {"optimizer", {{"restarts", 2}, {"steps", 40}}}};
  ASSERT_EQ(run({"rc-estimate", "--config", write_config("rc.json", rc), "--out", (dir_ / "rc").string()}), 0)
      << err_.str();
  const Json s = Json::parse(slurp(dir_ / "rc" / "summary.json"));
  EXPECT_TRUE(s["within_theorem_bound"].get<bool>());
  EXPECT_EQ(s["trials"], 30);
  EXPECT_EQ(data_lines(slurp(dir_ / "rc" / "rc.csv")).size(), 31u);

  const Json ex{{"graph", {{"generator", "complete_ary_tree"}, {"arity", 2}, {"levels", 2}}},
                {"S", {50, 200}},
                {"trials", 10},
                {"optimizer", {{"restarts", 1}, {"steps", 40}}}};
  ASSERT_EQ(run({"experiment", "--config", write_config("x.json", ex), "--out", (dir_ / "x").string()}), 0)
      << err_.str();
  EXPECT_EQ(data_lines(slurp(dir_ / "x" / "sweep.csv")).size(), 3u);
  EXPECT_EQ(data_lines(slurp(dir_ / "x" / "trials.csv")).size(), 21u);
}

TEST(CliBinary, ExitCodes) {
  const std::string exe = GEMBED_CLI_PATH;
  EXPECT_EQ(std::system((exe + " --version > /dev/null").c_str()), 0);
  const int rc = std::system((exe + " bounds --bogus 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(rc));
  EXPECT_EQ(WEXITSTATUS(rc), 1);
}
