#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lanmsff_cli.hpp"

using namespace lanmsff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "lanmsff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lanmsff_cli_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream f(p);
  return nlohmann::json::parse(f);
}

const std::vector<std::string> kMiniature{"--classes", "3", "--input-size", "32", "--widths", "6,12,6,8"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST(Cli, AuditReportsDefaultArchitecture) {
  const auto dir = fresh_dir("audit");
  auto r = run({"--out", dir.string(), "audit"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("354614"), std::string::npos) << r.out;
  const auto j = read_json(dir / "audit.json");
  EXPECT_EQ(j["grand_total"], 354614);
  EXPECT_EQ(j["fusion_length"], 156);
  EXPECT_TRUE(fs::exists(dir / "resolved_config.json"));
  fs::remove_all(dir);
}

TEST(Cli, MetricsPrintsDensityAndVariance) {
  const auto dir = fresh_dir("metrics");
  auto r = run({"--out", dir.string(), "metrics", "--acc", "70.44", "--params", "358000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "ID 196.76\n");
  r = run({"--out", dir.string(), "metrics", "--acc", "90.77", "--pose-acc", "89.44,91.18,92.04,91.00,90.17"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "Var 0.66\n");
  EXPECT_NEAR(read_json(dir / "metrics.json")["pose_variance"].get<double>(), 0.6605, 1e-4);
  fs::remove_all(dir);
}

TEST(Cli, TrainsAblatedVariantAndEvaluates) {
  const auto dir = fresh_dir("train");
  auto args = with({"--out", dir.string(), "--seed", "3", "train", "--no-massatt", "--no-pwfs", "--epochs", "2",
                    "--batch-size", "8", "--synthetic-count", "24"},
                   kMiniature);
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"resolved_config.json", "weights.lnmf", "final_weights.lnmf", "train_log.csv", "train_log.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto cfg = read_json(dir / "resolved_config.json");
  EXPECT_EQ(cfg["model"]["enable_massatt"], false);
  EXPECT_EQ(cfg["model"]["enable_pwfs"], false);
  EXPECT_EQ(read_json(dir / "train_log.json")["epochs"].size(), 2u);

  const auto eval_dir = dir / "eval";
  r = run(with({"--out", eval_dir.string(), "eval", "--no-massatt", "--no-pwfs", "--synthetic-count", "24", "--weights",
                (dir / "weights.lnmf").string()},
               kMiniature));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(eval_dir / "metrics.json"));
  EXPECT_TRUE(fs::exists(eval_dir / "confusion.json"));

  const auto cam_dir = dir / "cam";
  r = run(with({"--out", cam_dir.string(), "gradcam", "--no-massatt", "--no-pwfs", "--synthetic-count", "24",
                "--count", "2", "--weights", (dir / "weights.lnmf").string()},
               kMiniature));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(cam_dir / "heatmaps" / "syntest0.pgm"));
  EXPECT_EQ(read_json(cam_dir / "heatmaps" / "syntest0.json")["size"], 32);

  r = run(with({"--out", eval_dir.string(), "eval", "--synthetic-count", "24", "--weights",
                (dir / "weights.lnmf").string()},
               kMiniature));
  EXPECT_EQ(r.code, 3) << "weights of another architecture";
  fs::remove_all(dir);
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto dir = fresh_dir("usage");
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--out", dir.string(), "train", "--epochs", "zero"}).code, 2);
  EXPECT_EQ(run({"--out", dir.string(), "audit", "--input-size", "48"}).code, 2);
  EXPECT_EQ(run({"--out", dir.string(), "metrics", "--params", "10"}).code, 2);
  EXPECT_EQ(run({"--out", dir.string(), "eval"}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, MissingDataExitsThree) {
  const auto dir = fresh_dir("missing");
  auto r = run({"--out", dir.string(), "train", "--dataset", "fer2013", "--data", (dir / "absent.csv").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, PreparesCacheFromFixture) {
  const auto dir = fresh_dir("prepare");
  auto r = run({"--out", dir.string(), "data-prepare", "--dataset", "fer2013", "--data",
                std::string(LANMSFF_FIXTURE_DIR) + "/fer2013_fixture.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data::load_cache((dir / "samples.lnmc").string()).size(), 50u);
  fs::remove_all(dir);
}
