#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using ginprod::cli::ordered_json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ginprod");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ginprod::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ginprod_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliFiles, ScatterIsDeterministicAcrossThreadCounts) {
  const auto a = invoke({"scatter", "--beta", "4", "--dim", "2", "--time", "20", "--reps", "6", "--seed", "17",
                         "--threads", "1", "--out", path("a.csv")});
  const auto b = invoke({"scatter", "--beta", "4", "--dim", "2", "--time", "20", "--reps", "6", "--seed", "17",
                         "--threads", "3", "--out", path("b.csv")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_TRUE(fs::exists(path("a.csv.meta.json")));
  const auto meta = ordered_json::parse(slurp(path("a.csv.meta.json")));
  EXPECT_EQ(meta["config"]["seed"], 17);
  EXPECT_EQ(meta["expected"].size(), 2u);
  EXPECT_EQ(csv_rows(slurp(path("a.csv"))).size(), 1u + 6u * 2u);
}

TEST(Cli, ZeroRepsGivesHeaderOnly) {
  const auto r = invoke({"exponents", "--reps", "0", "--time", "5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "rep,n,lambda,gamma,theta\n");
}

TEST(Cli, SingleDimensionEigenAndSingularExponentsAgree) {
  const auto r = invoke({"exponents", "--dim", "1", "--time", "40", "--reps", "5", "--beta", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t k = 1; k < rows.size(); ++k)
    EXPECT_NEAR(std::stod(rows[k][2]), std::stod(rows[k][3]), 1e-12);
}

TEST(Cli, ConvergenceWithOneFactor) {
  const auto r = invoke({"convergence", "--dim", "3", "--time", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = ordered_json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 3u);
  for (const auto& row : j["rows"]) EXPECT_EQ(row["t"], 1);
  EXPECT_EQ(j["band"].size(), 3u);
}

TEST(Cli, NonClosingProfile) {
  // eigen exponents are null, singular ones are still reported
  const auto e = invoke({"exponents", "--dim", "2", "--nu", "0,1", "--reps", "2", "--format", "json"});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto j = ordered_json::parse(e.out);
  for (const auto& row : j["rows"]) {
    EXPECT_TRUE(row["lambda"].is_null());
    EXPECT_TRUE(row["gamma"].is_number());
  }
  const auto s = invoke({"scatter", "--dim", "2", "--nu", "0,1", "--reps", "2"});
  EXPECT_EQ(s.code, 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"scatter", "--beta", "3", "--time", "2"}).code, 1);
  EXPECT_EQ(invoke({"scatter", "--time", "2", "--format", "xml"}).code, 1);
  EXPECT_EQ(invoke({"scatter", "--reps", "2"}).code, 1);  // constant nu needs --time
  EXPECT_EQ(invoke({"scatter", "--time", "2", "--precision", "20"}).code, 1);
  EXPECT_EQ(invoke({"exponents", "--time", "2", "--dim", "0"}).code, 1);
  EXPECT_EQ(invoke({"bogus"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, UnwritableOutputIsReported) {
  const auto r = invoke({"exponents", "--time", "2", "--out", "/nonexistent_dir/x.csv"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, VerifyPasses) {
  const auto r = invoke({"verify", "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = ordered_json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_GT(j["checks"].size(), 10u);
}

TEST(Cli, ScatterRingsAndRealFraction) {
  const auto r = invoke({"scatter", "--beta", "2", "--dim", "3", "--time", "200", "--reps", "40", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = ordered_json::parse(r.out);
  std::vector<double> sum(3, 0.0);
  for (const auto& row : j["rows"]) sum[row["n"].get<std::size_t>() - 1] += row["modulus_rescaled"].get<double>();
  for (std::size_t k = 0; k < 3; ++k) {
    const double mu = j["expected"][k]["mu"].get<double>();
    EXPECT_NEAR(sum[k] / 40 / std::exp(mu), 1.0, 0.01) << k;
  }
  const auto real = invoke({"scatter", "--beta", "1", "--dim", "3", "--time", "200", "--reps", "100", "--format", "json"});
  ASSERT_EQ(real.code, 0) << real.err;
  EXPECT_GE(ordered_json::parse(real.out)["fully_real_fraction"].get<double>(), 0.999);
}
