#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "tospec/csv.hpp"

namespace fs = std::filesystem;
using namespace tospec::cli;

namespace {

constexpr const char* kDoubling = R"([map]
family = linear
degree = 2
box_lo = -0.05
box_hi = 0.05
[weight]
kind = constant
value = 0.5
[grid]
N = 32
[contour]
K = 64
)";

constexpr const char* kReference = R"([map]
family = sine
box_lo = -0.05
box_hi = 0.05
[weight]
kind = one_over_Tprime
[grid]
N = 32
[contour]
K = 64
)";

struct CliResult {
  int code = 0;
  std::string out, err;
  fs::path dir;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("tospec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  CliResult run(const std::string& command, const std::string& config, const std::string& out_name = "out") {
    const fs::path cfg = root_ / (out_name + ".ini");
    std::ofstream(cfg) << config;
    CliResult r;
    r.dir = root_ / out_name;
    std::vector<std::string> args{"tospec", command, "--config", cfg.string(), "--out", r.dir.string(), "--quiet"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    r.code = run_cli(int(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  fs::path root_;
};

std::vector<std::vector<std::string>> read_rows(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(tospec::csv::split(line));
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_F(Cli, SpectrumOnDoublingHasUnitLead) {
  const CliResult r = run("spectrum", kDoubling);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(r.dir / "spectrum.csv");
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "re", "im", "modulus"}));
  EXPECT_NEAR(std::stod(rows[1][3]), 1.0, 1e-10);
  for (const char* name : {"spectrum.csv", "lead_eigenfunction.csv", "reliability.csv"}) {
    EXPECT_TRUE(fs::exists(r.dir / name)) << name;
  }
}

TEST_F(Cli, NonExpandingBoxIsAConfigError) {
  std::string config = kReference;
  config.replace(config.find("-0.05"), 5, "-0.2");
  const CliResult r = run("spectrum", config);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("expansion"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownKeysAndBadExponentsAreConfigErrors) {
  EXPECT_EQ(run("spectrum", std::string(kDoubling) + "[holder]\nalpah = 0.5\n").code, 2);
  EXPECT_EQ(run("spectrum", std::string(kDoubling) + "[holder]\nalpha = 0.3\nbeta = 0.4\n").code, 2);
  EXPECT_EQ(run("spectrum", std::string(kDoubling) + "[plotting]\nstyle = 1\n").code, 2);
  EXPECT_EQ(run("spectrum", std::string(kDoubling) + "[scan]\noffsets = 0.01, 0.02, 0.005\n").code, 2);
}

TEST_F(Cli, NonPowerOfTwoGridWarns) {
  std::string config = kDoubling;
  config.replace(config.find("N = 32"), 6, "N = 24");
  const CliResult r = run("spectrum", config);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.err.find("24"), std::string::npos);
}

TEST_F(Cli, ResponseFdErrorsDecrease) {
  const CliResult r = run("response", kReference);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(r.dir / "du_resolvent_check.csv");
  ASSERT_EQ(rows.size(), 5u);  // header, three steps, hash
  for (std::size_t i = 2; i < 4; ++i) EXPECT_LT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
  const auto proj = read_rows(r.dir / "du_projector_check.csv");
  EXPECT_EQ(proj[1].back(), "1");
}

TEST_F(Cli, ResponseOfIndependentFamilyIsZero) {
  const CliResult r = run("response", kDoubling);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(r.dir / "du_resolvent_check.csv");
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(std::stod(rows[i][2]), 0.0);
  EXPECT_EQ(std::stod(read_rows(r.dir / "du_projector_check.csv")[1][0]), 0.0);
}

TEST_F(Cli, ContourTouchingSpectrumIsNumericalFailure) {
  const CliResult r = run("response", std::string(kReference) + "radius = 1.0\ncenter_re = 1\n");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("ContourTooClose"), std::string::npos) << r.err;
}

TEST_F(Cli, LyOnDoublingMatchesClosedForm) {
  const CliResult r = run("ly", std::string(kDoubling) + "[holder]\nalpha = 0.6\nbeta = 0.1\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(r.dir / "ly.csv");
  ASSERT_EQ(rows[0][1], "s_n_alpha");
  for (int n = 1; n <= 5; ++n) {
    EXPECT_EQ(std::stoi(rows[n][0]), n);
    EXPECT_NEAR(std::stod(rows[n][1]), std::pow(2.0, -n * 1.6), 1e-12);
  }
  EXPECT_TRUE(fs::exists(r.dir / "ly_check.csv"));
}

TEST_F(Cli, HolderScanFooterSlope) {
  const CliResult r = run("holder-scan", kReference);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"scan.csv", "projector_scan.csv"}) {
    const auto rows = read_rows(r.dir / name);
    const auto& footer = rows[rows.size() - 2];
    ASSERT_EQ(footer[0], "fitted_slope") << name;
    EXPECT_GE(std::stod(footer[1]), std::stod(footer[3]) - 0.1) << name;
  }
}

TEST_F(Cli, ProjectorOnDoublingIsIdempotent) {
  const CliResult r = run("projector", kDoubling);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(r.dir / "projector_report.csv");
  EXPECT_EQ(rows[0][7], "idempotence");
  EXPECT_LT(std::stod(rows[1][7]), 1e-8);
  EXPECT_NEAR(std::stod(rows[1][5]), 1.0, 1e-10);
}

TEST_F(Cli, OutputIsDeterministicAndStamped) {
  const CliResult a = run("spectrum", kReference, "a");
  const CliResult b = run("spectrum", kReference, "b");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const std::string stamp = "# config-hash: " + hex_hash(parse_config(kReference).hash) + "\n";
  for (const auto& entry : fs::directory_iterator(a.dir)) {
    const std::string text = slurp(entry.path());
    EXPECT_EQ(text, slurp(b.dir / entry.path().filename())) << entry.path();
    ASSERT_GE(text.size(), stamp.size());
    EXPECT_EQ(text.substr(text.size() - stamp.size()), stamp) << entry.path();
  }
}

TEST(ConfigHash, IgnoresLayoutButNotValues) {
  const auto a = parse_config("[grid]\nN = 32\n[holder]\nalpha = 0.6\n");
  const auto b = parse_config("[holder]\n  alpha=0.6\n\n[grid]\nN=32\n");
  const auto c = parse_config("[grid]\nN = 32\n[holder]\nalpha = 0.7\n");
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
