#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome koca(const std::string& args) {
  const std::string cmd = std::string(KOCA_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) o.out.append(buf.data(), got);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("koca_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, SingleHeadRun) {
  const Outcome o = koca("run --n 1 --p 1 --k 1 --tx-range 10 --seed 1");
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(line_count(o.out), 3u);  // header, one rep, summary
  EXPECT_NE(o.out.find("\nsummary,"), std::string::npos);
  // one cluster, three time units
  std::stringstream ss(o.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(row.substr(row.rfind(',') + 1), "3");
}

TEST(Cli, ThirtyRepsPlusSummary) {
  const auto path = scratch("r.csv");
  const Outcome o = koca("run --n 400 --l 100 --d 14 --k 2 --p 0.15 --seed 7 --reps 30 --out " +
                         path.string());
  ASSERT_EQ(o.code, 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(line_count(ss.str()), 32u);
  std::filesystem::remove(path);
}

TEST(Cli, MissingKIsUsageError) {
  EXPECT_EQ(koca("run --n 50 --d 7 --seed 1").code, 2);
}

TEST(Cli, MissingSeedIsUsageError) {
  EXPECT_EQ(koca("run --n 50 --d 7 --k 1").code, 2);
}

TEST(Cli, RangeAndDegreeAreExclusive) {
  EXPECT_EQ(koca("run --n 50 --d 7 --tx-range 5 --k 1 --seed 1").code, 2);
}

TEST(Cli, BadValueIsUsageError) {
  EXPECT_EQ(koca("run --n 50 --d 7 --k 1 --seed 1 --p 2").code, 2);
  EXPECT_EQ(koca("run --n 50 --d 7 --k 1 --seed 1 --format xml").code, 2);
  EXPECT_EQ(koca("frobnicate").code, 2);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::string args = "run --n 200 --d 10 --k 2 --seed 11 --reps 5 --channel lossy --per 0.05";
  const Outcome a = koca(args), b = koca(args + " --threads 2");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, JsonFormat) {
  const Outcome o = koca("run --n 100 --d 8 --k 1 --seed 3 --reps 2 --format json");
  ASSERT_EQ(o.code, 0);
  const auto doc = nlohmann::json::parse(o.out);
  EXPECT_EQ(doc["replications"].size(), 2u);
  EXPECT_EQ(doc["summary"]["rep"], "summary");
  EXPECT_EQ(doc["summary"]["k"], 1);
}

TEST(Cli, SweepRowsPerCell) {
  const Outcome o = koca("sweep --p 0.05,0.15,0.3,0.5 --d 14 --k 2 --n 400 --reps 2 --seed 1");
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(line_count(o.out), 5u);
}

TEST(Cli, SweepWithAnalysisAddsColumns) {
  const Outcome o = koca("sweep --d 7,14 --k 1 --n 200 --p 0.15 --reps 2 --seed 1 --with-analysis");
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("pred_csize"), std::string::npos);
  EXPECT_EQ(line_count(o.out), 3u);
}

TEST(Cli, SweepEmptyListIsUsageError) {
  EXPECT_EQ(koca("sweep --p , --d 14 --k 2 --n 400 --seed 1").code, 2);
  EXPECT_EQ(koca("sweep --p \"\" --d 14 --k 2 --n 400 --seed 1").code, 2);
}

TEST(Cli, LossySweep) {
  const Outcome o = koca("sweep --per 0,0.02,0.05,0.10 --channel lossy --d 14 --k 2 --n 200 --p 0.15 --reps 2 --seed 4");
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(line_count(o.out), 5u);
}

TEST(Cli, VerifyAllHeadsAlwaysCovers) {
  const Outcome o = koca("verify --n 60 --d 5 --k 1 --p 1 --seed 2 --reps 3");
  EXPECT_NE(o.code, 2);
  EXPECT_EQ(o.out.find("coverage FAIL"), std::string::npos);
  EXPECT_EQ(line_count(o.out), 3u);
}

TEST(Cli, VerifyKnownGoodConfig) {
  EXPECT_EQ(koca("verify --n 400 --d 14 --k 3 --p 0.15 --seed 5 --reps 3").code, 0);
}

TEST(Cli, VerifyFirstWaveOnlyReportsWitness) {
  const Outcome o = koca("verify --n 200 --d 5 --k 1 --p 0.05 --seed 3 --first-wave-only");
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("uncovered node"), std::string::npos);
}

TEST(Cli, ConfigFileWithOverride) {
  const auto path = scratch("run.cfg");
  {
    std::ofstream cfg(path);
    cfg << "# sample\nn = 150\nd = 9\nk = 2\nseed = 4\nreps = 2\n";
  }
  const Outcome fromFile = koca("run --config " + path.string());
  const Outcome flags = koca("run --n 150 --d 9 --k 2 --seed 4 --reps 2");
  ASSERT_EQ(fromFile.code, 0);
  EXPECT_EQ(fromFile.out, flags.out);
  const Outcome overridden = koca("run --config " + path.string() + " --k 1");
  const Outcome direct = koca("run --n 150 --d 9 --k 1 --seed 4 --reps 2");
  EXPECT_EQ(overridden.out, direct.out);
  std::filesystem::remove(path);
}

TEST(Cli, HelpExitsCleanly) {
  EXPECT_EQ(koca("--help").code, 0);
}
