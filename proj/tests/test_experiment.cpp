#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "koca/experiment.hpp"

using namespace koca;

namespace {

SimConfig small(std::size_t reps = 4) {
  SimConfig cfg;
  cfg.n = 120;
  cfg.dTarget = 9;
  cfg.k = 2;
  cfg.seed = 7;
  cfg.reps = reps;
  return cfg;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Csv, HeaderIsExact) {
  const std::string csv = to_csv({});
  EXPECT_EQ(csv,
            "rep,seed,n,l,d_target,d_measured,k,p,per,channel,cn,aod_mean,aod_normstd,cr,"
            "csize_mean,csize_normstd,nclusters,msg_chad,msg_jreq,msg_per_node,term_time\n");
}

TEST(Csv, RowsMatchHeaderWidth) {
  const SimConfig cfg = small();
  const auto reps = run_replications(cfg);
  auto rows = run_rows(cfg, reps);
  rows.push_back(summary_row(cfg, reps, "summary", cfg.seed, false));
  std::stringstream ss(to_csv(rows));
  std::string line;
  std::getline(ss, line);
  const std::size_t width = split(line).size();
  std::size_t count = 0;
  while (std::getline(ss, line)) {
    EXPECT_EQ(split(line).size(), width);
    EXPECT_EQ(line.find(' '), std::string::npos);
    ++count;
  }
  EXPECT_EQ(count, cfg.reps + 1);
}

TEST(Csv, AnalysisColumnsAppended) {
  const SimConfig cfg = small(2);
  const auto reps = run_replications(cfg);
  const std::string csv = to_csv({summary_row(cfg, reps, "0", cfg.seed, true)}, true);
  std::stringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  const auto h = split(header), r = split(row);
  ASSERT_EQ(h.size(), csv_columns().size() + analysis_columns().size());
  ASSERT_EQ(r.size(), h.size());
  EXPECT_EQ(h[csv_columns().size()], "pred_csize");
  EXPECT_NEAR(std::stod(r[csv_columns().size()]), 36.0, 1e-9);
}

TEST(FormatNumber, Shortest) {
  EXPECT_EQ(format_number(0.15), "0.15");
  EXPECT_EQ(format_number(400), "400");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Replications, ThreadCountDoesNotChangeResults) {
  const SimConfig cfg = small(6);
  const auto one = run_rows(cfg, run_replications(cfg, 1));
  const auto many = run_rows(cfg, run_replications(cfg, 3));
  EXPECT_EQ(to_csv(one), to_csv(many));
}

TEST(Replications, StreamsDifferPerRep) {
  const auto reps = run_replications(small(3));
  EXPECT_NE(reps[0].seed, reps[1].seed);
  EXPECT_NE(reps[0].dMeasured, reps[1].dMeasured);
}

TEST(Replications, ValidatesConfig) {
  SimConfig cfg = small();
  cfg.k = 0;
  EXPECT_THROW(run_replications(cfg), ConfigError);
}

TEST(Json, NullForMissingOverlap) {
  SimConfig cfg;
  cfg.n = 3;
  cfg.txRange = 0.001;
  cfg.p = 1.0;
  cfg.seed = 1;
  cfg.reps = 1;
  const auto reps = run_replications(cfg);
  const auto rows = run_rows(cfg, reps);
  const auto doc = nlohmann::json::parse(to_json(rows, summary_row(cfg, reps, "summary", 1, false)));
  ASSERT_EQ(doc["replications"].size(), 1u);
  EXPECT_TRUE(doc["replications"][0]["aod_mean"].is_null());
  EXPECT_EQ(doc["replications"][0]["n"], 3);
  EXPECT_EQ(doc["summary"]["rep"], "summary");
  EXPECT_TRUE(doc["summary"].contains("csize_mean_normstd"));
  for (const auto& col : csv_columns()) EXPECT_TRUE(doc["replications"][0].contains(col)) << col;
}

TEST(Sweep, CartesianOrderAndSeeds) {
  SimConfig base = small();
  base.seed = 99;
  SweepAxes axes{{100, 200}, {7}, {1, 2}, {0.1, 0.2}, {0.0}};
  const auto cells = sweep_cells(base, axes);
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0].n, 100u);
  EXPECT_EQ(cells[0].k, 1);
  EXPECT_DOUBLE_EQ(cells[1].p, 0.2);
  EXPECT_EQ(cells[2].k, 2);
  EXPECT_EQ(cells[4].n, 200u);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(cells[i].seed, derive_seed(99, i));
    EXPECT_FALSE(cells[i].txRange.has_value());
  }
}

TEST(Sweep, EmptyAxisRejected) {
  SweepAxes axes{{100}, {}, {1}, {0.1}, {0.0}};
  EXPECT_THROW(sweep_cells(small(), axes), ConfigError);
}

TEST(Sweep, LossAxisNeedsLossyChannel) {
  SweepAxes axes{{100}, {7}, {1}, {0.1}, {0.0, 0.05}};
  EXPECT_THROW(sweep_cells(small(), axes), ConfigError);
  SimConfig lossy = small();
  lossy.channel = LossyChannel{};
  const auto cells = sweep_cells(lossy, axes);
  EXPECT_DOUBLE_EQ(packet_error_rate(cells[1].channel), 0.05);
}

TEST(Config, ExactlyOneRangeSource) {
  SimConfig cfg = small();
  cfg.txRange = 5;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.dTarget.reset();
  cfg.txRange.reset();
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Config, ErrorNamesField) {
  SimConfig cfg = small();
  cfg.p = 1.5;
  try {
    validate(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "p");
  }
}

TEST(Rng, SubstreamsAreIndependentOfConsumption) {
  RandomStream a(5), b(5);
  for (int i = 0; i < 100; ++i) b();
  EXPECT_EQ(a.substream(Substream::Coins)(), b.substream(Substream::Coins)());
  EXPECT_NE(a.substream(Substream::Coins)(), a.substream(Substream::Channel)());
}

TEST(Rng, UniformInUnitInterval) {
  RandomStream r(3);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}
