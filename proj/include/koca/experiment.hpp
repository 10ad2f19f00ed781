#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"  // nlohmann/json, vendored

#include "koca/analysis.hpp"
#include "koca/config.hpp"
#include "koca/engine.hpp"
#include "koca/metrics.hpp"
#include "koca/rng.hpp"
#include "koca/topology.hpp"

// Replication driver and the CSV / JSON report formats.

namespace koca {

struct Replication {
  std::size_t rep = 0;
  std::uint64_t seed = 0;  // replication stream seed
  double dMeasured = 0.0;
  bool connectedTopology = true;
  MetricsReport metrics;
};

/// Topology, election and channel for one replication, all derived from
/// (cfg.seed, rep).
inline Replication run_replication(const SimConfig& cfg, std::size_t rep) {
  RandomStream stream = replication_stream(cfg.seed, rep);
  RandomStream topoRng = stream.substream(Substream::Topology);
  const Topology topo = generate_topology(cfg, topoRng);
  const SimResult result = run_simulation(cfg, topo, stream);
  return {rep, stream.seed(), topo.avg_degree(), topo.is_connected(), compute_metrics(result)};
}

/// Runs cfg.reps replications on up to `threads` workers; the output is in
/// rep order regardless of completion order.
inline std::vector<Replication> run_replications(const SimConfig& cfg, unsigned threads = 1) {
  validate(cfg);
  std::vector<Replication> out(cfg.reps);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.reps)));
  if (threads == 1) {
    for (std::size_t r = 0; r < cfg.reps; ++r) out[r] = run_replication(cfg, r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < cfg.reps; r = next++) {
          try {
            out[r] = run_replication(cfg, r);
          } catch (...) {
            std::lock_guard lock(failureMutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline AggregateReport summarize(const std::vector<Replication>& reps) {
  std::vector<MetricsReport> m;
  m.reserve(reps.size());
  for (const auto& r : reps) m.push_back(r.metrics);
  return aggregate(m);
}

inline analysis::AnalyticalReport predictions_for(const SimConfig& cfg) {
  return analysis::predict({static_cast<double>(cfg.n), cfg.l, resolved_tx_range(cfg), cfg.k,
                            cfg.p});
}

// ---------------------------------------------------------------------------
// Formatting

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "rep",        "seed",          "n",         "l",          "d_target", "d_measured",
      "k",          "p",             "per",       "channel",    "cn",       "aod_mean",
      "aod_normstd", "cr",           "csize_mean", "csize_normstd", "nclusters", "msg_chad",
      "msg_jreq",   "msg_per_node",  "term_time"};
  return cols;
}

inline const std::vector<std::string>& analysis_columns() {
  static const std::vector<std::string> cols{
      "pred_csize",   "pred_aod",          "pred_msg_chad",    "pred_msg_jreq",
      "pred_msg_per_node", "pred_adj_clusters", "aod_mean_normstd", "csize_mean_normstd"};
  return cols;
}

/// Shortest round-trip decimal; "nan" for a missing value.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// One report row: column values in csv_columns() order plus optional
/// analysis columns.
struct ReportRow {
  std::string rep;
  std::uint64_t seed = 0;
  SimConfig cfg;
  double dMeasured = 0.0;
  MetricsReport metrics;
  bool withAnalysis = false;
  analysis::AnalyticalReport predicted;
  double aodMeanNormStd = std::numeric_limits<double>::quiet_NaN();
  double csizeMeanNormStd = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::string> csv_values() const {
    const double dTarget =
        cfg.dTarget ? *cfg.dTarget
                    : analysis::avg_node_degree(static_cast<double>(cfg.n), cfg.l, *cfg.txRange);
    std::vector<std::string> v{rep,
                               std::to_string(seed),
                               std::to_string(cfg.n),
                               format_number(cfg.l),
                               format_number(dTarget),
                               format_number(dMeasured),
                               std::to_string(cfg.k),
                               format_number(cfg.p),
                               format_number(packet_error_rate(cfg.channel)),
                               std::string(channel_name(cfg.channel)),
                               format_number(metrics.cn),
                               format_number(metrics.aodMean),
                               format_number(metrics.aodNormStdev),
                               format_number(metrics.cr),
                               format_number(metrics.clusterSizeMean),
                               format_number(metrics.clusterSizeNormStdev),
                               format_number(metrics.numClusters),
                               format_number(metrics.msgChad),
                               format_number(metrics.msgJreq),
                               format_number(metrics.msgPerNode),
                               format_number(metrics.terminationTime)};
    if (withAnalysis) {
      for (double x : {predicted.expectedClusterSize, predicted.aodPredicted, predicted.mChad,
                       predicted.mJreq, predicted.mNode, predicted.expectedAdjacentClusters,
                       aodMeanNormStd, csizeMeanNormStd})
        v.push_back(format_number(x));
    }
    return v;
  }
};

inline std::vector<ReportRow> run_rows(const SimConfig& cfg, const std::vector<Replication>& reps) {
  std::vector<ReportRow> rows;
  for (const auto& r : reps) {
    ReportRow row;
    row.rep = std::to_string(r.rep);
    row.seed = r.seed;
    row.cfg = cfg;
    row.dMeasured = r.dMeasured;
    row.metrics = r.metrics;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ReportRow summary_row(const SimConfig& cfg, const std::vector<Replication>& reps,
                             std::string label, std::uint64_t seed, bool withAnalysis) {
  const AggregateReport agg = summarize(reps);
  ReportRow row;
  row.rep = std::move(label);
  row.seed = seed;
  row.cfg = cfg;
  double dsum = 0.0;
  for (const auto& r : reps) dsum += r.dMeasured;
  row.dMeasured = dsum / static_cast<double>(reps.size());
  row.metrics = agg.mean;
  row.withAnalysis = withAnalysis;
  if (withAnalysis) row.predicted = predictions_for(cfg);
  row.aodMeanNormStd = agg.aodAcrossRunNormStdev;
  row.csizeMeanNormStd = agg.clusterSizeAcrossRunNormStdev;
  return row;
}

inline std::string to_csv(const std::vector<ReportRow>& rows, bool withAnalysis = false) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  std::vector<std::string> header = csv_columns();
  if (withAnalysis)
    header.insert(header.end(), analysis_columns().begin(), analysis_columns().end());
  emit(header);
  for (const auto& r : rows) emit(r.csv_values());
  return out;
}

inline nlohmann::ordered_json row_to_json(const ReportRow& row) {
  nlohmann::ordered_json j;
  std::vector<std::string> names = csv_columns();
  if (row.withAnalysis)
    names.insert(names.end(), analysis_columns().begin(), analysis_columns().end());
  const auto values = row.csv_values();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& name = names[i];
    const std::string& value = values[i];
    if (name == "rep" || name == "channel") {
      j[name] = value;
    } else if (value == "nan") {
      j[name] = nullptr;
    } else if (name == "seed" || name == "n" || name == "k") {
      j[name] = std::stoull(value);
    } else {
      j[name] = std::stod(value);
    }
  }
  if (row.rep == "summary" && !row.withAnalysis) {
    j["aod_mean_normstd"] = std::isnan(row.aodMeanNormStd) ? nlohmann::ordered_json(nullptr)
                                                           : nlohmann::ordered_json(row.aodMeanNormStd);
    j["csize_mean_normstd"] = row.csizeMeanNormStd;
  }
  return j;
}

/// {"replications": [...], "summary": {...}}
inline std::string to_json(const std::vector<ReportRow>& rows, const ReportRow& summary) {
  nlohmann::ordered_json doc;
  doc["replications"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) doc["replications"].push_back(row_to_json(r));
  doc["summary"] = row_to_json(summary);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxes {
  std::vector<std::size_t> n;
  std::vector<double> d;
  std::vector<int> k;
  std::vector<double> p;
  std::vector<double> per;
};

/// Cartesian product of the axes in (n, d, k, p, per) order; cell i is
/// seeded with derive_seed(rootSeed, i).
inline std::vector<SimConfig> sweep_cells(const SimConfig& base, const SweepAxes& axes) {
  if (axes.n.empty() || axes.d.empty() || axes.k.empty() || axes.p.empty() || axes.per.empty())
    throw ConfigError("sweep", "every axis needs at least one value");
  std::vector<SimConfig> cells;
  for (auto n : axes.n)
    for (auto d : axes.d)
      for (auto k : axes.k)
        for (auto p : axes.p)
          for (auto per : axes.per) {
            SimConfig c = base;
            c.n = n;
            c.dTarget = d;
            c.txRange.reset();
            c.k = k;
            c.p = p;
            std::visit(
                [per](auto& ch) {
                  if constexpr (!std::is_same_v<std::decay_t<decltype(ch)>, IdealChannel>)
                    ch.per = per;
                },
                c.channel);
            if (std::holds_alternative<IdealChannel>(c.channel) && per != 0.0)
              throw ConfigError("per", "ideal channel cannot have a non-zero error rate");
            c.seed = derive_seed(base.seed, cells.size());
            validate(c);
            cells.push_back(c);
          }
  return cells;
}

}  // namespace koca
