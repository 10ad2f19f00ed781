// koca: run, sweep and verify overlapping k-hop clustering experiments.
//
//   koca run    --n 400 --d 14 --k 2 --p 0.15 --seed 7 --reps 30 --out r.csv
//   koca sweep  --n 400 --d 14 --k 2 --p 0.05,0.15,0.3,0.5 --reps 30 --with-analysis
//   koca verify --n 400 --d 14 --k 2 --p 0.15 --seed 7
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "koca/koca.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct ChannelFlags {
  std::string kind = "ideal";
  std::optional<double> per;
  std::optional<double> jitterMax;
};

struct CommonFlags {
  std::optional<double> l;
  std::optional<double> tHop;
  std::optional<double> delta;
  std::optional<double> c;
  std::optional<int> o;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 1;
  bool wrapArea = false;
  ChannelFlags channel;
  std::string out;
  std::string format = "csv";
  unsigned threads = 1;
};

struct SingleFlags {
  std::optional<std::size_t> n;
  std::optional<double> d;
  std::optional<double> txRange;
  std::optional<int> k;
  std::optional<double> p;
};

template <typename T>
std::vector<T> parse_list(const std::string& flag, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T value{};
    if (!(is >> value) || !is.eof()) throw koca::ConfigError(flag, "cannot parse '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw koca::ConfigError(flag, "list is empty");
  return out;
}

koca::ChannelModel make_channel(const ChannelFlags& f, double tHop) {
  const double per = f.per.value_or(0.0);
  if (f.kind == "ideal") {
    if (per != 0.0) throw koca::ConfigError("per", "requires --channel lossy or contention");
    return koca::IdealChannel{};
  }
  if (f.kind == "lossy") return koca::LossyChannel{per};
  if (f.kind == "contention") return koca::ContentionChannel{per, f.jitterMax.value_or(tHop / 2.0)};
  throw koca::ConfigError("channel", "expected ideal, lossy or contention");
}

koca::SimConfig base_config(const CommonFlags& f) {
  koca::SimConfig cfg;
  cfg.l = f.l.value_or(100.0);
  cfg.tHop = f.tHop.value_or(1.0);
  cfg.delta = f.delta.value_or(cfg.tHop);
  cfg.c = f.c.value_or(2.0);
  cfg.o = f.o.value_or(1);
  cfg.seed = f.seed.value_or(1);
  cfg.reps = f.reps;
  cfg.wrapArea = f.wrapArea;
  cfg.channel = make_channel(f.channel, cfg.tHop);
  return cfg;
}

koca::SimConfig single_config(const CommonFlags& common, const SingleFlags& s) {
  koca::SimConfig cfg = base_config(common);
  if (!s.k) throw koca::ConfigError("k", "is required");
  if (!common.seed) throw koca::ConfigError("seed", "is required");
  if (s.d.has_value() == s.txRange.has_value())
    throw koca::ConfigError("d", "give exactly one of --d / --tx-range");
  cfg.n = s.n.value_or(100);
  cfg.k = *s.k;
  cfg.p = s.p.value_or(0.15);
  cfg.dTarget = s.d;
  cfg.txRange = s.txRange;
  koca::validate(cfg);
  return cfg;
}

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--l", f.l, "deployment side length (default 100)");
  app->add_option("--t-hop", f.tHop, "per-hop latency (default 1)");
  app->add_option("--delta", f.delta, "bootstrap slack (default t-hop)");
  app->add_option("--c", f.c, "JREQ_WAIT multiplier (default 2)");
  app->add_option("--o", f.o, "overlap threshold (default 1)");
  app->add_option("--seed", f.seed, "root RNG seed");
  app->add_option("--reps", f.reps, "replications (default 1)");
  app->add_flag("--wrap-area", f.wrapArea, "torus distance instead of a bounded square");
  app->add_option("--channel", f.channel.kind, "ideal | lossy | contention");
  app->add_option("--jitter-max", f.channel.jitterMax, "contention jitter bound (default t-hop/2)");
  app->add_option("--out", f.out, "output file (default stdout)");
  app->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", f.threads, "worker threads for replications");
}

void add_single(CLI::App* app, SingleFlags& s, CommonFlags& f) {
  app->add_option("--n", s.n, "node count");
  app->add_option("--d", s.d, "target average degree");
  app->add_option("--tx-range", s.txRange, "transmission range");
  app->add_option("--k", s.k, "cluster radius in hops");
  app->add_option("--p", s.p, "cluster-head probability (default 0.15)");
  app->add_option("--per", f.channel.per, "packet error rate");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw koca::ConfigError("out", "cannot open " + path);
  os << text;
}

int cmd_run(const CommonFlags& common, const SingleFlags& single) {
  const koca::SimConfig cfg = single_config(common, single);
  const auto reps = koca::run_replications(cfg, common.threads);
  std::size_t disconnected = 0;
  for (const auto& r : reps) disconnected += r.connectedTopology ? 0 : 1;
  if (disconnected > 0)
    std::cerr << "koca: " << disconnected << " of " << reps.size()
              << " topologies are disconnected\n";
  const auto rows = koca::run_rows(cfg, reps);
  const auto summary = koca::summary_row(cfg, reps, "summary", cfg.seed, false);
  if (common.format == "json") {
    write_output(common.out, koca::to_json(rows, summary));
  } else {
    auto all = rows;
    all.push_back(summary);
    write_output(common.out, koca::to_csv(all));
  }
  return kExitOk;
}

struct SweepFlags {
  std::string n = "100";
  std::string d;
  std::string k;
  std::string p = "0.15";
  std::string per = "0";
  bool withAnalysis = false;
};

int cmd_sweep(const CommonFlags& common, const SweepFlags& s) {
  if (s.d.empty()) throw koca::ConfigError("d", "is required");
  if (s.k.empty()) throw koca::ConfigError("k", "is required");
  koca::SweepAxes axes{parse_list<std::size_t>("n", s.n), parse_list<double>("d", s.d),
                       parse_list<int>("k", s.k), parse_list<double>("p", s.p),
                       parse_list<double>("per", s.per)};
  CommonFlags base = common;
  base.channel.per.reset();
  const koca::SimConfig cfg = base_config(base);
  const auto cells = koca::sweep_cells(cfg, axes);
  std::vector<koca::ReportRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto reps = koca::run_replications(cells[i], common.threads);
    rows.push_back(koca::summary_row(cells[i], reps, std::to_string(i), cells[i].seed,
                                     s.withAnalysis));
  }
  if (common.format == "json") {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : rows) doc.push_back(koca::row_to_json(r));
    write_output(common.out, doc.dump(2) + "\n");
  } else {
    write_output(common.out, koca::to_csv(rows, s.withAnalysis));
  }
  return kExitOk;
}

int cmd_verify(const CommonFlags& common, const SingleFlags& single, bool firstWaveOnly) {
  const koca::SimConfig cfg = single_config(common, single);
  bool ok = true;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    koca::RandomStream stream = koca::replication_stream(cfg.seed, rep);
    koca::RandomStream topoRng = stream.substream(koca::Substream::Topology);
    const koca::Topology topo = koca::generate_topology(cfg, topoRng);
    const koca::SimResult result = koca::run_simulation(cfg, topo, stream);
    const koca::ClusterView view = koca::build_cluster_view(result);

    std::vector<koca::NodeId> heads;
    for (const auto& s : result.finalStates)
      if (koca::is_head(s.status) && !(firstWaveOnly && s.lateHead)) heads.push_back(s.nid);
    const auto cover = koca::oracle::verify_coverage(topo, heads, cfg.k);
    const bool overlap = koca::oracle::verify_overlap_condition(view, cfg.o);
    const bool connected = koca::oracle::verify_connectivity(view);

    std::cout << "rep " << rep << ": coverage " << (cover.covered ? "ok" : "FAIL");
    if (cover.witness) std::cout << " (uncovered node " << *cover.witness << ")";
    std::cout << ", overlap(o=" << cfg.o << ") " << (overlap ? "ok" : "FAIL")
              << ", connectivity " << (connected ? "ok" : "FAIL") << '\n';
    ok = ok && cover.covered && overlap && connected;
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

// Expands `--config FILE` into `--key=value` tokens placed before the
// explicit flags, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> fromFile;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    std::ifstream is(path);
    if (!is) throw koca::ConfigError("config", "cannot open " + path);
    std::string line;
    while (std::getline(is, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) throw koca::ConfigError("config", "expected key=value: " + line);
      fromFile.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
    }
  }
  if (!fromFile.empty() && !out.empty()) out.insert(out.begin() + 1, fromFile.begin(), fromFile.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const koca::ConfigError& e) {
    std::cerr << "koca: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Overlapping k-hop clustering simulator"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonFlags common;
  SingleFlags single;
  SweepFlags sweep;
  bool firstWaveOnly = false;

  auto* run = app.add_subcommand("run", "run replications of one configuration");
  add_common(run, common);
  add_single(run, single, common);

  auto* sw = app.add_subcommand("sweep", "cartesian parameter sweep, one row per cell");
  add_common(sw, common);
  sw->add_option("--n", sweep.n, "node counts, comma-separated");
  sw->add_option("--d", sweep.d, "target degrees, comma-separated");
  sw->add_option("--k", sweep.k, "cluster radii, comma-separated");
  sw->add_option("--p", sweep.p, "head probabilities, comma-separated");
  sw->add_option("--per", sweep.per, "packet error rates, comma-separated");
  sw->add_flag("--with-analysis", sweep.withAnalysis, "append analytical prediction columns");

  auto* verify = app.add_subcommand("verify", "simulate and check coverage, overlap, connectivity");
  add_common(verify, common);
  add_single(verify, single, common);
  verify->add_flag("--first-wave-only", firstWaveOnly,
                   "check coverage against the originally elected heads only");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "koca: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (common.threads == 0) common.threads = std::max(1u, std::thread::hardware_concurrency());
    if (run->parsed()) return cmd_run(common, single);
    if (sw->parsed()) return cmd_sweep(common, sweep);
    return cmd_verify(common, single, firstWaveOnly);
  } catch (const koca::ConfigError& e) {
    std::cerr << "koca: invalid --" << e.what() << '\n';
    return kExitUsage;
  }
}
