#pragma once

// Experiment plumbing: synthetic data, CSV datasets, configuration, the
// partition -> build -> communicate -> evaluate loop, and result files.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dcoreset/baselines.hpp"
#include "dcoreset/coreset.hpp"
#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/network.hpp"
#include "dcoreset/partition.hpp"
#include "dcoreset/rng.hpp"
#include "dcoreset/solvers.hpp"

namespace dcoreset {

// ---------------------------------------------------------------------------
// Data

struct SyntheticData {
  WeightedPointSet points;
  Centers centers;
};

/// k_true centers drawn from N(0, I_d); each gets points_per_center points
/// drawn from N(center, spread^2 I_d). Points are grouped by center.
inline SyntheticData gen_synthetic(std::size_t k_true, std::size_t d, std::size_t points_per_center, double spread,
                                   Rng& rng) {
  if (k_true == 0 || d == 0 || points_per_center == 0) throw Error("gen_synthetic: sizes must be positive");
  if (!(spread >= 0.0)) throw Error("gen_synthetic: spread must be >= 0");
  std::normal_distribution<double> gauss(0.0, 1.0);
  SyntheticData out{WeightedPointSet(d), Centers(d)};
  Point c(d), p(d);
  for (std::size_t i = 0; i < k_true; ++i) {
    for (double& x : c) x = gauss(rng);
    out.centers.push_back(c);
  }
  out.points.reserve(k_true * points_per_center);
  for (std::size_t i = 0; i < k_true; ++i)
    for (std::size_t n = 0; n < points_per_center; ++n) {
      for (std::size_t j = 0; j < d; ++j) p[j] = out.centers[i][j] + spread * gauss(rng);
      out.points.add(p, 1.0);
    }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Comma-separated reals, one point per row, no header. Blank lines are
/// skipped; every point gets weight 1.
inline WeightedPointSet parse_dataset(std::istream& in) {
  WeightedPointSet out;
  std::string line;
  std::size_t line_no = 0, width = 0;
  Point row;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    row.clear();
    for (std::string_view field : detail::split(line, ',')) {
      const auto v = detail::parse_real(field);
      if (!v) throw ParseError(line_no, "not a real number: '" + std::string(detail::trim(field)) + "'");
      if (!std::isfinite(*v)) throw ParseError(line_no, "non-finite value");
      row.push_back(*v);
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width) + " columns, found " + std::to_string(row.size()));
    out.add(row, 1.0);
  }
  if (out.empty()) throw Error("dataset is empty");
  return out;
}

inline WeightedPointSet load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  return parse_dataset(in);
}

inline void write_dataset(std::ostream& out, const PointMatrix& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PointView p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << detail::format_real(p[j]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Evaluation

struct Evaluation {
  double ratio = 0.0;
  Centers coreset_solution;
  double coreset_solution_cost = 0.0;
  double global_cost = 0.0;
};

/// Seed-and-refine on the full data: the reference solution.
inline Centers global_solution(const WeightedPointSet& points, std::size_t k, Objective obj, Rng& rng,
                               const SolverParams& params = {}) {
  return refine(points, seed(points, k, obj, rng), obj, params);
}

/// Solves on the coreset and reports cost(P, X_coreset) / global_cost. Seeding
/// and Lloyd assignments use the positive-weight entries only.
inline Evaluation evaluate_against(const WeightedPointSet& coreset, const WeightedPointSet& points,
                                   double global_cost, std::size_t k, Objective obj, Rng& rng,
                                   const SolverParams& params = {}) {
  const WeightedPointSet positive = coreset.positive_part();
  if (positive.empty() || !(positive.total_weight() > 0.0) || !(coreset.total_weight() > 0.0))
    throw Error("evaluate: coreset has no positive mass");
  Evaluation out;
  out.coreset_solution = refine(positive, seed(positive, k, obj, rng), obj, params);
  out.coreset_solution_cost = cost(points, out.coreset_solution, obj);
  out.global_cost = global_cost;
  if (!(global_cost > 0.0)) throw Error("evaluate: global solution has zero cost");
  out.ratio = out.coreset_solution_cost / global_cost;
  return out;
}

inline double evaluate(const WeightedPointSet& coreset, const WeightedPointSet& points, std::size_t k,
                       Objective obj, Rng& rng, const SolverParams& params = {}) {
  const Centers xg = global_solution(points, k, obj, rng, params);
  return evaluate_against(coreset, points, cost(points, xg, obj), k, obj, rng, params).ratio;
}

// ---------------------------------------------------------------------------
// Configuration

enum class Method { Distributed, Combine, Zhang };
enum class CommMode { GraphFlood, TreeUpcast };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Distributed: return "distributed";
    case Method::Combine: return "combine";
    case Method::Zhang: return "zhang";
  }
  return "distributed";
}

inline Method parse_method(std::string_view s) {
  if (s == "distributed") return Method::Distributed;
  if (s == "combine") return Method::Combine;
  if (s == "zhang") return Method::Zhang;
  throw Error("unknown method '" + std::string(s) + "'");
}

inline std::string to_string(CommMode m) { return m == CommMode::GraphFlood ? "graph-flood" : "tree-upcast"; }

inline CommMode parse_comm_mode(std::string_view s) {
  if (s == "graph-flood") return CommMode::GraphFlood;
  if (s == "tree-upcast") return CommMode::TreeUpcast;
  throw Error("unknown communication mode '" + std::string(s) + "'");
}

struct SyntheticSpec {
  std::size_t k_true = 5;
  std::size_t dim = 10;
  std::size_t points_per_center = 400;
  double spread = 1.0;
};

struct ExperimentConfig {
  /// CSV dataset; empty means synthetic.
  std::string data_path;
  SyntheticSpec synthetic;
  Objective objective = Objective::KMeans;
  std::size_t k = 5;
  TopologyKind topology = TopologyKind::Random;
  std::size_t sites = 25;
  TopologyParams topology_params;
  PartitionKind partition = PartitionKind::Uniform;
  /// Similarity bandwidth; 0 selects the median heuristic.
  double bandwidth = 0.0;
  Method method = Method::Distributed;
  CommMode mode = CommMode::GraphFlood;
  /// Sample budgets: t for distributed/combine, t_node for zhang.
  std::vector<std::size_t> sweep{500};
  std::size_t repetitions = 10;
  std::optional<std::uint64_t> seed;
  SolverParams solver;
  std::size_t threads = 1;

  void validate() const {
    if (sweep.empty()) throw Error("config: sweep must not be empty");
    if (repetitions == 0) throw Error("config: repetitions must be >= 1");
    if (k == 0) throw Error("config: k must be >= 1");
    if (sites < 2) throw Error("config: need at least 2 sites");
    if (!seed) throw Error("config: seed is required");
    if (method == Method::Zhang && mode != CommMode::TreeUpcast)
      throw Error("config: zhang runs on a spanning tree; use mode=tree-upcast");
    if (method == Method::Combine)
      for (std::size_t t : sweep)
        if (t < sites) throw Error("config: combine needs every sweep value >= sites");
    if (threads == 0) throw Error("config: threads must be >= 1");
    solver.validate();
  }
};

namespace detail {

inline std::size_t parse_count(std::string_view key, std::string_view v) {
  v = trim(v);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw Error("config: '" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

inline double parse_number(std::string_view key, std::string_view v) {
  const auto x = parse_real(v);
  if (!x) throw Error("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return *x;
}

}  // namespace detail

/// Applies one key=value setting. Keys match the CLI flag names.
inline void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_count;
  using detail::parse_number;
  key = detail::trim(key);
  value = detail::trim(value);
  if (key == "data") cfg.data_path = std::string(value);
  else if (key == "synthetic-k") cfg.synthetic.k_true = parse_count(key, value);
  else if (key == "synthetic-dim") cfg.synthetic.dim = parse_count(key, value);
  else if (key == "synthetic-per-center") cfg.synthetic.points_per_center = parse_count(key, value);
  else if (key == "synthetic-spread") cfg.synthetic.spread = parse_number(key, value);
  else if (key == "objective") cfg.objective = parse_objective(value);
  else if (key == "k") cfg.k = parse_count(key, value);
  else if (key == "topology") cfg.topology = parse_topology_kind(value);
  else if (key == "sites") cfg.sites = parse_count(key, value);
  else if (key == "p") cfg.topology_params.p = parse_number(key, value);
  else if (key == "rows") cfg.topology_params.rows = parse_count(key, value);
  else if (key == "cols") cfg.topology_params.cols = parse_count(key, value);
  else if (key == "attach") cfg.topology_params.attach = parse_count(key, value);
  else if (key == "partition") cfg.partition = parse_partition_kind(value);
  else if (key == "bandwidth") cfg.bandwidth = parse_number(key, value);
  else if (key == "method") cfg.method = parse_method(value);
  else if (key == "mode") cfg.mode = parse_comm_mode(value);
  else if (key == "sweep") {
    cfg.sweep.clear();
    for (std::string_view part : detail::split(value, ',')) cfg.sweep.push_back(parse_count(key, part));
  } else if (key == "repetitions") cfg.repetitions = parse_count(key, value);
  else if (key == "seed") cfg.seed = parse_count(key, value);
  else if (key == "max-iters") cfg.solver.max_iters = parse_count(key, value);
  else if (key == "rel-tol") cfg.solver.rel_tol = parse_number(key, value);
  else if (key == "weiszfeld-iters") cfg.solver.weiszfeld_iters = parse_count(key, value);
  else if (key == "weiszfeld-eps") cfg.solver.weiszfeld_eps = parse_number(key, value);
  else if (key == "threads") cfg.threads = parse_count(key, value);
  else throw Error("config: unknown key '" + std::string(key) + "'");
}

/// Flat key=value lines; '#' starts a comment.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (detail::trim(view).empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    try {
      set_config_value(cfg, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Running

struct ResultRow {
  Method method = Method::Distributed;
  Objective objective = Objective::KMeans;
  std::size_t k = 0;
  TopologyKind topology = TopologyKind::Random;
  PartitionKind partition = PartitionKind::Uniform;
  std::size_t t = 0;
  std::size_t rep = 0;
  std::uint64_t point_units = 0;
  std::uint64_t scalar_units = 0;
  double cost_ratio = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
  double wall_seconds = 0.0;
};

inline constexpr std::string_view kResultsHeader =
    "method,objective,k,topology,partition,t,rep,point_units,scalar_units,cost_ratio,status";

/// Everything a single repetition shares across methods and sweep values.
struct RepetitionContext {
  Topology topology;
  RootedTree tree;
  std::vector<WeightedPointSet> sites;
  double global_cost = 0.0;
};

namespace detail {

// Per-repetition RNG streams.
enum Stream : std::uint64_t { kTopology = 0, kPartition, kGlobalSolve, kBuild, kCoresetSolve, kTree };

inline std::uint64_t repetition_base(std::uint64_t master, std::size_t rep) { return derive_seed(master, rep + 1); }

}  // namespace detail

inline WeightedPointSet experiment_dataset(const ExperimentConfig& cfg) {
  if (!cfg.data_path.empty()) return load_dataset(cfg.data_path);
  Rng rng = make_stream(*cfg.seed, 0);
  return gen_synthetic(cfg.synthetic.k_true, cfg.synthetic.dim, cfg.synthetic.points_per_center,
                       cfg.synthetic.spread, rng)
      .points;
}

/// Similarity bandwidth actually used: the configured value or the median
/// heuristic on a 500-point subsample.
inline double effective_bandwidth(const ExperimentConfig& cfg, const WeightedPointSet& data) {
  if (cfg.bandwidth > 0.0) return cfg.bandwidth;
  Rng rng = make_stream(*cfg.seed, 1);
  return median_heuristic_bandwidth(data, rng);
}

inline RepetitionContext prepare_repetition(const ExperimentConfig& cfg, const WeightedPointSet& data,
                                            double bandwidth, std::size_t rep) {
  const std::uint64_t base = detail::repetition_base(*cfg.seed, rep);
  Rng topo_rng = make_stream(base, detail::kTopology);
  Topology g = gen_topology(cfg.topology, cfg.sites, cfg.topology_params, topo_rng);
  Rng tree_rng = make_stream(base, detail::kTree);
  RootedTree tree = spanning_tree(g, tree_rng);

  PartitionScheme scheme;
  scheme.kind = cfg.partition;
  scheme.bandwidth = bandwidth;
  Rng part_rng = make_stream(base, detail::kPartition);
  auto sites = partition(data, cfg.sites, scheme, &g, part_rng);

  Rng solve_rng = make_stream(base, detail::kGlobalSolve);
  const Centers xg = global_solution(data, cfg.k, cfg.objective, solve_rng, cfg.solver);
  const double gc = cost(data, xg, cfg.objective);
  return {std::move(g), std::move(tree), std::move(sites), gc};
}

struct BuiltCoreset {
  WeightedPointSet coreset;
  CommLedger ledger;
};

/// Builds the coreset for one method and moves it per the communication mode.
inline BuiltCoreset build_with_method(const ExperimentConfig& cfg, const RepetitionContext& ctx, std::size_t budget,
                                      Rng& rng) {
  BuiltCoreset out;
  const Communicator* comm = nullptr;
  const FloodingCommunicator flooding(ctx.topology);
  const TreeCommunicator upcast(ctx.tree);
  comm = cfg.mode == CommMode::GraphFlood ? static_cast<const Communicator*>(&flooding) : &upcast;

  std::vector<std::uint64_t> sizes;
  switch (cfg.method) {
    case Method::Distributed: {
      DistributedCoreset dc = build_distributed_coreset(ctx.sites, cfg.k, budget, cfg.objective, rng, *comm, cfg.solver);
      for (const auto& p : dc.portions) sizes.push_back(p.size());
      comm->share_portions(sizes, dc.ledger);
      out.coreset = union_of(dc.portions);
      out.ledger = std::move(dc.ledger);
      break;
    }
    case Method::Combine: {
      const auto portions = combine(ctx.sites, cfg.k, budget, cfg.objective, rng, cfg.solver);
      for (const auto& p : portions) sizes.push_back(p.size());
      comm->share_portions(sizes, out.ledger);
      out.coreset = union_of(portions);
      break;
    }
    case Method::Zhang: {
      const CoresetPortion root = zhang_tree_merge(ctx.tree, ctx.sites, cfg.k, budget, cfg.objective, rng, out.ledger,
                                                   cfg.solver);
      out.coreset = union_of(root);
      break;
    }
  }
  return out;
}

inline ResultRow run_single(const ExperimentConfig& cfg, const RepetitionContext& ctx, const WeightedPointSet& data,
                            std::size_t sweep_index, std::size_t rep) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.method = cfg.method;
  row.objective = cfg.objective;
  row.k = cfg.k;
  row.topology = cfg.topology;
  row.partition = cfg.partition;
  row.t = cfg.sweep[sweep_index];
  row.rep = rep;
  try {
    const std::uint64_t base = detail::repetition_base(*cfg.seed, rep);
    Rng build_rng = make_stream(derive_seed(base, detail::kBuild), sweep_index);
    const BuiltCoreset built = build_with_method(cfg, ctx, row.t, build_rng);
    row.point_units = built.ledger.point_units();
    row.scalar_units = built.ledger.scalar_units();
    Rng solve_rng = make_stream(derive_seed(base, detail::kCoresetSolve), sweep_index);
    row.cost_ratio =
        evaluate_against(built.coreset, data, ctx.global_cost, cfg.k, cfg.objective, solve_rng, cfg.solver).ratio;
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

/// Rows ordered by (sweep index, repetition). Repetitions may run on
/// several threads; the output does not depend on scheduling.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const WeightedPointSet& data) {
  cfg.validate();
  const double bandwidth = effective_bandwidth(cfg, data);
  const std::size_t reps = cfg.repetitions;
  const std::size_t sweeps = cfg.sweep.size();
  std::vector<ResultRow> rows(sweeps * reps);

  auto run_rep = [&](std::size_t rep) {
    std::optional<RepetitionContext> ctx;
    std::string failure;
    try {
      ctx = prepare_repetition(cfg, data, bandwidth, rep);
    } catch (const std::exception& e) {
      failure = std::string("error: ") + e.what();
    }
    for (std::size_t s = 0; s < sweeps; ++s) {
      ResultRow& row = rows[s * reps + rep];
      if (ctx) {
        row = run_single(cfg, *ctx, data, s, rep);
      } else {
        row.method = cfg.method;
        row.objective = cfg.objective;
        row.k = cfg.k;
        row.topology = cfg.topology;
        row.partition = cfg.partition;
        row.t = cfg.sweep[s];
        row.rep = rep;
        row.status = failure;
      }
    }
  };

  const std::size_t workers = std::min(cfg.threads, reps);
  if (workers <= 1) {
    for (std::size_t rep = 0; rep < reps; ++rep) run_rep(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t rep = next++; rep < reps; rep = next++) run_rep(rep);
      });
  }
  return rows;
}

inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, experiment_dataset(cfg));
}

// ---------------------------------------------------------------------------
// Persistence

namespace detail {

inline std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) {
    out << to_string(r.method) << ',' << to_string(r.objective) << ',' << r.k << ',' << to_string(r.topology) << ','
        << to_string(r.partition) << ',' << r.t << ',' << r.rep << ',' << r.point_units << ',' << r.scalar_units << ','
        << detail::format_real(r.cost_ratio) << ',' << detail::csv_field(r.status) << '\n';
  }
}

namespace detail {

/// Splits one CSV line honoring double quotes.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kResultsHeader)
    throw ParseError(1, "results header does not match");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 11) throw ParseError(line_no, "expected 11 columns");
    try {
      ResultRow r;
      r.method = parse_method(f[0]);
      r.objective = parse_objective(f[1]);
      r.k = detail::parse_count("k", f[2]);
      r.topology = parse_topology_kind(f[3]);
      r.partition = parse_partition_kind(f[4]);
      r.t = detail::parse_count("t", f[5]);
      r.rep = detail::parse_count("rep", f[6]);
      r.point_units = detail::parse_count("point_units", f[7]);
      r.scalar_units = detail::parse_count("scalar_units", f[8]);
      r.cost_ratio = f[9] == "nan" ? std::numeric_limits<double>::quiet_NaN() : detail::parse_number("cost_ratio", f[9]);
      r.status = f[10];
      rows.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return rows;
}

/// Reproducibility block written next to the results.
inline void write_metadata(std::ostream& out, const ExperimentConfig& cfg, const WeightedPointSet& data) {
  out << "seed=" << *cfg.seed << '\n'
      << "data=" << (cfg.data_path.empty() ? "synthetic" : cfg.data_path) << '\n';
  if (cfg.data_path.empty())
    out << "synthetic-k=" << cfg.synthetic.k_true << '\n'
        << "synthetic-dim=" << cfg.synthetic.dim << '\n'
        << "synthetic-per-center=" << cfg.synthetic.points_per_center << '\n'
        << "synthetic-spread=" << detail::format_real(cfg.synthetic.spread) << '\n';
  out << "points=" << data.size() << '\n'
      << "dim=" << data.dim() << '\n'
      << "objective=" << to_string(cfg.objective) << '\n'
      << "k=" << cfg.k << '\n'
      << "method=" << to_string(cfg.method) << '\n'
      << "mode=" << to_string(cfg.mode) << '\n'
      << "topology=" << to_string(cfg.topology) << '\n'
      << "sites=" << cfg.sites << '\n'
      << "p=" << detail::format_real(cfg.topology_params.p) << '\n'
      << "rows=" << cfg.topology_params.rows << '\n'
      << "cols=" << cfg.topology_params.cols << '\n'
      << "attach=" << cfg.topology_params.attach << '\n'
      << "partition=" << to_string(cfg.partition) << '\n';
  if (cfg.partition == PartitionKind::SimilarityBased)
    out << "bandwidth=" << detail::format_real(effective_bandwidth(cfg, data))
        << (cfg.bandwidth > 0.0 ? "" : " # median heuristic") << '\n';
  out << "repetitions=" << cfg.repetitions << '\n'
      << "local-solver=d-power seeding + weighted lloyd (weiszfeld for kmedian)\n"
      << "max-iters=" << cfg.solver.max_iters << '\n'
      << "rel-tol=" << detail::format_real(cfg.solver.rel_tol) << '\n'
      << "weiszfeld-iters=" << cfg.solver.weiszfeld_iters << '\n'
      << "weiszfeld-eps=" << detail::format_real(cfg.solver.weiszfeld_eps) << '\n'
      << "point-unit=one " << data.dim() << "-dimensional point with its weight\n"
      << "scalar-unit=one real; combined = point_units + scalar_units/" << data.dim() + 1 << '\n';
}

// ---------------------------------------------------------------------------
// Reporting

struct AggregateRow {
  Method method;
  Objective objective;
  std::size_t k;
  TopologyKind topology;
  PartitionKind partition;
  std::size_t t;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_point_units = 0.0;
  double mean_scalar_units = 0.0;
  double mean_ratio = 0.0;
  double std_ratio = 0.0;
};

/// Groups rows by (method, objective, k, topology, partition, t); failed
/// rows are counted but excluded from the means.
inline std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<int, int, std::size_t, int, int, std::size_t>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  std::vector<Key> order;
  for (const ResultRow& r : rows) {
    const Key key{static_cast<int>(r.method), static_cast<int>(r.objective), r.k, static_cast<int>(r.topology),
                  static_cast<int>(r.partition), r.t};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<AggregateRow> out;
  for (const Key& key : order) {
    const auto& members = groups[key];
    const ResultRow& first = *members.front();
    AggregateRow a{first.method, first.objective, first.k, first.topology, first.partition, first.t};
    std::vector<double> ratios;
    for (const ResultRow* r : members) {
      if (r->status != "ok") {
        ++a.failures;
        continue;
      }
      ++a.runs;
      a.mean_point_units += static_cast<double>(r->point_units);
      a.mean_scalar_units += static_cast<double>(r->scalar_units);
      ratios.push_back(r->cost_ratio);
    }
    if (a.runs > 0) {
      const double n = static_cast<double>(a.runs);
      a.mean_point_units /= n;
      a.mean_scalar_units /= n;
      for (double x : ratios) a.mean_ratio += x / n;
      double ss = 0.0;
      for (double x : ratios) ss += (x - a.mean_ratio) * (x - a.mean_ratio);
      a.std_ratio = a.runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    } else {
      a.mean_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(a);
  }
  return out;
}

inline void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "method,objective,k,topology,partition,t,runs,failures,mean_point_units,mean_scalar_units,mean_cost_ratio,"
         "std_cost_ratio\n";
  for (const AggregateRow& a : rows)
    out << to_string(a.method) << ',' << to_string(a.objective) << ',' << a.k << ',' << to_string(a.topology) << ','
        << to_string(a.partition) << ',' << a.t << ',' << a.runs << ',' << a.failures << ','
        << detail::format_real(a.mean_point_units) << ',' << detail::format_real(a.mean_scalar_units) << ','
        << detail::format_real(a.mean_ratio) << ',' << detail::format_real(a.std_ratio) << '\n';
}

/// Line chart of mean cost ratio against mean point-units, one series per
/// method.
inline void write_svg_chart(std::ostream& out, const std::vector<AggregateRow>& rows) {
  constexpr double width = 640, height = 420, left = 70, right = 20, top = 20, bottom = 50;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const AggregateRow& a : rows) {
    if (a.runs == 0) continue;
    series[to_string(a.method)].push_back({a.mean_point_units, a.mean_ratio});
    x_min = std::min(x_min, a.mean_point_units);
    x_max = std::max(x_max, a.mean_point_units);
    y_min = std::min(y_min, a.mean_ratio);
    y_max = std::max(y_max, a.mean_ratio);
  }
  if (series.empty()) {
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 0.01;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (width - left - right); };
  auto sy = [&](double y) { return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom); };

  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
      << R"(" font-family="sans-serif" font-size="12">)" << '\n';
  out << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">point units</text>\n";
  out << "<text x=\"15\" y=\"" << (top + height - bottom) / 2 << "\" transform=\"rotate(-90 15 "
      << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">cost ratio</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", xv);
    out << "<text x=\"" << sx(xv) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3f", yv);
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  std::size_t color = 0;
  double legend_y = top + 10;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* stroke = palette[color++ % 4];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : pts)
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
    out << "<text x=\"" << width - right - 110 << "\" y=\"" << legend_y << "\" fill=\"" << stroke << "\">" << name
        << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
}

}  // namespace dcoreset
