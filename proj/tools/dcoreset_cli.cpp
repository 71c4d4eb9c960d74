// Command-line front end: data and topology generation, experiment runs,
// built-in verification checks, and result reports.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcoreset/dcoreset.hpp"

namespace {

using namespace dcoreset;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

int gen_data(std::size_t k_true, std::size_t dim, std::size_t per_center, double spread, std::uint64_t seed,
             const std::string& out_path, const std::string& centers_path) {
  Rng rng = make_stream(seed, 0);
  const SyntheticData data = gen_synthetic(k_true, dim, per_center, spread, rng);
  auto out = open_output(out_path);
  write_dataset(out, data.points.points());
  if (!centers_path.empty()) {
    auto cout = open_output(centers_path);
    write_dataset(cout, data.centers);
  }
  std::cout << "wrote " << data.points.size() << " points in R^" << dim << " to " << out_path << '\n';
  return 0;
}

int gen_topology_cmd(const std::string& kind, std::size_t sites, const TopologyParams& params, std::uint64_t seed,
                     const std::string& out_path) {
  Rng rng(seed);
  const Topology g = gen_topology(parse_topology_kind(kind), sites, params, rng);
  if (out_path.empty()) {
    write_edge_list(std::cout, g);
  } else {
    auto out = open_output(out_path);
    write_edge_list(out, g);
    std::cerr << "wrote " << to_string(g.kind()) << " topology with n=" << g.n() << " m=" << g.m() << '\n';
  }
  return 0;
}

int run_cmd(const std::string& config_path, const std::map<std::string, std::string>& overrides,
            const std::string& out_path, const std::string& meta_path) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw Error("cannot open config '" + config_path + "'");
    cfg = parse_config(in);
  }
  for (const auto& [key, value] : overrides) set_config_value(cfg, key, value);
  cfg.validate();

  const WeightedPointSet data = experiment_dataset(cfg);
  const auto rows = run_experiment(cfg, data);
  auto out = open_output(out_path);
  write_results_csv(out, rows);
  auto meta = open_output(meta_path.empty() ? out_path + ".meta" : meta_path);
  write_metadata(meta, cfg, data);

  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  std::cerr << "wrote " << rows.size() << " rows to " << out_path << " (" << failed << " failed)\n";
  return 0;
}

struct CheckLine {
  std::string name;
  std::string value;
  std::string threshold;
  bool pass;
};

int verify_cmd(std::uint64_t seed, std::size_t trials) {
  std::vector<CheckLine> lines;
  char buf[96];

  {
    Rng rng = make_stream(seed, 1);
    const auto r = check_tech_bound(trials, rng);
    std::snprintf(buf, sizeof buf, "%zu violations / %zu", r.violations, r.hypothesis_held);
    lines.push_back({"squared-distance bound", buf, "0 violations", r.passed()});
  }

  for (Objective obj : {Objective::KMeans, Objective::KMedian}) {
    Rng rng = make_stream(seed, 2);
    std::normal_distribution<double> g;
    WeightedPointSet p(2);
    for (int i = 0; i < 50; ++i) p.add(std::vector{g(rng), g(rng)}, 1.0);
    const LocalSolution local = local_approximation(p, 3, obj, rng);
    const Centers x{{1.5, -0.5}, {-2.0, 1.0}};
    const auto r = check_unbiased(std::span(&p, 1), std::span(&local.centers, 1), x, 20, obj, 500, rng);
    std::snprintf(buf, sizeof buf, "|%.4g - %.4g| vs %.4g", r.mean, r.truth, 3 * r.standard_error);
    lines.push_back({"unbiased sampling (" + to_string(obj) + ")", buf, "<= 3 stderr", r.passed()});
  }

  {
    Rng rng = make_stream(seed, 3);
    const SyntheticData data = gen_synthetic(5, 10, 400, 1.0, rng);
    auto sites = partition(data.points, 4, PartitionScheme::uniform(), nullptr, rng);
    const Topology k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    const auto dc = build_distributed_coreset(sites, 5, 2000, Objective::KMeans, rng, FloodingCommunicator(k4));
    const WeightedPointSet coreset = union_of(dc.portions);
    const double err = check_coreset(coreset, data.points, Objective::KMeans, 100, 5, rng);
    std::snprintf(buf, sizeof buf, "%.4f", err);
    lines.push_back({"coreset max relative error (t=2000)", buf, "<= 0.15", err <= 0.15});
    const double drift = std::abs(coreset.total_weight() - data.points.total_weight()) / data.points.total_weight();
    std::snprintf(buf, sizeof buf, "%.3g", drift);
    lines.push_back({"weight conservation", buf, "<= 1e-6", drift <= 1e-6});
  }

  {
    Rng rng = make_stream(seed, 4);
    std::uniform_int_distribution<int> size(3, 10), kk(1, 3);
    std::normal_distribution<double> g;
    std::size_t violations = 0;
    for (int inst = 0; inst < 100; ++inst) {
      WeightedPointSet p(2);
      const int n = size(rng);
      for (int i = 0; i < n; ++i) p.add(std::vector{g(rng), g(rng)}, 1.0);
      const auto k = static_cast<std::size_t>(kk(rng));
      for (Objective obj : {Objective::KMeans, Objective::KMedian}) {
        const double opt = brute_force_optimal(p, k, obj);
        const double got = local_approximation(p, k, obj, rng).cost;
        violations += opt > got * (1.0 + 1e-9) + 1e-12;
      }
    }
    lines.push_back({"brute-force optimum <= solver cost", std::to_string(violations) + " violations", "0",
                     violations == 0});
  }

  bool all = true;
  std::printf("%-40s %-32s %-14s %s\n", "check", "value", "threshold", "result");
  for (const auto& l : lines) {
    std::printf("%-40s %-32s %-14s %s\n", l.name.c_str(), l.value.c_str(), l.threshold.c_str(),
                l.pass ? "PASS" : "FAIL");
    all = all && l.pass;
  }
  return all ? 0 : 1;
}

int report_cmd(const std::string& in_path, const std::string& out_path, const std::string& svg_path) {
  std::ifstream in(in_path);
  if (!in) throw Error("cannot open results '" + in_path + "'");
  const auto agg = aggregate(read_results_csv(in));
  if (out_path.empty()) {
    write_aggregate_csv(std::cout, agg);
  } else {
    auto out = open_output(out_path);
    write_aggregate_csv(out, agg);
  }
  if (!svg_path.empty()) {
    auto svg = open_output(svg_path);
    write_svg_chart(svg, agg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed coreset construction and clustering experiments"};
  app.require_subcommand(1);

  auto* data_cmd = app.add_subcommand("gen-data", "Generate a synthetic Gaussian mixture as CSV");
  std::size_t k_true = 5, dim = 10, per_center = 400;
  double spread = 1.0;
  std::uint64_t data_seed = 1;
  std::string data_out, centers_out;
  data_cmd->add_option("--k-true", k_true, "Number of mixture centers");
  data_cmd->add_option("--dim", dim, "Dimension");
  data_cmd->add_option("--per-center", per_center, "Points per center");
  data_cmd->add_option("--spread", spread, "Standard deviation around each center");
  data_cmd->add_option("--seed", data_seed, "Random seed");
  data_cmd->add_option("--out", data_out, "Output CSV")->required();
  data_cmd->add_option("--centers-out", centers_out, "Optional CSV for the true centers");

  auto* topo_cmd = app.add_subcommand("gen-topology", "Generate a communication graph as an edge list");
  std::string kind = "random", topo_out;
  std::size_t sites = 10;
  TopologyParams topo_params;
  std::uint64_t topo_seed = 1;
  topo_cmd->add_option("--kind", kind, "random | grid | preferential");
  topo_cmd->add_option("--sites", sites, "Number of sites");
  topo_cmd->add_option("--p", topo_params.p, "Edge probability (random)");
  topo_cmd->add_option("--rows", topo_params.rows, "Grid rows");
  topo_cmd->add_option("--cols", topo_params.cols, "Grid columns");
  topo_cmd->add_option("--attach", topo_params.attach, "Edges per new site (preferential)");
  topo_cmd->add_option("--seed", topo_seed, "Random seed");
  topo_cmd->add_option("--out", topo_out, "Output file (default stdout)");

  auto* run = app.add_subcommand("run", "Run an experiment sweep and write results CSV");
  std::string config_path, results_out, meta_out;
  run->add_option("--config", config_path, "key=value configuration file");
  run->add_option("--out", results_out, "Results CSV")->required();
  run->add_option("--meta", meta_out, "Metadata file (default <out>.meta)");
  const std::vector<std::string> keys = {
      "data",   "synthetic-k", "synthetic-dim", "synthetic-per-center", "synthetic-spread", "objective",
      "k",      "topology",    "sites",         "p",                    "rows",             "cols",
      "attach", "partition",   "bandwidth",     "method",               "mode",             "sweep",
      "repetitions", "max-iters", "rel-tol",    "weiszfeld-iters",      "weiszfeld-eps",    "threads"};
  std::map<std::string, std::string> overrides;
  std::map<std::string, std::string> raw;
  for (const auto& key : keys) run->add_option("--" + key, raw[key], "Overrides '" + key + "'");
  std::string run_seed;
  run->add_option("--seed", run_seed, "Master seed")->required();

  auto* verify = app.add_subcommand("verify", "Run the built-in property checks and print a pass/fail table");
  std::uint64_t verify_seed = 1;
  std::size_t trials = 100000;
  verify->add_option("--seed", verify_seed, "Random seed");
  verify->add_option("--trials", trials, "Trials for the squared-distance bound");

  auto* report = app.add_subcommand("report", "Aggregate a results CSV per sweep value");
  std::string report_in, report_out, svg_out;
  report->add_option("--in", report_in, "Results CSV")->required();
  report->add_option("--out", report_out, "Aggregate CSV (default stdout)");
  report->add_option("--svg", svg_out, "Optional SVG chart of cost ratio against point units");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*data_cmd) return gen_data(k_true, dim, per_center, spread, data_seed, data_out, centers_out);
    if (*topo_cmd) return gen_topology_cmd(kind, sites, topo_params, topo_seed, topo_out);
    if (*run) {
      for (const auto& key : keys)
        if (run->count("--" + key) > 0) overrides[key] = raw[key];
      overrides["seed"] = run_seed;
      return run_cmd(config_path, overrides, results_out, meta_out);
    }
    if (*verify) return verify_cmd(verify_seed, trials);
    if (*report) return report_cmd(report_in, report_out, svg_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
