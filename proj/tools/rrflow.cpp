// rrflow command-line driver: run the influence-maximization engine on an
// edge-list dataset, generate model weights, run scaling benchmarks and
// summarize benchmark logs into per-model speedup CSVs.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrflow/graph.hpp"
#include "rrflow/imm.hpp"
#include "rrflow/sampling.hpp"
#include "rrflow/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

rrflow::Graph load_input(const std::string& path, bool undirected,
                         rrflow::DiffusionModel model) {
  rrflow::Graph g = rrflow::load_edge_list(path, !undirected);
  // LT sampling needs feasible in-weight sums; normalization is a no-op for
  // already-feasible vertices.
  if (model == rrflow::DiffusionModel::LT) rrflow::normalize_lt_weights(g);
  return g;
}

json run_log_json(const std::string& input, const rrflow::Graph& g,
                  const rrflow::ImmConfig& cfg, const rrflow::ImmResult& result) {
  json seeds = json::array();
  for (const uint32_t v : result.seeds.seeds) {
    seeds.push_back(g.original_ids[v]);
  }
  json log;
  log["tool_version"] = rrflow::kVersion;
  log["input"] = input;
  log["model"] = rrflow::to_string(cfg.model);
  log["k"] = cfg.k;
  log["epsilon"] = cfg.epsilon;
  log["workers"] = cfg.workers;
  log["rng_seed"] = cfg.rng_seed;
  log["strategy"] = rrflow::to_string(cfg.strategy);
  log["adaptive_threshold"] = cfg.adaptive_threshold;
  log["theta"] = result.theta;
  log["theta_prime"] = result.theta_prime;
  log["lower_bound"] = result.lower_bound;
  log["seeds"] = std::move(seeds);
  log["timings"] = {{"generate_rrrsets", result.timings.generate_rrrsets},
                    {"find_most_influential", result.timings.find_most_influential},
                    {"total", result.timings.total}};
  log["set_stats"] = {{"sets_generated", result.sets_generated},
                      {"mean_size", result.mean_set_size},
                      {"max_size", result.max_set_size},
                      {"mean_coverage_fraction", result.mean_coverage_fraction}};
  return log;
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct RunOptions {
  std::string input;
  std::string model = "ic";
  uint32_t k = 50;
  double epsilon = 0.5;
  unsigned workers = 0;
  uint64_t seed = 1;
  std::string output;
  std::string strategy = "fused";
  double adaptive_threshold = 0.25;
  bool undirected = false;
};

int cmd_run(const RunOptions& opt) {
  rrflow::ImmConfig cfg;
  cfg.k = opt.k;
  cfg.epsilon = opt.epsilon;
  cfg.model = rrflow::parse_model(opt.model);
  cfg.workers = opt.workers == 0 ? default_workers() : opt.workers;
  cfg.rng_seed = opt.seed;
  cfg.strategy = rrflow::parse_strategy(opt.strategy);
  cfg.adaptive_threshold = opt.adaptive_threshold;

  const rrflow::Graph g = load_input(opt.input, opt.undirected, cfg.model);
  const rrflow::ImmResult result = rrflow::run_imm(g, cfg);
  write_json(run_log_json(opt.input, g, cfg, result), opt.output);

  std::cout << "seeds:";
  for (const uint32_t v : result.seeds.seeds) std::cout << ' ' << g.original_ids[v];
  std::cout << '\n';
  std::printf("theta: %llu\n", static_cast<unsigned long long>(result.theta));
  std::printf("total_time_s: %.6f\n", result.timings.total);
  return 0;
}

struct GenWeightsOptions {
  std::string input;
  std::string model = "ic";
  uint64_t seed = 1;
  std::string output;
};

int cmd_gen_weights(const GenWeightsOptions& opt) {
  const rrflow::DiffusionModel model = rrflow::parse_model(opt.model);
  rrflow::Graph g = rrflow::load_edge_list(opt.input, true);
  rrflow::generate_ic_weights(g, opt.seed);
  if (model == rrflow::DiffusionModel::LT) rrflow::normalize_lt_weights(g);
  rrflow::write_edge_list(g, opt.output);
  std::printf("wrote %llu weighted edges to %s\n",
              static_cast<unsigned long long>(g.num_edges), opt.output.c_str());
  return 0;
}

struct BenchOptions {
  std::string input;
  std::string model = "ic";
  uint32_t k = 50;
  double epsilon = 0.5;
  unsigned min_workers = 0;
  unsigned max_workers = 0;
  std::string outdir;
  std::string strategies = "fused,baseline";
  uint64_t seed = 1;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_bench(const BenchOptions& opt) {
  const rrflow::DiffusionModel model = rrflow::parse_model(opt.model);
  const rrflow::Graph g = load_input(opt.input, false, model);
  fs::create_directories(opt.outdir);

  for (const std::string& strategy : split_csv(opt.strategies)) {
    for (unsigned w = opt.min_workers; w <= opt.max_workers; w *= 2) {
      rrflow::ImmConfig cfg;
      cfg.k = opt.k;
      cfg.epsilon = opt.epsilon;
      cfg.model = model;
      cfg.workers = w;
      cfg.rng_seed = opt.seed;
      cfg.strategy = rrflow::parse_strategy(strategy);
      const rrflow::ImmResult result = rrflow::run_imm(g, cfg);
      const std::string name =
          strategy + "-" + rrflow::to_string(model) + "-w" + std::to_string(w) + ".json";
      const fs::path path = fs::path(opt.outdir) / name;
      write_json(run_log_json(opt.input, g, cfg, result), path.string());
      std::printf("%s: total %.6f s\n", name.c_str(), result.timings.total);
    }
  }
  return 0;
}

struct SummarizeOptions {
  std::string indir;
  std::string outdir;
};

struct BestRun {
  double time = 0.0;
  unsigned workers = 0;
  bool present = false;

  void offer(double t, unsigned w) {
    if (!present || t < time) {
      time = t;
      workers = w;
      present = true;
    }
  }
};

int cmd_summarize(const SummarizeOptions& opt) {
  // model -> dataset -> {fused, baseline} bests
  std::map<std::string, std::map<std::string, std::pair<BestRun, BestRun>>> tables;
  uint64_t logs_seen = 0;
  for (const auto& entry : fs::directory_iterator(opt.indir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    nlohmann::json log;
    try {
      in >> log;
    } catch (const nlohmann::json::parse_error&) {
      continue;
    }
    if (!log.contains("model") || !log.contains("strategy") ||
        !log.contains("timings") || !log.contains("input")) {
      continue;
    }
    ++logs_seen;
    const std::string model = log["model"];
    const std::string dataset = fs::path(log["input"].get<std::string>()).stem().string();
    const double total = log["timings"]["total"];
    const unsigned workers = log["workers"];
    auto& row = tables[model][dataset];
    if (log["strategy"] == "fused") {
      row.first.offer(total, workers);
    } else {
      row.second.offer(total, workers);
    }
  }
  if (logs_seen == 0) {
    throw std::runtime_error("no run logs found in " + opt.indir);
  }

  fs::create_directories(opt.outdir);
  for (const auto& [model, rows] : tables) {
    const fs::path path = fs::path(opt.outdir) / ("speedup_" + model + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "Dataset,Speedup,EfficientIMM Time (s),Ripples Time (s),"
           "Ripples Best #Threads,EfficientIMM Best #Threads\n";
    for (const auto& [dataset, best] : rows) {
      const auto& [fused, baseline] = best;
      if (!fused.present || !baseline.present) {
        std::cerr << "warning: " << dataset << " (" << model
                  << ") lacks one strategy; skipped\n";
        continue;
      }
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%.9g,%.9g,%.9g,%u,%u\n", dataset.c_str(),
                    baseline.time / fused.time, fused.time, baseline.time,
                    baseline.workers, fused.workers);
      out << line;
    }
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

struct StatsOptions {
  std::string input;
  std::string model = "ic";
  uint64_t samples = 1000;
  uint64_t seed = 1;
  bool undirected = false;
};

int cmd_stats(const StatsOptions& opt) {
  const rrflow::DiffusionModel model = rrflow::parse_model(opt.model);
  const rrflow::Graph g = load_input(opt.input, opt.undirected, model);
  rrflow::WorkPool pool(default_workers());
  rrflow::RRRStore store(g.num_vertices, pool.workers());
  rrflow::generate_batch(g, model, opt.seed, opt.samples, pool, store, nullptr);

  uint64_t member_sum = 0;
  uint32_t max_size = 0;
  for (uint64_t j = 0; j < store.size(); ++j) {
    member_sum += store.set(j).size();
    max_size = std::max(max_size, store.set(j).size());
  }
  const double n = static_cast<double>(g.num_vertices);
  const double mean_size =
      static_cast<double>(member_sum) / static_cast<double>(store.size());
  std::printf("nodes %u\n", g.num_vertices);
  std::printf("edges %llu\n", static_cast<unsigned long long>(g.num_edges));
  std::printf("samples %llu\n", static_cast<unsigned long long>(store.size()));
  std::printf("mean_size %.3f\n", mean_size);
  std::printf("max_size %u\n", max_size);
  std::printf("mean_coverage_pct %.4f\n", 100.0 * mean_size / n);
  std::printf("max_coverage_pct %.4f\n", 100.0 * static_cast<double>(max_size) / n);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rrflow: parallel influence maximization via reverse influence sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rrflow::kVersion);

  const auto positive = CLI::Range(1u, std::numeric_limits<unsigned>::max());
  const auto open_unit = [](const std::string& value) -> std::string {
    const double x = std::stod(value);
    if (!(x > 0.0 && x < 1.0)) return "must lie in (0, 1)";
    return {};
  };

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "run IMM on a dataset and write a JSON log");
  run->add_option("--input", run_opt.input, "edge list path")->required();
  run->add_option("--model", run_opt.model, "diffusion model (ic|lt)")
      ->check(CLI::IsMember({"ic", "lt"}));
  run->add_option("--k", run_opt.k, "seed budget")->check(positive);
  run->add_option("--epsilon", run_opt.epsilon, "approximation parameter")
      ->check(CLI::Validator(open_unit, "OPEN_UNIT"));
  run->add_option("--workers", run_opt.workers, "worker threads")
      ->envname("RRFLOW_WORKERS")
      ->check(positive);
  run->add_option("--seed", run_opt.seed, "RNG seed");
  run->add_option("--output", run_opt.output, "JSON log path")->required();
  run->add_option("--strategy", run_opt.strategy, "selection strategy")
      ->check(CLI::IsMember({"fused", "baseline"}));
  run->add_option("--adaptive-threshold", run_opt.adaptive_threshold,
                  "rebuild trigger as covered fraction of live sets")
      ->check(CLI::Range(0.0, 1.0));
  run->add_flag("--undirected", run_opt.undirected, "expand each edge both ways");

  GenWeightsOptions gen_opt;
  auto* gen = app.add_subcommand("gen-weights", "generate model edge weights");
  gen->add_option("--input", gen_opt.input, "edge list path")->required();
  gen->add_option("--model", gen_opt.model, "diffusion model (ic|lt)")
      ->check(CLI::IsMember({"ic", "lt"}));
  gen->add_option("--seed", gen_opt.seed, "RNG seed");
  gen->add_option("--output", gen_opt.output, "weighted edge list path")->required();

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "strong-scaling runs, doubling workers");
  bench->add_option("--input", bench_opt.input, "edge list path")->required();
  bench->add_option("--model", bench_opt.model, "diffusion model (ic|lt)")
      ->check(CLI::IsMember({"ic", "lt"}));
  bench->add_option("--k", bench_opt.k, "seed budget")->check(positive);
  bench->add_option("--epsilon", bench_opt.epsilon, "approximation parameter")
      ->check(CLI::Validator(open_unit, "OPEN_UNIT"));
  bench->add_option("--min-workers", bench_opt.min_workers, "starting worker count")
      ->required()
      ->check(positive);
  bench->add_option("--max-workers", bench_opt.max_workers, "worker count limit")
      ->required()
      ->check(positive);
  bench->add_option("--outdir", bench_opt.outdir, "log directory")->required();
  bench->add_option("--strategies", bench_opt.strategies,
                    "comma-separated: fused,baseline");
  bench->add_option("--seed", bench_opt.seed, "RNG seed");

  SummarizeOptions sum_opt;
  auto* summarize = app.add_subcommand("summarize", "fold bench logs into speedup CSVs");
  summarize->add_option("--indir", sum_opt.indir, "directory of run logs")->required();
  summarize->add_option("--outdir", sum_opt.outdir, "CSV output directory")->required();

  StatsOptions stats_opt;
  auto* stats = app.add_subcommand("stats", "sample RRR sets and report coverage");
  stats->add_option("--input", stats_opt.input, "edge list path")->required();
  stats->add_option("--model", stats_opt.model, "diffusion model (ic|lt)")
      ->check(CLI::IsMember({"ic", "lt"}));
  stats->add_option("--samples", stats_opt.samples, "number of RRR sets")
      ->check(CLI::Range(uint64_t{1}, std::numeric_limits<uint64_t>::max()));
  stats->add_option("--seed", stats_opt.seed, "RNG seed");
  stats->add_flag("--undirected", stats_opt.undirected, "expand each edge both ways");

  try {
    app.parse(argc, argv);
    if (bench->parsed() && bench_opt.max_workers < bench_opt.min_workers) {
      throw CLI::ValidationError("--max-workers must be >= --min-workers");
    }
    if (run->parsed()) return cmd_run(run_opt);
    if (gen->parsed()) return cmd_gen_weights(gen_opt);
    if (bench->parsed()) return cmd_bench(bench_opt);
    if (summarize->parsed()) return cmd_summarize(sum_opt);
    if (stats->parsed()) return cmd_stats(stats_opt);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
