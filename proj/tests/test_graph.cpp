#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "rrflow/graph.hpp"
#include "test_util.hpp"

using namespace rrflow;
using test_util::TempDir;
using test_util::write_file;

namespace {

using EdgeKey = std::tuple<uint32_t, uint32_t, float>;

std::vector<EdgeKey> forward_edges(const Graph& g) {
  std::vector<EdgeKey> out;
  for (uint32_t u = 0; u < g.num_vertices; ++u) {
    for (uint64_t j = g.forward_offsets[u]; j < g.forward_offsets[u + 1]; ++j) {
      out.emplace_back(u, g.forward_targets[j], g.forward_weights[j]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EdgeKey> reverse_edges_flipped(const Graph& g) {
  std::vector<EdgeKey> out;
  for (uint32_t v = 0; v < g.num_vertices; ++v) {
    for (uint64_t j = g.reverse_offsets[v]; j < g.reverse_offsets[v + 1]; ++j) {
      out.emplace_back(g.reverse_sources[j], v, g.reverse_weights[j]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_structure(const Graph& g) {
  REQUIRE(g.forward_offsets.size() == g.num_vertices + 1);
  REQUIRE(g.reverse_offsets.size() == g.num_vertices + 1);
  REQUIRE(std::is_sorted(g.forward_offsets.begin(), g.forward_offsets.end()));
  REQUIRE(std::is_sorted(g.reverse_offsets.begin(), g.reverse_offsets.end()));
  REQUIRE(g.forward_offsets.back() == g.num_edges);
  REQUIRE(g.reverse_offsets.back() == g.num_edges);
  for (const float w : g.forward_weights) {
    REQUIRE(w >= 0.0f);
    REQUIRE(w <= 1.0f);
  }
  REQUIRE(forward_edges(g) == reverse_edges_flipped(g));
}

}  // namespace

TEST_CASE("load_edge_list parses a plain directed file") {
  TempDir dir("load");
  const auto path = write_file(dir, "a.txt", "0 1\n1 2\n");
  const Graph g = load_edge_list(path, true);
  REQUIRE(g.num_vertices == 3);
  REQUIRE(g.num_edges == 2);
  REQUIRE(g.forward_targets == std::vector<uint32_t>{1, 2});
  REQUIRE(g.forward_weights == std::vector<float>{1.0f, 1.0f});
  check_structure(g);
}

TEST_CASE("load_edge_list remaps sparse ids densely in first-appearance order") {
  TempDir dir("remap");
  const auto path = write_file(dir, "a.txt", "# c\n5 9 0.5\n");
  const Graph g = load_edge_list(path, true);
  REQUIRE(g.num_vertices == 2);
  REQUIRE(g.num_edges == 1);
  REQUIRE(g.original_ids == std::vector<uint64_t>{5, 9});
  REQUIRE(g.forward_targets[0] == 1);
  REQUIRE(g.forward_weights[0] == 0.5f);
}

TEST_CASE("load_edge_list expands undirected input and drops self-loops") {
  TempDir dir("undirected");
  const auto path = write_file(dir, "a.txt", "0 1\n2 2\n0 1\n");
  const Graph g = load_edge_list(path, false);
  REQUIRE(g.num_vertices == 3);
  // parallel edges kept, self loop dropped, both directions emitted
  REQUIRE(g.num_edges == 4);
  check_structure(g);
}

TEST_CASE("load_edge_list rejects malformed input with the line number") {
  TempDir dir("bad");
  const auto path = write_file(dir, "a.txt", "0 1\nbroken\n");
  REQUIRE_THROWS_WITH(load_edge_list(path, true),
                      Catch::Matchers::ContainsSubstring(":2"));

  const auto huge = write_file(dir, "w.txt", "0 1 1.5\n");
  REQUIRE_THROWS(load_edge_list(huge, true));

  const auto empty = write_file(dir, "e.txt", "# nothing\n");
  REQUIRE_THROWS_WITH(load_edge_list(empty, true),
                      Catch::Matchers::ContainsSubstring("empty"));

  REQUIRE_THROWS(load_edge_list(dir.file("missing.txt"), true));
}

TEST_CASE("loading the same file twice yields identical structures") {
  TempDir dir("same");
  const auto path =
      write_file(dir, "a.txt", "3 7 0.25\n7 3 0.75\n3 9\n9 7 0.125\n");
  const Graph a = load_edge_list(path, true);
  const Graph b = load_edge_list(path, true);
  REQUIRE(a.forward_offsets == b.forward_offsets);
  REQUIRE(a.forward_targets == b.forward_targets);
  REQUIRE(a.forward_weights == b.forward_weights);
  REQUIRE(a.reverse_offsets == b.reverse_offsets);
  REQUIRE(a.reverse_sources == b.reverse_sources);
  REQUIRE(a.original_ids == b.original_ids);
}

TEST_CASE("transpose describes the same edge multiset") {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = test_util::random_graph(30, 120, gen);
    check_structure(g);
  }
}

TEST_CASE("generate_ic_weights draws deterministic uniform weights") {
  Graph g = synth_graph(SynthKind::erdos_renyi, 500, 0.45, 9);
  REQUIRE(g.num_edges > 90000);

  generate_ic_weights(g, 1234);
  const std::vector<float> first = g.forward_weights;
  double sum = 0.0;
  for (const float w : first) {
    REQUIRE(w >= 0.0f);
    REQUIRE(w <= 1.0f);
    sum += w;
  }
  // law of large numbers over ~1e5 uniform draws
  REQUIRE(sum / static_cast<double>(first.size()) == Catch::Approx(0.5).margin(0.01));

  generate_ic_weights(g, 1234);
  REQUIRE(g.forward_weights == first);
  check_structure(g);

  generate_ic_weights(g, 99);
  REQUIRE(g.forward_weights != first);
}

TEST_CASE("normalize_lt_weights splits a unit-weight in-star evenly") {
  const Graph base = test_util::graph_from_edges(
      5, {{0, 4, 1.0f}, {1, 4, 1.0f}, {2, 4, 1.0f}, {3, 4, 1.0f}});
  Graph g = base;
  normalize_lt_weights(g);
  double sum = 0.0;
  for (uint64_t j = g.reverse_offsets[4]; j < g.reverse_offsets[5]; ++j) {
    REQUIRE(g.reverse_weights[j] == 0.25f);
    sum += g.reverse_weights[j];
  }
  REQUIRE(sum == 1.0);
  check_structure(g);
}

TEST_CASE("normalize_lt_weights leaves feasible vertices untouched") {
  Graph g = test_util::graph_from_edges(3, {{0, 2, 0.2f}, {1, 2, 0.2f}});
  normalize_lt_weights(g);
  REQUIRE(g.reverse_weights == std::vector<float>{0.2f, 0.2f});

  // no in-edges: vacuously feasible
  Graph isolated = test_util::graph_from_edges(2, {{0, 1, 0.9f}});
  normalize_lt_weights(isolated);
  REQUIRE(isolated.forward_weights == std::vector<float>{0.9f});
}

TEST_CASE("normalize_lt_weights enforces the feasibility invariant") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = test_util::random_graph(25, 200, gen, 0.05f, 1.0f);
    normalize_lt_weights(g);
    for (uint32_t v = 0; v < g.num_vertices; ++v) {
      double sum = 0.0;
      for (uint64_t j = g.reverse_offsets[v]; j < g.reverse_offsets[v + 1]; ++j) {
        sum += g.reverse_weights[j];
      }
      REQUIRE(sum <= 1.0 + 1e-12);
    }
    check_structure(g);
  }
}

TEST_CASE("normalize_lt_weights rejects negative weights") {
  Graph g = test_util::graph_from_edges(2, {{0, 1, 0.5f}});
  g.reverse_weights[0] = -0.25f;
  REQUIRE_THROWS_WITH(normalize_lt_weights(g),
                      Catch::Matchers::ContainsSubstring("negative"));
}

TEST_CASE("synth erdos_renyi handles the degenerate single vertex") {
  const Graph g = synth_graph(SynthKind::erdos_renyi, 1, 0.5, 3);
  REQUIRE(g.num_vertices == 1);
  REQUIRE(g.num_edges == 0);
}

TEST_CASE("synth erdos_renyi edge count concentrates around the binomial mean") {
  const Graph g = synth_graph(SynthKind::erdos_renyi, 1000, 0.01, 11);
  // Binomial(n(n-1), 0.01): mean 9990, sd ~99.4; 3-sigma band
  REQUIRE(g.num_edges >= 9691);
  REQUIRE(g.num_edges <= 10289);
  check_structure(g);

  const Graph again = synth_graph(SynthKind::erdos_renyi, 1000, 0.01, 11);
  REQUIRE(again.forward_targets == g.forward_targets);
}

TEST_CASE("synth scc_core builds a strongly connected core") {
  const Graph g = synth_graph(SynthKind::scc_core, 100, 0.3, 5);
  REQUIRE(g.num_vertices == 100);
  const auto comp = test_util::tarjan_scc(g);
  for (uint32_t v = 1; v < 30; ++v) {
    REQUIRE(comp[v] == comp[0]);
  }
  check_structure(g);
}

TEST_CASE("synth_graph validates its parameter") {
  REQUIRE_THROWS(synth_graph(SynthKind::erdos_renyi, 10, 1.5, 1));
  REQUIRE_THROWS(synth_graph(SynthKind::scc_core, 10, 0.0, 1));
  REQUIRE_THROWS(synth_graph(SynthKind::scc_core, 10, 1.5, 1));
}

TEST_CASE("binary cache round-trips a graph") {
  TempDir dir("cache");
  Graph g = synth_graph(SynthKind::scc_core, 50, 0.2, 21);
  generate_ic_weights(g, 77);
  const auto path = dir.file("g.rrfg");
  save_binary(g, path);
  const Graph back = load_binary(path);
  REQUIRE(back.num_vertices == g.num_vertices);
  REQUIRE(back.forward_offsets == g.forward_offsets);
  REQUIRE(back.forward_targets == g.forward_targets);
  REQUIRE(back.forward_weights == g.forward_weights);
  REQUIRE(back.reverse_sources == g.reverse_sources);
  REQUIRE(back.original_ids == g.original_ids);

  const auto bogus = write_file(dir, "bogus.rrfg", "not a cache");
  REQUIRE_THROWS(load_binary(bogus));
}

TEST_CASE("write_edge_list emits original ids and reloads identically") {
  TempDir dir("roundtrip");
  const auto path = write_file(dir, "a.txt", "10 20 0.5\n20 30 0.25\n30 10\n");
  Graph g = load_edge_list(path, true);
  const auto out = dir.file("out.txt");
  write_edge_list(g, out);
  const Graph back = load_edge_list(out, true);
  REQUIRE(back.original_ids == g.original_ids);
  REQUIRE(forward_edges(back) == forward_edges(g));
}
