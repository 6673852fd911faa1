#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rrflow/prng.hpp"

namespace rrflow {

enum class DiffusionModel { IC, LT };

inline const char* to_string(DiffusionModel m) {
  return m == DiffusionModel::IC ? "ic" : "lt";
}

inline DiffusionModel parse_model(const std::string& s) {
  if (s == "ic" || s == "IC") return DiffusionModel::IC;
  if (s == "lt" || s == "LT") return DiffusionModel::LT;
  throw std::invalid_argument("unknown diffusion model: " + s);
}

// Directed weighted graph in compressed adjacency form, with the transpose
// kept alongside for reverse traversal. Immutable after construction except
// for weight regeneration, which keeps both views consistent.
struct Graph {
  uint32_t num_vertices = 0;
  uint64_t num_edges = 0;

  // Out-adjacency: edges of u live in [forward_offsets[u], forward_offsets[u+1]).
  std::vector<uint64_t> forward_offsets;
  std::vector<uint32_t> forward_targets;
  std::vector<float> forward_weights;

  // In-adjacency (transpose); reverse_edge_index[j] is the forward slot of
  // the same edge, so weight updates can be mirrored cheaply.
  std::vector<uint64_t> reverse_offsets;
  std::vector<uint32_t> reverse_sources;
  std::vector<float> reverse_weights;
  std::vector<uint64_t> reverse_edge_index;

  // Dense id -> id from the input file (identity for synthetic graphs).
  std::vector<uint64_t> original_ids;

  uint64_t out_degree(uint32_t u) const {
    return forward_offsets[u + 1] - forward_offsets[u];
  }
  uint64_t in_degree(uint32_t u) const {
    return reverse_offsets[u + 1] - reverse_offsets[u];
  }
};

namespace detail {

struct EdgeTriple {
  uint32_t src;
  uint32_t dst;
  float weight;
};

inline Graph build_graph(uint32_t n, std::vector<EdgeTriple> edges,
                         std::vector<uint64_t> original_ids) {
  Graph g;
  g.num_vertices = n;
  g.num_edges = edges.size();
  g.original_ids = std::move(original_ids);
  if (g.original_ids.empty()) {
    g.original_ids.resize(n);
    std::iota(g.original_ids.begin(), g.original_ids.end(), uint64_t{0});
  }

  // Counting sort by source keeps file order within each adjacency list, so
  // loading the same file twice yields byte-identical arrays.
  g.forward_offsets.assign(n + 1, 0);
  for (const auto& e : edges) g.forward_offsets[e.src + 1]++;
  for (uint32_t v = 0; v < n; ++v) g.forward_offsets[v + 1] += g.forward_offsets[v];
  g.forward_targets.resize(edges.size());
  g.forward_weights.resize(edges.size());
  {
    std::vector<uint64_t> cursor(g.forward_offsets.begin(), g.forward_offsets.end() - 1);
    for (const auto& e : edges) {
      const uint64_t slot = cursor[e.src]++;
      g.forward_targets[slot] = e.dst;
      g.forward_weights[slot] = e.weight;
    }
  }

  g.reverse_offsets.assign(n + 1, 0);
  for (const auto& e : edges) g.reverse_offsets[e.dst + 1]++;
  for (uint32_t v = 0; v < n; ++v) g.reverse_offsets[v + 1] += g.reverse_offsets[v];
  g.reverse_sources.resize(edges.size());
  g.reverse_weights.resize(edges.size());
  g.reverse_edge_index.resize(edges.size());
  {
    std::vector<uint64_t> cursor(g.reverse_offsets.begin(), g.reverse_offsets.end() - 1);
    for (uint32_t u = 0; u < n; ++u) {
      for (uint64_t j = g.forward_offsets[u]; j < g.forward_offsets[u + 1]; ++j) {
        const uint32_t dst = g.forward_targets[j];
        const uint64_t slot = cursor[dst]++;
        g.reverse_sources[slot] = u;
        g.reverse_weights[slot] = g.forward_weights[j];
        g.reverse_edge_index[slot] = j;
      }
    }
  }
  return g;
}

}  // namespace detail

// Parses a SNAP-style edge list: one `src dst [weight]` per line, `#` comment
// lines ignored, arbitrary nonnegative vertex ids remapped densely in order
// of first appearance. Self-loops are dropped; parallel edges are kept. With
// directed=false each input line emits both directions.
inline Graph load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  std::unordered_map<uint64_t, uint32_t> remap;
  std::vector<uint64_t> original_ids;
  std::vector<detail::EdgeTriple> edges;

  auto intern = [&](uint64_t id) -> uint32_t {
    auto [it, inserted] = remap.emplace(id, static_cast<uint32_t>(original_ids.size()));
    if (inserted) original_ids.push_back(id);
    return it->second;
  };

  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    uint64_t src_id, dst_id;
    if (!(fields >> src_id >> dst_id)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed edge line");
    }
    double w = 1.0;
    if (fields >> w) {
      if (!(w >= 0.0 && w <= 1.0)) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": edge weight outside [0,1]");
      }
    }
    std::string rest;
    if (fields >> rest) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": trailing fields on edge line");
    }
    const uint32_t s = intern(src_id);
    const uint32_t d = intern(dst_id);
    if (s == d) continue;
    edges.push_back({s, d, static_cast<float>(w)});
    if (!directed) edges.push_back({d, s, static_cast<float>(w)});
  }
  if (original_ids.empty()) {
    throw std::runtime_error(path + ": empty graph");
  }
  const auto n = static_cast<uint32_t>(original_ids.size());
  return detail::build_graph(n, std::move(edges), std::move(original_ids));
}

// Writes `src dst weight` lines using original vertex ids.
inline void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  char buf[96];
  for (uint32_t u = 0; u < g.num_vertices; ++u) {
    for (uint64_t j = g.forward_offsets[u]; j < g.forward_offsets[u + 1]; ++j) {
      std::snprintf(buf, sizeof(buf), "%llu %llu %.9g\n",
                    static_cast<unsigned long long>(g.original_ids[u]),
                    static_cast<unsigned long long>(g.original_ids[g.forward_targets[j]]),
                    static_cast<double>(g.forward_weights[j]));
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Draws i.i.d. uniform [0,1] activation probabilities for every forward edge
// and mirrors them into the transpose.
inline void generate_ic_weights(Graph& g, uint64_t rng_seed) {
  Prng rng(derive_stream_seed(rng_seed, 0xedcef1ULL));
  for (auto& w : g.forward_weights) {
    w = static_cast<float>(rng.uniform01());
  }
  for (uint64_t j = 0; j < g.num_edges; ++j) {
    g.reverse_weights[j] = g.forward_weights[g.reverse_edge_index[j]];
  }
}

// Rescales each vertex's incoming weights so they sum to at most one; the
// residual is the probability of activating no neighbor. Vertices already
// feasible are left untouched. Weights are stored in 32-bit floats, so the
// scale is deflated until the float sum provably stays under the bound.
inline void normalize_lt_weights(Graph& g) {
  for (uint32_t v = 0; v < g.num_vertices; ++v) {
    const uint64_t begin = g.reverse_offsets[v];
    const uint64_t end = g.reverse_offsets[v + 1];
    double sum = 0.0;
    for (uint64_t j = begin; j < end; ++j) {
      if (g.reverse_weights[j] < 0.0f) {
        throw std::runtime_error("negative edge weight on vertex " + std::to_string(v));
      }
      sum += g.reverse_weights[j];
    }
    if (sum <= 1.0) continue;
    double scale = 1.0 / sum;
    for (int attempt = 0; attempt < 64; ++attempt) {
      double scaled_sum = 0.0;
      for (uint64_t j = begin; j < end; ++j) {
        scaled_sum += static_cast<float>(g.reverse_weights[j] * scale);
      }
      if (scaled_sum <= 1.0) break;
      scale *= 1.0 - 0x1.0p-20;
    }
    for (uint64_t j = begin; j < end; ++j) {
      g.reverse_weights[j] = static_cast<float>(g.reverse_weights[j] * scale);
    }
  }
  for (uint64_t j = 0; j < g.num_edges; ++j) {
    g.forward_weights[g.reverse_edge_index[j]] = g.reverse_weights[j];
  }
}

enum class SynthKind { erdos_renyi, scc_core };

// Deterministic synthetic graphs for tests and benchmarks. erdos_renyi draws
// each ordered pair (u,v), u != v, with the given probability. scc_core puts
// the first round(frac*n) vertices on a cycle plus random chords (one strongly
// connected dense core) and hangs a sparse periphery off it: every periphery
// vertex has an in-edge from the core, so reverse walks rooted anywhere in the
// periphery can reach the whole core.
inline Graph synth_graph(SynthKind kind, uint32_t n, double param, uint64_t rng_seed) {
  if (n < 1) throw std::invalid_argument("synth_graph: n must be >= 1");
  Prng rng(derive_stream_seed(rng_seed, 0x5f3759dfULL));
  std::vector<detail::EdgeTriple> edges;

  if (kind == SynthKind::erdos_renyi) {
    if (!(param >= 0.0 && param <= 1.0)) {
      throw std::invalid_argument("erdos_renyi: probability out of range");
    }
    if (param > 0.0 && n > 1) {
      // Geometric skipping over the n*(n-1) ordered non-loop pairs.
      const double log1mp = std::log1p(-param);
      const uint64_t pairs = static_cast<uint64_t>(n) * (n - 1);
      uint64_t idx = 0;
      while (true) {
        if (param >= 1.0) {
          if (idx >= pairs) break;
        } else {
          const double r = rng.uniform01();
          const double skip = std::floor(std::log1p(-r) / log1mp);
          if (skip >= static_cast<double>(pairs - idx)) break;
          idx += static_cast<uint64_t>(skip);
        }
        if (idx >= pairs) break;
        const uint32_t u = static_cast<uint32_t>(idx / (n - 1));
        uint32_t v = static_cast<uint32_t>(idx % (n - 1));
        if (v >= u) ++v;
        edges.push_back({u, v, 1.0f});
        ++idx;
      }
    }
  } else {
    if (!(param > 0.0 && param <= 1.0)) {
      throw std::invalid_argument("scc_core: core fraction out of range");
    }
    const uint32_t core = std::max<uint32_t>(1, static_cast<uint32_t>(std::lround(param * n)));
    // Core cycle guarantees strong connectivity; chords densify it.
    for (uint32_t u = 0; u < core; ++u) {
      edges.push_back({u, (u + 1) % core, 1.0f});
    }
    if (core > 2) {
      const uint32_t chords_per_vertex = 8;
      for (uint32_t u = 0; u < core; ++u) {
        for (uint32_t c = 0; c < chords_per_vertex; ++c) {
          const uint32_t v = static_cast<uint32_t>(rng.uniform_below(core));
          if (v != u) edges.push_back({u, v, 1.0f});
        }
      }
    }
    for (uint32_t v = core; v < n; ++v) {
      const uint32_t from_core = static_cast<uint32_t>(rng.uniform_below(core));
      edges.push_back({from_core, v, 1.0f});
      const uint32_t back = static_cast<uint32_t>(rng.uniform_below(core));
      edges.push_back({v, back, 1.0f});
      if (v > core && rng.bernoulli(0.5)) {
        const uint32_t prev = core + static_cast<uint32_t>(rng.uniform_below(v - core));
        edges.push_back({prev, v, 1.0f});
      }
    }
  }
  return detail::build_graph(n, std::move(edges), {});
}

// Binary cache ("RRFG" v1): counts, forward arrays and original ids in
// little-endian; the transpose is rebuilt on load.
inline void save_binary(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write graph cache: " + path);
  const char magic[4] = {'R', 'R', 'F', 'G'};
  const uint8_t version = 1;
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 1);
  const uint64_t n = g.num_vertices;
  const uint64_t m = g.num_edges;
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&m), 8);
  out.write(reinterpret_cast<const char*>(g.forward_offsets.data()), (n + 1) * 8);
  out.write(reinterpret_cast<const char*>(g.forward_targets.data()), m * 4);
  out.write(reinterpret_cast<const char*>(g.forward_weights.data()), m * 4);
  out.write(reinterpret_cast<const char*>(g.original_ids.data()), n * 8);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline Graph load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open graph cache: " + path);
  char magic[4];
  uint8_t version = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 1);
  if (!in || std::memcmp(magic, "RRFG", 4) != 0) {
    throw std::runtime_error(path + ": not an RRFG graph cache");
  }
  if (version != 1) {
    throw std::runtime_error(path + ": unsupported RRFG version");
  }
  uint64_t n = 0, m = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&m), 8);
  std::vector<uint64_t> offsets(n + 1);
  std::vector<uint32_t> targets(m);
  std::vector<float> weights(m);
  std::vector<uint64_t> original_ids(n);
  in.read(reinterpret_cast<char*>(offsets.data()), (n + 1) * 8);
  in.read(reinterpret_cast<char*>(targets.data()), m * 4);
  in.read(reinterpret_cast<char*>(weights.data()), m * 4);
  in.read(reinterpret_cast<char*>(original_ids.data()), n * 8);
  if (!in) throw std::runtime_error(path + ": truncated RRFG cache");

  std::vector<detail::EdgeTriple> edges;
  edges.reserve(m);
  for (uint32_t u = 0; u < n; ++u) {
    for (uint64_t j = offsets[u]; j < offsets[u + 1]; ++j) {
      edges.push_back({u, targets[j], weights[j]});
    }
  }
  return detail::build_graph(static_cast<uint32_t>(n), std::move(edges),
                             std::move(original_ids));
}

}  // namespace rrflow
