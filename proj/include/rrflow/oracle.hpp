#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rrflow/graph.hpp"
#include "rrflow/prng.hpp"

namespace rrflow {

enum class SpreadMethod { exact_enumeration, monte_carlo };

struct SpreadEstimate {
  double value = 0.0;
  SpreadMethod method = SpreadMethod::exact_enumeration;
  uint64_t trials = 0;
  double std_error = 0.0;
};

inline constexpr uint64_t kMaxExactIcEdges = 20;
inline constexpr double kMaxExactLtOutcomes = 1048576.0;  // 2^20

namespace detail {

// BFS over an explicit live-edge adjacency; returns |reachable(seeds)|.
inline uint32_t count_reachable(const std::vector<std::vector<uint32_t>>& adjacency,
                                const std::vector<uint32_t>& seeds,
                                std::vector<uint8_t>& visited,
                                std::vector<uint32_t>& queue) {
  std::fill(visited.begin(), visited.end(), uint8_t{0});
  queue.clear();
  for (const uint32_t s : seeds) {
    if (!visited[s]) {
      visited[s] = 1;
      queue.push_back(s);
    }
  }
  for (size_t head = 0; head < queue.size(); ++head) {
    for (const uint32_t t : adjacency[queue[head]]) {
      if (!visited[t]) {
        visited[t] = 1;
        queue.push_back(t);
      }
    }
  }
  return static_cast<uint32_t>(queue.size());
}

// Forward IC cascade; returns the activated count. Each out-edge of a newly
// activated vertex gets one independent chance.
inline uint32_t simulate_ic(const Graph& g, const std::vector<uint32_t>& seeds,
                            Prng& rng, std::vector<uint8_t>& active,
                            std::vector<uint32_t>& queue) {
  std::fill(active.begin(), active.end(), uint8_t{0});
  queue.clear();
  for (const uint32_t s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      queue.push_back(s);
    }
  }
  for (size_t head = 0; head < queue.size(); ++head) {
    const uint32_t u = queue[head];
    for (uint64_t j = g.forward_offsets[u]; j < g.forward_offsets[u + 1]; ++j) {
      const uint32_t v = g.forward_targets[j];
      if (!active[v] && rng.bernoulli(g.forward_weights[j])) {
        active[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return static_cast<uint32_t>(queue.size());
}

// Forward LT cascade; thresholds are drawn fresh per trial, lazily on the
// first incoming contribution. A vertex activates once the accumulated
// incoming weight from active neighbors reaches its threshold.
inline uint32_t simulate_lt(const Graph& g, const std::vector<uint32_t>& seeds,
                            Prng& rng, std::vector<uint8_t>& active,
                            std::vector<uint32_t>& queue,
                            std::vector<double>& accumulated,
                            std::vector<double>& threshold,
                            std::vector<uint8_t>& threshold_drawn) {
  std::fill(active.begin(), active.end(), uint8_t{0});
  std::fill(accumulated.begin(), accumulated.end(), 0.0);
  std::fill(threshold_drawn.begin(), threshold_drawn.end(), uint8_t{0});
  queue.clear();
  for (const uint32_t s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      queue.push_back(s);
    }
  }
  for (size_t head = 0; head < queue.size(); ++head) {
    const uint32_t u = queue[head];
    for (uint64_t j = g.forward_offsets[u]; j < g.forward_offsets[u + 1]; ++j) {
      const uint32_t v = g.forward_targets[j];
      if (active[v]) continue;
      if (!threshold_drawn[v]) {
        threshold_drawn[v] = 1;
        threshold[v] = rng.uniform01();
      }
      accumulated[v] += g.forward_weights[j];
      if (accumulated[v] >= threshold[v]) {
        active[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return static_cast<uint32_t>(queue.size());
}

}  // namespace detail

// Exact expected spread under IC by enumerating all live-edge subsets.
inline SpreadEstimate exact_spread_ic(const Graph& g,
                                      const std::vector<uint32_t>& seeds) {
  if (g.num_edges > kMaxExactIcEdges) {
    throw std::invalid_argument(
        "exact_spread_ic: too many edges for enumeration, use mc_spread");
  }
  const uint32_t n = g.num_vertices;
  const uint64_t m = g.num_edges;

  std::vector<uint32_t> edge_src(m), edge_dst(m);
  std::vector<double> edge_weight(m);
  {
    uint64_t e = 0;
    for (uint32_t u = 0; u < n; ++u) {
      for (uint64_t j = g.forward_offsets[u]; j < g.forward_offsets[u + 1]; ++j, ++e) {
        edge_src[e] = u;
        edge_dst[e] = g.forward_targets[j];
        edge_weight[e] = g.forward_weights[j];
      }
    }
  }

  std::vector<std::vector<uint32_t>> adjacency(n);
  std::vector<uint8_t> visited(n);
  std::vector<uint32_t> queue;
  double expectation = 0.0;
  for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
    double prob = 1.0;
    for (auto& a : adjacency) a.clear();
    for (uint64_t e = 0; e < m; ++e) {
      if ((mask >> e) & 1u) {
        prob *= edge_weight[e];
        adjacency[edge_src[e]].push_back(edge_dst[e]);
      } else {
        prob *= 1.0 - edge_weight[e];
      }
    }
    if (prob == 0.0) continue;
    expectation += prob * detail::count_reachable(adjacency, seeds, visited, queue);
  }
  return {expectation, SpreadMethod::exact_enumeration, 0, 0.0};
}

// Exact expected spread under LT by enumerating per-vertex live-edge choices:
// each vertex keeps one in-edge with probability equal to its weight, or none
// with the residual probability.
inline SpreadEstimate exact_spread_lt(const Graph& g,
                                      const std::vector<uint32_t>& seeds) {
  const uint32_t n = g.num_vertices;
  double outcomes = 1.0;
  for (uint32_t v = 0; v < n; ++v) {
    outcomes *= static_cast<double>(g.in_degree(v) + 1);
    if (outcomes > kMaxExactLtOutcomes) {
      throw std::invalid_argument(
          "exact_spread_lt: outcome space too large for enumeration");
    }
  }

  // digit[v] indexes v's chosen in-edge; in_degree(v) means "none".
  std::vector<uint64_t> digit(n, 0);
  std::vector<std::vector<uint32_t>> adjacency(n);
  std::vector<uint8_t> visited(n);
  std::vector<uint32_t> queue;
  double expectation = 0.0;
  while (true) {
    double prob = 1.0;
    for (auto& a : adjacency) a.clear();
    for (uint32_t v = 0; v < n && prob > 0.0; ++v) {
      const uint64_t deg = g.in_degree(v);
      if (digit[v] < deg) {
        const uint64_t j = g.reverse_offsets[v] + digit[v];
        prob *= g.reverse_weights[j];
        adjacency[g.reverse_sources[j]].push_back(v);
      } else {
        double sum = 0.0;
        for (uint64_t j = g.reverse_offsets[v]; j < g.reverse_offsets[v + 1]; ++j) {
          sum += g.reverse_weights[j];
        }
        prob *= std::max(0.0, 1.0 - sum);
      }
    }
    if (prob > 0.0) {
      expectation += prob * detail::count_reachable(adjacency, seeds, visited, queue);
    }
    // advance the mixed-radix odometer
    uint32_t v = 0;
    for (; v < n; ++v) {
      if (++digit[v] <= g.in_degree(v)) break;
      digit[v] = 0;
    }
    if (v == n) break;
  }
  return {expectation, SpreadMethod::exact_enumeration, 0, 0.0};
}

inline SpreadEstimate exact_spread(const Graph& g, const std::vector<uint32_t>& seeds,
                                   DiffusionModel model) {
  return model == DiffusionModel::IC ? exact_spread_ic(g, seeds)
                                     : exact_spread_lt(g, seeds);
}

// Monte-Carlo forward simulation estimate of the expected spread.
inline SpreadEstimate mc_spread(const Graph& g, const std::vector<uint32_t>& seeds,
                                DiffusionModel model, uint64_t trials,
                                uint64_t rng_seed) {
  if (trials < 1) throw std::invalid_argument("mc_spread: trials must be >= 1");
  const uint32_t n = g.num_vertices;
  Prng rng(derive_stream_seed(rng_seed, 0x0facadeULL));
  std::vector<uint8_t> active(n);
  std::vector<uint32_t> queue;
  std::vector<double> accumulated(n), threshold(n);
  std::vector<uint8_t> threshold_drawn(n);

  double mean = 0.0, m2 = 0.0;
  for (uint64_t t = 1; t <= trials; ++t) {
    const uint32_t activated =
        model == DiffusionModel::IC
            ? detail::simulate_ic(g, seeds, rng, active, queue)
            : detail::simulate_lt(g, seeds, rng, active, queue, accumulated,
                                  threshold, threshold_drawn);
    const double delta = activated - mean;
    mean += delta / static_cast<double>(t);
    m2 += delta * (activated - mean);
  }
  const double std_error =
      trials > 1 ? std::sqrt(m2 / static_cast<double>(trials - 1)) /
                       std::sqrt(static_cast<double>(trials))
                 : 0.0;
  return {mean, SpreadMethod::monte_carlo, trials, std_error};
}

// Fraction of forward simulations in which the target activates.
inline double activation_probability(const Graph& g,
                                     const std::vector<uint32_t>& source_set,
                                     uint32_t target, DiffusionModel model,
                                     uint64_t trials, uint64_t rng_seed) {
  if (trials < 1) throw std::invalid_argument("activation_probability: trials >= 1");
  const uint32_t n = g.num_vertices;
  Prng rng(derive_stream_seed(rng_seed, 0xac71f7ULL));
  std::vector<uint8_t> active(n);
  std::vector<uint32_t> queue;
  std::vector<double> accumulated(n), threshold(n);
  std::vector<uint8_t> threshold_drawn(n);
  uint64_t hits = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    if (model == DiffusionModel::IC) {
      detail::simulate_ic(g, source_set, rng, active, queue);
    } else {
      detail::simulate_lt(g, source_set, rng, active, queue, accumulated, threshold,
                          threshold_drawn);
    }
    if (active[target]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

// Exhaustive search for the exact-spread-maximizing k-subset. Ties go to the
// lexicographically smallest subset.
inline std::pair<std::vector<uint32_t>, double> brute_force_opt(const Graph& g,
                                                                uint32_t k,
                                                                DiffusionModel model) {
  const uint32_t n = g.num_vertices;
  if (k < 1 || k > n) throw std::invalid_argument("brute_force_opt: bad k");
  double combinations = 1.0;
  for (uint32_t j = 0; j < k; ++j) {
    combinations *= static_cast<double>(n - j) / static_cast<double>(j + 1);
    if (combinations > 1e5) {
      throw std::invalid_argument("brute_force_opt: C(n,k) over enumeration guard");
    }
  }

  std::vector<uint32_t> subset(k);
  for (uint32_t j = 0; j < k; ++j) subset[j] = j;
  std::vector<uint32_t> best;
  double best_value = -1.0;
  while (true) {
    const double value = exact_spread(g, subset, model).value;
    if (value > best_value) {
      best_value = value;
      best = subset;
    }
    // next combination in lexicographic order
    int pos = static_cast<int>(k) - 1;
    while (pos >= 0 && subset[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (uint32_t j = pos + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return {best, best_value};
}

}  // namespace rrflow
