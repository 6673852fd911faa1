#pragma once

#include <atomic>
#include <cstdint>
#include <new>
#include <stdexcept>
#include <vector>

#include "rrflow/counter.hpp"
#include "rrflow/graph.hpp"
#include "rrflow/prng.hpp"
#include "rrflow/rrr_set.hpp"
#include "rrflow/rrr_store.hpp"
#include "rrflow/work_pool.hpp"

namespace rrflow {

// Per-worker scratch for the probabilistic reverse traversals: generator,
// reusable n-bit visited map and visit-order buffer. The visited map is
// cleared selectively through the members just produced, never by a full
// n-bit sweep. Owned by exactly one worker.
class SamplerState {
 public:
  SamplerState(uint32_t n, uint64_t seed)
      : n_(n), rng_(seed), visited_((static_cast<size_t>(n) + 63) / 64, 0) {}

  void reseed(uint64_t seed) { rng_.reseed(seed); }
  Prng& rng() { return rng_; }
  uint32_t num_vertices() const { return n_; }

  bool visited(uint32_t v) const { return (visited_[v >> 6] >> (v & 63)) & 1u; }
  void mark(uint32_t v) { visited_[v >> 6] |= uint64_t{1} << (v & 63); }

  void clear_marks(const std::vector<uint32_t>& members) {
    for (const uint32_t v : members) {
      visited_[v >> 6] &= ~(uint64_t{1} << (v & 63));
    }
  }

  // Debug-mode hygiene scan: true iff no bit is set.
  bool visited_all_clear() const {
    for (const uint64_t w : visited_) {
      if (w != 0) return false;
    }
    return true;
  }

  std::vector<uint32_t>& visit_buffer() { return visit_order_; }
  const std::vector<uint64_t>& visited_words() const { return visited_; }

 private:
  uint32_t n_;
  Prng rng_;
  std::vector<uint64_t> visited_;
  std::vector<uint32_t> visit_order_;
};

// Uniform root in [0, n).
inline uint32_t sample_root(SamplerState& state, uint32_t n) {
  return static_cast<uint32_t>(state.rng().uniform_below(n));
}

namespace detail {

// Packs the freshly traversed members into a sketch before the visited map is
// cleared. Dense sketches snapshot the visited words directly, which avoids a
// per-member pass; the result is identical to make_repr on the visit order.
inline RRRSet pack_sketch(const SamplerState& state,
                          const std::vector<uint32_t>& order, uint32_t n,
                          uint32_t density_divisor) {
  const auto count = static_cast<uint32_t>(order.size());
  const bool dense =
      static_cast<double>(count) >= static_cast<double>(n) / density_divisor;
  if (!dense) {
    return make_repr(std::vector<uint32_t>(order.begin(), order.end()), n,
                     density_divisor);
  }
  RRRSet r;
  r.root = order.front();
  r.member_count = count;
  r.repr = RRRSet::Repr::kBitmap;
  r.bits = state.visited_words();
  return r;
}

}  // namespace detail

// Reverse probabilistic BFS under IC semantics: each in-edge (v -> u) of a
// dequeued u is flipped once, with success probability equal to its weight.
inline RRRSet generate_rrr_ic(const Graph& g, uint32_t root, SamplerState& state,
                              uint32_t density_divisor = kDefaultDensityDivisor) {
  auto& order = state.visit_buffer();
  order.clear();
  order.push_back(root);
  state.mark(root);
  for (size_t head = 0; head < order.size(); ++head) {
    const uint32_t u = order[head];
    const uint64_t begin = g.reverse_offsets[u];
    const uint64_t end = g.reverse_offsets[u + 1];
    for (uint64_t j = begin; j < end; ++j) {
      const uint32_t v = g.reverse_sources[j];
      if (!state.visited(v) && state.rng().bernoulli(g.reverse_weights[j])) {
        state.mark(v);
        order.push_back(v);
      }
    }
  }
  RRRSet r = detail::pack_sketch(state, order, g.num_vertices, density_divisor);
  state.clear_marks(order);
  return r;
}

// Reverse random walk under LT live-edge semantics: from the current vertex
// pick at most one in-neighbor, with probability equal to the edge weight
// (no edge with the residual probability); stop on a dead end or when the
// chosen vertex was already visited.
inline RRRSet generate_rrr_lt(const Graph& g, uint32_t root, SamplerState& state,
                              uint32_t density_divisor = kDefaultDensityDivisor) {
  auto& order = state.visit_buffer();
  order.clear();
  order.push_back(root);
  state.mark(root);
  uint32_t u = root;
  while (true) {
    const uint64_t begin = g.reverse_offsets[u];
    const uint64_t end = g.reverse_offsets[u + 1];
    const double draw = state.rng().uniform01();
    double acc = 0.0;
    uint32_t chosen = g.num_vertices;
    for (uint64_t j = begin; j < end; ++j) {
      acc += g.reverse_weights[j];
      if (draw < acc) {
        chosen = g.reverse_sources[j];
        break;
      }
    }
    if (chosen == g.num_vertices || state.visited(chosen)) break;
    state.mark(chosen);
    order.push_back(chosen);
    u = chosen;
  }
  RRRSet r = detail::pack_sketch(state, order, g.num_vertices, density_divisor);
  state.clear_marks(order);
  return r;
}

// Allocation failure during a batch; carries how many sets made it in.
struct BatchOutOfMemory : std::runtime_error {
  explicit BatchOutOfMemory(uint64_t generated)
      : std::runtime_error("out of memory after generating " +
                           std::to_string(generated) + " RRR sets"),
        sets_generated(generated) {}
  uint64_t sets_generated;
};

// Generates `count` sketches into the store. When `counter` is non-null the
// kernel is fused: each member's tally is bumped right after its set is
// built, by the generating worker, so no gather pass is needed later.
inline void generate_batch(const Graph& g, DiffusionModel model, uint64_t run_seed,
                           uint64_t count, WorkPool& pool, RRRStore& store,
                           Counter* counter,
                           uint32_t density_divisor = kDefaultDensityDivisor) {
  const uint64_t base = store.reserve_slots(count);
  const uint32_t n = g.num_vertices;
  if (n == 0) throw std::invalid_argument("generate_batch: empty graph");

  std::vector<SamplerState> states;
  states.reserve(pool.workers());
  for (unsigned w = 0; w < pool.workers(); ++w) states.emplace_back(n, 0);

  std::atomic<uint64_t> generated{0};
  std::atomic<bool> out_of_memory{false};

  pool.for_batches(count, [&](unsigned worker, uint64_t b, uint64_t e) {
    auto& state = states[worker];
    try {
      for (uint64_t i = b; i < e; ++i) {
        const uint64_t slot = base + i;
        state.reseed(derive_stream_seed(run_seed, slot));
        const uint32_t root = sample_root(state, n);
        RRRSet r = model == DiffusionModel::IC
                       ? generate_rrr_ic(g, root, state, density_divisor)
                       : generate_rrr_lt(g, root, state, density_divisor);
        if (counter != nullptr) {
          r.for_each_member([&](uint32_t v) { counter->add(v); });
        }
        store.place(worker, slot, std::move(r));
        generated.fetch_add(1, std::memory_order_relaxed);
      }
    } catch (const std::bad_alloc&) {
      out_of_memory.store(true, std::memory_order_relaxed);
    }
  });

  store.finalize();
  if (out_of_memory.load()) {
    throw BatchOutOfMemory(generated.load());
  }
}

inline void generate_batch_fused(const Graph& g, DiffusionModel model,
                                 uint64_t run_seed, uint64_t count, Counter& counter,
                                 WorkPool& pool, RRRStore& store,
                                 uint32_t density_divisor = kDefaultDensityDivisor) {
  generate_batch(g, model, run_seed, count, pool, store, &counter, density_divisor);
}

}  // namespace rrflow
