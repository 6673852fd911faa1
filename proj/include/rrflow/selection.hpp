#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "rrflow/counter.hpp"
#include "rrflow/rrr_store.hpp"
#include "rrflow/work_pool.hpp"

namespace rrflow {

// Seeds in selection order with the number of newly covered sets per pick.
struct SeedSet {
  std::vector<uint32_t> seeds;
  std::vector<uint64_t> marginal_counts;
};

// Per-worker cache-line-padded tally of element touches (member visits,
// counter updates, probe steps). A desk-scale stand-in for the hardware
// cache-miss comparison.
class TouchTally {
 public:
  explicit TouchTally(unsigned workers) : slots_(workers) {}
  void bump(unsigned worker, uint64_t count) { slots_[worker].value += count; }
  uint64_t total() const {
    uint64_t sum = 0;
    for (const auto& s : slots_) sum += s.value;
    return sum;
  }

 private:
  struct alignas(64) Slot {
    uint64_t value = 0;
  };
  std::vector<Slot> slots_;
};

// Optional instrumentation for the selection strategies.
struct SelectionStats {
  uint64_t touches = 0;
  bool capture_round_counters = false;
  std::vector<std::vector<uint64_t>> round_counters;
};

namespace detail {

inline std::vector<uint64_t> counter_snapshot(const Counter& c) {
  std::vector<uint64_t> snap(c.size());
  for (uint32_t v = 0; v < c.size(); ++v) snap[v] = c.get(v);
  return snap;
}

// Greedy exhaustion: all remaining counts are zero, so the contract fills the
// tail with the lowest unselected ids at zero marginal gain.
inline void fill_remaining_seeds(SeedSet& out, uint32_t n, uint32_t k,
                                 std::vector<uint8_t>& selected) {
  uint32_t v = 0;
  while (out.seeds.size() < k && v < n) {
    if (!selected[v]) {
      selected[v] = 1;
      out.seeds.push_back(v);
      out.marginal_counts.push_back(0);
    }
    ++v;
  }
}

}  // namespace detail

// Exact per-vertex tally over the live sets. Sets are partitioned across
// workers; each worker touches only the sets it claims and broadcasts
// atomic increments into the shared counter.
inline Counter build_counter(const RRRStore& store, uint32_t n, WorkPool& pool,
                             TouchTally* tally = nullptr) {
  Counter counter(n);
  pool.for_batches(store.size(), [&](unsigned worker, uint64_t b, uint64_t e) {
    uint64_t touches = 0;
    for (uint64_t idx = b; idx < e; ++idx) {
      ++touches;
      if (!store.is_live(idx)) continue;
      store.set(idx).for_each_member([&](uint32_t v) {
        counter.add(v);
        touches += 2;
      });
    }
    if (tally != nullptr) tally->bump(worker, touches);
  });
  return counter;
}

// Two-level reduction: each claimed vertex range yields its regional best,
// regional bests merge into the global one. Ties break toward the lowest
// vertex id at both levels, so the result is independent of the partition.
inline uint32_t parallel_argmax(const Counter& counter, WorkPool& pool,
                                TouchTally* tally = nullptr) {
  if (counter.size() == 0) throw std::invalid_argument("argmax over empty counter");
  struct Best {
    uint64_t count = 0;
    uint32_t vertex = std::numeric_limits<uint32_t>::max();
  };
  Best global;
  std::mutex merge_mutex;
  pool.for_batches(counter.size(), [&](unsigned worker, uint64_t b, uint64_t e) {
    Best regional;
    for (uint64_t v = b; v < e; ++v) {
      const uint64_t c = counter.get(v);
      if (c > regional.count || (c == regional.count && v < regional.vertex)) {
        regional = {c, static_cast<uint32_t>(v)};
      }
    }
    if (tally != nullptr) tally->bump(worker, e - b);
    std::lock_guard<std::mutex> lock(merge_mutex);
    if (regional.count > global.count ||
        (regional.count == global.count && regional.vertex < global.vertex)) {
      global = regional;
    }
  });
  return global.vertex;
}

// Kills every live set containing v and decrements each member of those sets
// once. Returns the number of sets killed. Iterates the candidate live list,
// skipping tombstones from earlier rounds.
inline uint64_t decrement_update(Counter& counter, RRRStore& store, uint32_t v,
                                 WorkPool& pool, TouchTally* tally = nullptr) {
  const auto& candidates = store.live_list();
  std::atomic<uint64_t> killed{0};
  pool.for_batches(candidates.size(), [&](unsigned worker, uint64_t b, uint64_t e) {
    uint64_t touches = 0;
    uint64_t local_killed = 0;
    for (uint64_t i = b; i < e; ++i) {
      const uint64_t idx = candidates[i];
      ++touches;
      if (!store.is_live(idx)) continue;
      const RRRSet& r = store.set(idx);
      if (!r.contains_counted(v, touches)) continue;
      store.kill(idx);
      ++local_killed;
      r.for_each_member([&](uint32_t u) {
        counter.sub(u);
        touches += 2;
      });
    }
    killed.fetch_add(local_killed, std::memory_order_relaxed);
    if (tally != nullptr) tally->bump(worker, touches);
  });
  const uint64_t total_killed = killed.load();
  store.note_kills(total_killed);
  return total_killed;
}

// Same observable effect as decrement_update, reached by zeroing the counter
// and re-accumulating only the surviving sets. Pays off when the selected
// seed covers a large fraction of the live sets. Also compacts the live list.
inline uint64_t rebuild_update(Counter& counter, RRRStore& store, uint32_t v,
                               WorkPool& pool, TouchTally* tally = nullptr) {
  const auto& candidates = store.live_list();
  std::atomic<uint64_t> killed{0};
  pool.for_batches(candidates.size(), [&](unsigned worker, uint64_t b, uint64_t e) {
    uint64_t touches = 0;
    uint64_t local_killed = 0;
    for (uint64_t i = b; i < e; ++i) {
      const uint64_t idx = candidates[i];
      ++touches;
      if (!store.is_live(idx)) continue;
      if (store.set(idx).contains_counted(v, touches)) {
        store.kill(idx);
        ++local_killed;
      }
    }
    killed.fetch_add(local_killed, std::memory_order_relaxed);
    if (tally != nullptr) tally->bump(worker, touches);
  });
  const uint64_t total_killed = killed.load();
  store.note_kills(total_killed);

  std::vector<uint64_t> survivors;
  survivors.reserve(store.live_count());
  for (const uint64_t idx : candidates) {
    if (store.is_live(idx)) survivors.push_back(idx);
  }
  store.set_live_list(std::move(survivors));

  counter.zero(pool);
  const auto& live = store.live_list();
  pool.for_batches(live.size(), [&](unsigned worker, uint64_t b, uint64_t e) {
    uint64_t touches = 0;
    for (uint64_t i = b; i < e; ++i) {
      store.set(live[i]).for_each_member([&](uint32_t u) {
        counter.add(u);
        touches += 2;
      });
    }
    if (tally != nullptr) tally->bump(worker, touches);
  });
  return total_killed;
}

// Greedy max-coverage over the sketches: k rounds of parallel argmax plus a
// counter update. Each round rebuilds instead of decrementing when the picked
// seed's live coverage ratio exceeds adaptive_threshold. A prebuilt counter
// (e.g. accumulated by fused generation) is cloned instead of recounted.
inline SeedSet select_seeds(RRRStore& store, uint32_t n, uint32_t k, WorkPool& pool,
                            double adaptive_threshold = 0.25,
                            const Counter* prebuilt = nullptr,
                            SelectionStats* stats = nullptr) {
  if (k < 1) throw std::invalid_argument("select_seeds: k must be >= 1");
  if (k > n) throw std::invalid_argument("select_seeds: k exceeds vertex count");
  store.revive_all();
  TouchTally tally(pool.workers());
  Counter counter = prebuilt != nullptr ? prebuilt->clone()
                                        : build_counter(store, n, pool, &tally);
  SeedSet out;
  std::vector<uint8_t> selected(n, 0);
  for (uint32_t round = 0; round < k; ++round) {
    const uint32_t v = parallel_argmax(counter, pool, &tally);
    const uint64_t top_count = counter.get(v);
    if (top_count == 0) {
      detail::fill_remaining_seeds(out, n, k, selected);
      break;
    }
    const uint64_t live = store.live_count();
    const bool rebuild =
        live > 0 && static_cast<double>(top_count) / static_cast<double>(live) >
                        adaptive_threshold;
    const uint64_t covered = rebuild ? rebuild_update(counter, store, v, pool, &tally)
                                     : decrement_update(counter, store, v, pool, &tally);
    selected[v] = 1;
    out.seeds.push_back(v);
    out.marginal_counts.push_back(covered);
    if (stats != nullptr && stats->capture_round_counters) {
      stats->round_counters.push_back(detail::counter_snapshot(counter));
    }
  }
  if (stats != nullptr) stats->touches = tally.total();
  return out;
}

// Reference strategy shaped like the original vertex-partitioned greedy:
// every worker owns a static contiguous vertex range and traverses all the
// sets, probing membership per (vertex, set) pair with the set's native
// search. Returns the same SeedSet as select_seeds (identical tie rule); its
// touch count exhibits the per-thread set-traversal inflation.
inline SeedSet baseline_select(RRRStore& store, uint32_t n, uint32_t k, WorkPool& pool,
                               SelectionStats* stats = nullptr) {
  if (k < 1) throw std::invalid_argument("baseline_select: k must be >= 1");
  if (k > n) throw std::invalid_argument("baseline_select: k exceeds vertex count");
  store.revive_all();
  TouchTally tally(pool.workers());
  Counter counter(n);

  pool.for_static_ranges(n, [&](unsigned worker, uint64_t v_lo, uint64_t v_hi) {
    uint64_t touches = 0;
    for (uint64_t idx = 0; idx < store.size(); ++idx) {
      const RRRSet& r = store.set(idx);
      for (uint64_t v = v_lo; v < v_hi; ++v) {
        if (r.contains_counted(static_cast<uint32_t>(v), touches)) {
          counter.add(static_cast<uint32_t>(v));
          ++touches;
        }
      }
    }
    tally.bump(worker, touches);
  });

  SeedSet out;
  std::vector<uint8_t> selected(n, 0);
  // Kills are deferred to a post-pass sweep: liveness must stay stable while
  // every worker walks every set, or a range's decrements could be skipped.
  std::vector<uint8_t> to_kill(store.size(), 0);
  for (uint32_t round = 0; round < k; ++round) {
    const uint32_t v = parallel_argmax(counter, pool, &tally);
    if (counter.get(v) == 0) {
      detail::fill_remaining_seeds(out, n, k, selected);
      break;
    }
    pool.for_static_ranges(n, [&](unsigned worker, uint64_t v_lo, uint64_t v_hi) {
      uint64_t touches = 0;
      for (uint64_t idx = 0; idx < store.size(); ++idx) {
        ++touches;
        if (!store.is_live(idx)) continue;
        const RRRSet& r = store.set(idx);
        // Every worker probes every live set for the selected seed.
        if (!r.contains_counted(v, touches)) continue;
        // The root's owner flags the kill; each member's owner decrements it.
        if (r.root >= v_lo && r.root < v_hi) to_kill[idx] = 1;
        if (r.repr == RRRSet::Repr::kSortedList) {
          auto it = std::lower_bound(r.members.begin(), r.members.end(),
                                     static_cast<uint32_t>(v_lo));
          touches += 1;
          for (; it != r.members.end() && *it < v_hi; ++it) {
            counter.sub(*it);
            touches += 2;
          }
        } else {
          for (uint64_t w = v_lo >> 6; w <= ((v_hi - 1) >> 6); ++w) {
            uint64_t word = r.bits[w];
            ++touches;
            while (word != 0) {
              const uint32_t u = static_cast<uint32_t>(w * 64 +
                                                       std::countr_zero(word));
              word &= word - 1;
              if (u >= v_lo && u < v_hi) {
                counter.sub(u);
                touches += 2;
              }
            }
          }
        }
      }
      tally.bump(worker, touches);
    });
    uint64_t covered = 0;
    for (uint64_t idx = 0; idx < store.size(); ++idx) {
      if (to_kill[idx]) {
        store.kill(idx);
        to_kill[idx] = 0;
        ++covered;
      }
    }
    store.note_kills(covered);
    selected[v] = 1;
    out.seeds.push_back(v);
    out.marginal_counts.push_back(covered);
    if (stats != nullptr && stats->capture_round_counters) {
      stats->round_counters.push_back(detail::counter_snapshot(counter));
    }
  }
  if (stats != nullptr) stats->touches = tally.total();
  return out;
}

// Fraction of all stored sets intersecting the seed set, dead or alive.
inline double fraction_covered(const RRRStore& store,
                               const std::vector<uint32_t>& seeds) {
  if (store.size() == 0) return 0.0;
  uint64_t covered = 0;
  for (uint64_t idx = 0; idx < store.size(); ++idx) {
    const RRRSet& r = store.set(idx);
    for (const uint32_t s : seeds) {
      if (r.contains(s)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(store.size());
}

inline double fraction_covered(const RRRStore& store, const SeedSet& seeds) {
  return fraction_covered(store, seeds.seeds);
}

}  // namespace rrflow
