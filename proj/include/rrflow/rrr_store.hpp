#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rrflow/rrr_set.hpp"

namespace rrflow {

// Append-only collection of RRR sketches. Each worker appends into its own
// arena; a global index gives stable positions, so no gather step is needed
// after a parallel batch. Liveness flags support tombstoning during seed
// selection: dead sets stay in place and iteration skips them. The live list
// may go stale after decrements; only rebuild_update compacts it.
class RRRStore {
 public:
  RRRStore(uint32_t num_vertices, unsigned workers)
      : num_vertices_(num_vertices), arenas_(workers == 0 ? 1 : workers) {}

  RRRStore(RRRStore&&) = default;
  RRRStore& operator=(RRRStore&&) = default;

  uint32_t num_vertices() const { return num_vertices_; }
  uint64_t size() const { return total_; }
  const RRRSet& set(uint64_t idx) const { return *index_[idx]; }

  // Extends the index by `count` empty slots; returns the first new slot.
  // Single-threaded; the subsequent parallel fill writes disjoint slots.
  uint64_t reserve_slots(uint64_t count) {
    const uint64_t base = index_.size();
    index_.resize(base + count, nullptr);
    live_.resize(base + count, 1);
    return base;
  }

  void place(unsigned worker, uint64_t idx, RRRSet&& r) {
    auto& arena = arenas_[worker];
    arena.push_back(std::move(r));
    index_[idx] = &arena.back();
  }

  // Commits reserved slots after the generating batch has joined. Unfilled
  // slots (partial batch after an allocation failure) are compacted away.
  void finalize() {
    uint64_t keep = total_;
    for (uint64_t j = total_; j < index_.size(); ++j) {
      if (index_[j] != nullptr) index_[keep++] = index_[j];
    }
    index_.resize(keep);
    live_.assign(keep, 1);
    total_ = keep;
    live_list_.resize(keep);
    std::iota(live_list_.begin(), live_list_.end(), uint64_t{0});
    live_count_ = keep;
  }

  // Single-threaded convenience append (tests and small tools).
  uint64_t append(RRRSet&& r) {
    const uint64_t idx = reserve_slots(1);
    place(0, idx, std::move(r));
    finalize();
    return idx;
  }

  bool is_live(uint64_t idx) const { return live_[idx] != 0; }

  // Concurrent and idempotent; several workers may kill the same set.
  void kill(uint64_t idx) {
    std::atomic_ref<uint8_t>(live_[idx]).store(0, std::memory_order_relaxed);
  }

  void revive_all() {
    std::fill(live_.begin(), live_.end(), uint8_t{1});
    live_list_.resize(total_);
    std::iota(live_list_.begin(), live_list_.end(), uint64_t{0});
    live_count_ = total_;
  }

  uint64_t live_count() const { return live_count_; }

  // Called at phase barriers by the selection updates.
  void note_kills(uint64_t killed) {
    if (killed > live_count_) throw std::logic_error("kill count underflow");
    live_count_ -= killed;
  }

  // Possibly-stale list of candidate live indices (may contain tombstones).
  const std::vector<uint64_t>& live_list() const { return live_list_; }

  // Replaces the candidate list with the exact survivor set (compaction).
  void set_live_list(std::vector<uint64_t> survivors) {
    live_list_ = std::move(survivors);
  }

  uint64_t total_member_count() const {
    uint64_t sum = 0;
    for (uint64_t j = 0; j < total_; ++j) sum += set(j).size();
    return sum;
  }

  uint32_t max_set_size() const {
    uint32_t best = 0;
    for (uint64_t j = 0; j < total_; ++j) best = std::max(best, set(j).size());
    return best;
  }

 private:
  uint32_t num_vertices_;
  std::vector<std::deque<RRRSet>> arenas_;
  std::vector<const RRRSet*> index_;
  std::vector<uint8_t> live_;
  std::vector<uint64_t> live_list_;
  uint64_t total_ = 0;
  uint64_t live_count_ = 0;
};

}  // namespace rrflow
