#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

#include "rrflow/work_pool.hpp"

namespace rrflow {

// Per-vertex occurrence tallies. Entries are 64-bit so a single lock-prefixed
// quadword add covers every update and overflow is out of reach at any
// realistic sketch count. Relaxed ordering is sufficient: phases touching the
// counter are separated by pool barriers.
class Counter {
 public:
  explicit Counter(uint32_t n)
      : n_(n), counts_(std::make_unique<std::atomic<uint64_t>[]>(n)) {
    zero();
  }

  Counter(Counter&&) = default;
  Counter& operator=(Counter&&) = default;

  uint32_t size() const { return n_; }

  void add(uint32_t v) { counts_[v].fetch_add(1, std::memory_order_relaxed); }
  void sub(uint32_t v) { counts_[v].fetch_sub(1, std::memory_order_relaxed); }
  uint64_t get(uint32_t v) const { return counts_[v].load(std::memory_order_relaxed); }

  void zero() {
    for (uint32_t v = 0; v < n_; ++v) counts_[v].store(0, std::memory_order_relaxed);
  }

  void zero(WorkPool& pool) {
    pool.for_batches(n_, [this](unsigned, uint64_t b, uint64_t e) {
      for (uint64_t v = b; v < e; ++v) {
        counts_[v].store(0, std::memory_order_relaxed);
      }
    });
  }

  Counter clone() const {
    Counter c(n_);
    for (uint32_t v = 0; v < n_; ++v) {
      c.counts_[v].store(get(v), std::memory_order_relaxed);
    }
    return c;
  }

  bool operator==(const Counter& other) const {
    if (n_ != other.n_) return false;
    for (uint32_t v = 0; v < n_; ++v) {
      if (get(v) != other.get(v)) return false;
    }
    return true;
  }

 private:
  uint32_t n_;
  std::unique_ptr<std::atomic<uint64_t>[]> counts_;
};

}  // namespace rrflow
