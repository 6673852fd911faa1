#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rrflow {

// Fork-join worker team with dynamically balanced batch scheduling.
//
// Jobs are ranges of item indices. for_batches() deals variable-size batches
// into per-worker queues; an idle worker drains its own queue first, then
// claims leftovers from the other queues. Every batch is executed exactly
// once. Threads are parked between regions, so phases separated by calls into
// the pool see full barriers.
class WorkPool {
 public:
  explicit WorkPool(unsigned workers) : workers_(workers == 0 ? 1u : workers) {
    if (workers_ == 1) return;
    threads_.reserve(workers_ - 1);
    for (unsigned w = 1; w < workers_; ++w) {
      threads_.emplace_back([this, w] { worker_loop(w); });
    }
  }

  WorkPool(const WorkPool&) = delete;
  WorkPool& operator=(const WorkPool&) = delete;

  ~WorkPool() {
    if (workers_ > 1) {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        shutdown_ = true;
      }
      start_cv_.notify_all();
      for (auto& t : threads_) t.join();
    }
  }

  unsigned workers() const { return workers_; }

  // Runs fn(worker_id) on every worker; returns once all workers finished.
  void run(const std::function<void(unsigned)>& fn) {
    if (workers_ == 1) {
      fn(0);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      job_ = &fn;
      done_count_ = 0;
      ++generation_;
    }
    start_cv_.notify_all();
    fn(0);
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [this] { return done_count_ == workers_ - 1; });
    job_ = nullptr;
  }

  // Splits [0, total) into batches and calls fn(worker, begin, end) until the
  // pool drains. Batch size starts at max(1, total / (8 * workers)) and halves
  // toward the tail.
  template <typename Fn>
  void for_batches(uint64_t total, Fn&& fn) {
    if (total == 0) return;
    struct Range {
      uint64_t begin, end;
    };
    std::vector<std::vector<Range>> queues(workers_);
    uint64_t size = std::max<uint64_t>(1, total / (8 * workers_));
    uint64_t pos = 0;
    uint64_t batch_count = 0;
    while (pos < total) {
      const uint64_t remaining = total - pos;
      while (size > 1 && remaining <= workers_ * size) size /= 2;
      const uint64_t len = remaining < size ? remaining : size;
      queues[batch_count % workers_].push_back({pos, pos + len});
      pos += len;
      ++batch_count;
    }
    submitted_.fetch_add(batch_count, std::memory_order_relaxed);

    std::vector<std::atomic<size_t>> cursors(workers_);
    for (auto& c : cursors) c.store(0, std::memory_order_relaxed);

    run([&](unsigned worker) {
      for (unsigned offset = 0; offset < workers_; ++offset) {
        const unsigned q = (worker + offset) % workers_;
        while (true) {
          const size_t i = cursors[q].fetch_add(1, std::memory_order_relaxed);
          if (i >= queues[q].size()) break;
          fn(worker, queues[q][i].begin, queues[q][i].end);
          executed_.fetch_add(1, std::memory_order_relaxed);
        }
      }
    });
  }

  // Exactly one contiguous range per worker (static vertex split).
  template <typename Fn>
  void for_static_ranges(uint64_t total, Fn&& fn) {
    const uint64_t chunk = (total + workers_ - 1) / workers_;
    run([&](unsigned worker) {
      const uint64_t begin = std::min<uint64_t>(total, worker * chunk);
      const uint64_t end = std::min<uint64_t>(total, begin + chunk);
      if (begin < end) fn(worker, begin, end);
    });
  }

  uint64_t batches_submitted() const {
    return submitted_.load(std::memory_order_relaxed);
  }
  uint64_t batches_executed() const {
    return executed_.load(std::memory_order_relaxed);
  }

 private:
  void worker_loop(unsigned id) {
    uint64_t seen_generation = 0;
    while (true) {
      const std::function<void(unsigned)>* job = nullptr;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        start_cv_.wait(lock, [&] {
          return shutdown_ || generation_ != seen_generation;
        });
        if (shutdown_) return;
        seen_generation = generation_;
        job = job_;
      }
      (*job)(id);
      {
        std::lock_guard<std::mutex> lock(mutex_);
        ++done_count_;
      }
      done_cv_.notify_one();
    }
  }

  unsigned workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(unsigned)>* job_ = nullptr;
  uint64_t generation_ = 0;
  unsigned done_count_ = 0;
  bool shutdown_ = false;
  std::atomic<uint64_t> submitted_{0};
  std::atomic<uint64_t> executed_{0};
};

}  // namespace rrflow
