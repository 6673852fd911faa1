#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <vector>

#include "rrflow/work_pool.hpp"

using rrflow::WorkPool;

TEST_CASE("every index is executed exactly once") {
  for (const unsigned workers : {1u, 2u, 3u, 8u}) {
    for (const uint64_t total : {0ull, 1ull, 7ull, 64ull, 1000ull, 4097ull}) {
      WorkPool pool(workers);
      std::vector<std::atomic<uint32_t>> hits(total);
      for (auto& h : hits) h.store(0);
      pool.for_batches(total, [&](unsigned, uint64_t b, uint64_t e) {
        for (uint64_t i = b; i < e; ++i) hits[i].fetch_add(1);
      });
      for (uint64_t i = 0; i < total; ++i) {
        INFO("workers=" << workers << " total=" << total << " i=" << i);
        REQUIRE(hits[i].load() == 1);
      }
    }
  }
}

TEST_CASE("pool drains: executed batches equal submitted batches") {
  WorkPool pool(4);
  pool.for_batches(10000, [](unsigned, uint64_t, uint64_t) {});
  pool.for_batches(3, [](unsigned, uint64_t, uint64_t) {});
  REQUIRE(pool.batches_submitted() == pool.batches_executed());
  REQUIRE(pool.batches_submitted() > 0);
}

TEST_CASE("static ranges partition the domain into one range per worker") {
  WorkPool pool(4);
  std::vector<std::atomic<uint32_t>> hits(103);
  for (auto& h : hits) h.store(0);
  std::atomic<unsigned> ranges{0};
  pool.for_static_ranges(103, [&](unsigned, uint64_t b, uint64_t e) {
    ranges.fetch_add(1);
    for (uint64_t i = b; i < e; ++i) hits[i].fetch_add(1);
  });
  REQUIRE(ranges.load() == 4);
  for (auto& h : hits) REQUIRE(h.load() == 1);
}

TEST_CASE("run executes on all workers") {
  WorkPool pool(5);
  std::vector<std::atomic<uint32_t>> seen(5);
  for (auto& s : seen) s.store(0);
  pool.run([&](unsigned w) { seen[w].fetch_add(1); });
  for (auto& s : seen) REQUIRE(s.load() == 1);
}

TEST_CASE("sequential regions keep worker ids stable") {
  WorkPool pool(3);
  std::atomic<uint64_t> sum{0};
  for (int round = 0; round < 50; ++round) {
    pool.for_batches(100, [&](unsigned, uint64_t b, uint64_t e) {
      for (uint64_t i = b; i < e; ++i) sum.fetch_add(i);
    });
  }
  REQUIRE(sum.load() == 50ull * (99 * 100 / 2));
}
