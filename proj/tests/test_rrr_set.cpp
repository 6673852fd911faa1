#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "rrflow/rrr_set.hpp"

using namespace rrflow;

TEST_CASE("make_repr picks the sorted list below the density threshold") {
  std::vector<uint32_t> members{9, 3, 100, 7, 50};
  const RRRSet r = make_repr(members, 640);
  REQUIRE(r.repr == RRRSet::Repr::kSortedList);
  REQUIRE(r.root == 9);
  REQUIRE(r.size() == 5);
  REQUIRE(std::is_sorted(r.members.begin(), r.members.end()));
  REQUIRE(r.contains(9));
  REQUIRE(r.contains(100));
  REQUIRE_FALSE(r.contains(10));
}

TEST_CASE("make_repr picks the bitmap at or above the density threshold") {
  std::vector<uint32_t> members;
  for (uint32_t v = 0; v < 200; ++v) members.push_back(v * 3);
  const RRRSet r = make_repr(members, 640);
  REQUIRE(r.repr == RRRSet::Repr::kBitmap);
  REQUIRE(r.root == 0);
  REQUIRE(r.size() == 200);
  REQUIRE(r.contains(0));
  REQUIRE(r.contains(597));
  REQUIRE_FALSE(r.contains(598));
}

TEST_CASE("singleton membership") {
  const RRRSet r = make_repr({41}, 100);
  REQUIRE(r.contains(41));
  REQUIRE_FALSE(r.contains(42));
}

TEST_CASE("representations agree on contains and size") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const uint32_t n = 2 + static_cast<uint32_t>(gen() % 2000);
    std::set<uint32_t> chosen;
    // strictly below n so that divisor 1 really forces the sorted list
    const uint32_t target = 1 + static_cast<uint32_t>(gen() % (n - 1));
    while (chosen.size() < target) chosen.insert(static_cast<uint32_t>(gen() % n));
    std::vector<uint32_t> members(chosen.begin(), chosen.end());
    std::shuffle(members.begin(), members.end(), gen);

    // force each representation regardless of density
    const RRRSet as_list = make_repr(members, n, 1);
    const RRRSet as_bitmap = make_repr(members, n, 0xffffffffu);
    REQUIRE(as_list.repr == RRRSet::Repr::kSortedList);
    REQUIRE(as_bitmap.repr == RRRSet::Repr::kBitmap);
    REQUIRE(as_list.size() == as_bitmap.size());
    REQUIRE(as_list.size() == members.size());
    for (int q = 0; q < 100; ++q) {
      const uint32_t v = static_cast<uint32_t>(gen() % n);
      const bool expected = chosen.count(v) > 0;
      REQUIRE(as_list.contains(v) == expected);
      REQUIRE(as_bitmap.contains(v) == expected);
      uint64_t touches = 0;
      REQUIRE(as_list.contains_counted(v, touches) == expected);
      REQUIRE(as_bitmap.contains_counted(v, touches) == expected);
    }

    // iteration visits exactly the members, each once
    std::vector<uint32_t> from_list, from_bitmap;
    as_list.for_each_member([&](uint32_t v) { from_list.push_back(v); });
    as_bitmap.for_each_member([&](uint32_t v) { from_bitmap.push_back(v); });
    std::sort(from_list.begin(), from_list.end());
    REQUIRE(from_list == std::vector<uint32_t>(chosen.begin(), chosen.end()));
    REQUIRE(from_bitmap == std::vector<uint32_t>(chosen.begin(), chosen.end()));
  }
}

TEST_CASE("default threshold boundary sits at n/64") {
  const uint32_t n = 640;  // threshold = 10
  std::vector<uint32_t> nine{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<uint32_t> ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  REQUIRE(make_repr(nine, n).repr == RRRSet::Repr::kSortedList);
  REQUIRE(make_repr(ten, n).repr == RRRSet::Repr::kBitmap);
}
