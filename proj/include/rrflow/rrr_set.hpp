#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace rrflow {

// Representation switch point: a sketch becomes a bitmap once its member
// count reaches n / divisor, i.e. once the n-bit bitmap is within 2x of the
// 32-bit id list in memory.
inline constexpr uint32_t kDefaultDensityDivisor = 64;

// One random reverse-reachable sketch. Sparse sketches store a sorted vertex
// list (O(log s) search); dense ones an n-bit bitmap (O(1) search).
struct RRRSet {
  enum class Repr : uint8_t { kSortedList, kBitmap };

  uint32_t root = 0;
  uint32_t member_count = 0;
  Repr repr = Repr::kSortedList;
  std::vector<uint32_t> members;  // ascending, unique (kSortedList only)
  std::vector<uint64_t> bits;     // ceil(n/64) words (kBitmap only)

  uint32_t size() const { return member_count; }

  bool contains(uint32_t v) const {
    if (repr == Repr::kBitmap) return (bits[v >> 6] >> (v & 63)) & 1u;
    return std::binary_search(members.begin(), members.end(), v);
  }

  // Same probe, but reports the elements inspected (instrumented selection).
  bool contains_counted(uint32_t v, uint64_t& touches) const {
    if (repr == Repr::kBitmap) {
      ++touches;
      return (bits[v >> 6] >> (v & 63)) & 1u;
    }
    size_t lo = 0, hi = members.size();
    while (lo < hi) {
      const size_t mid = lo + (hi - lo) / 2;
      ++touches;
      if (members[mid] < v) {
        lo = mid + 1;
      } else if (members[mid] > v) {
        hi = mid;
      } else {
        return true;
      }
    }
    return false;
  }

  template <typename Fn>
  void for_each_member(Fn&& fn) const {
    if (repr == Repr::kSortedList) {
      for (const uint32_t v : members) fn(v);
      return;
    }
    for (size_t w = 0; w < bits.size(); ++w) {
      uint64_t word = bits[w];
      while (word != 0) {
        const int b = std::countr_zero(word);
        fn(static_cast<uint32_t>(w * 64 + b));
        word &= word - 1;
      }
    }
  }
};

// Packs a member list (first element is the sketch root, no duplicates) into
// the denser of the two representations.
inline RRRSet make_repr(std::vector<uint32_t> members, uint32_t n,
                        uint32_t density_divisor = kDefaultDensityDivisor) {
  RRRSet r;
  r.root = members.front();
  r.member_count = static_cast<uint32_t>(members.size());
  const bool dense =
      static_cast<double>(r.member_count) >= static_cast<double>(n) / density_divisor;
  if (dense) {
    r.repr = RRRSet::Repr::kBitmap;
    r.bits.assign((static_cast<size_t>(n) + 63) / 64, 0);
    for (const uint32_t v : members) r.bits[v >> 6] |= uint64_t{1} << (v & 63);
  } else {
    r.repr = RRRSet::Repr::kSortedList;
    std::sort(members.begin(), members.end());
    r.members = std::move(members);
  }
  return r;
}

}  // namespace rrflow
