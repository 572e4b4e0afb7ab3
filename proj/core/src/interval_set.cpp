#include "iwprobe/interval_set.hpp"

#include <algorithm>

namespace iwprobe {

void IntervalSet::insert(std::uint64_t lo, std::uint64_t hi) {
  if (lo >= hi) return;
  // Find the first range that could touch [lo, hi) and swallow every
  // overlapping or adjacent neighbour.
  auto it = ranges_.upper_bound(lo);
  if (it != ranges_.begin()) {
    auto prev = std::prev(it);
    if (prev->second >= lo) it = prev;
  }
  while (it != ranges_.end() && it->first <= hi) {
    lo = std::min(lo, it->first);
    hi = std::max(hi, it->second);
    coverage_ -= it->second - it->first;
    it = ranges_.erase(it);
  }
  ranges_.emplace(lo, hi);
  coverage_ += hi - lo;
}

bool IntervalSet::intersects(std::uint64_t lo, std::uint64_t hi) const {
  if (lo >= hi || ranges_.empty()) return false;
  auto it = ranges_.upper_bound(lo);
  if (it != ranges_.begin()) {
    auto prev = std::prev(it);
    if (prev->second > lo) return true;
  }
  return it != ranges_.end() && it->first < hi;
}

std::uint64_t IntervalSet::max_end() const {
  return ranges_.empty() ? 0 : ranges_.rbegin()->second;
}

std::uint64_t IntervalSet::contiguous_end(std::uint64_t from) const {
  auto it = ranges_.upper_bound(from);
  if (it == ranges_.begin()) return from;
  auto prev = std::prev(it);
  return prev->second > from ? prev->second : from;
}

}  // namespace iwprobe
