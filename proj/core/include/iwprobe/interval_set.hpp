#pragma once

#include <cstdint>
#include <map>

namespace iwprobe {

// Union of half-open byte ranges [lo, hi). Used for sequence-space
// bookkeeping: which payload bytes have been seen, whether a new range
// overlaps anything already present.
class IntervalSet {
 public:
  void insert(std::uint64_t lo, std::uint64_t hi);

  // True if [lo, hi) shares at least one byte with the set.
  bool intersects(std::uint64_t lo, std::uint64_t hi) const;

  // Total number of bytes covered.
  std::uint64_t coverage() const { return coverage_; }

  // Highest covered byte + 1, or 0 when empty.
  std::uint64_t max_end() const;

  // End of the contiguous run starting at `from` (== `from` if uncovered).
  std::uint64_t contiguous_end(std::uint64_t from) const;

  bool empty() const { return ranges_.empty(); }
  std::size_t range_count() const { return ranges_.size(); }

 private:
  std::map<std::uint64_t, std::uint64_t> ranges_;  // lo -> hi, disjoint
  std::uint64_t coverage_ = 0;
};

}  // namespace iwprobe
