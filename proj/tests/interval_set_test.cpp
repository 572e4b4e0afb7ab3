#include "iwprobe/interval_set.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace {

using iwprobe::IntervalSet;

// Byte-level reference: a plain set of covered offsets.
class ByteSetOracle {
 public:
  void insert(std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t b = lo; b < hi; ++b) bytes_.insert(b);
  }
  bool intersects(std::uint64_t lo, std::uint64_t hi) const {
    for (std::uint64_t b = lo; b < hi; ++b)
      if (bytes_.count(b)) return true;
    return false;
  }
  std::uint64_t coverage() const { return bytes_.size(); }
  std::uint64_t max_end() const {
    return bytes_.empty() ? 0 : *bytes_.rbegin() + 1;
  }
  std::uint64_t contiguous_end(std::uint64_t from) const {
    std::uint64_t end = from;
    while (bytes_.count(end)) ++end;
    return end;
  }

 private:
  std::set<std::uint64_t> bytes_;
};

TEST(IntervalSet, BasicMergeAndQueries) {
  IntervalSet s;
  s.insert(0, 10);
  s.insert(20, 30);
  EXPECT_EQ(s.coverage(), 20u);
  EXPECT_EQ(s.range_count(), 2u);
  EXPECT_TRUE(s.intersects(5, 6));
  EXPECT_FALSE(s.intersects(10, 20));
  EXPECT_EQ(s.max_end(), 30u);
  EXPECT_EQ(s.contiguous_end(0), 10u);

  s.insert(10, 20);  // bridges the gap
  EXPECT_EQ(s.range_count(), 1u);
  EXPECT_EQ(s.coverage(), 30u);
  EXPECT_EQ(s.contiguous_end(0), 30u);
}

TEST(IntervalSet, EmptyAndDegenerate) {
  IntervalSet s;
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.max_end(), 0u);
  EXPECT_FALSE(s.intersects(0, 100));
  s.insert(5, 5);  // empty range is a no-op
  EXPECT_TRUE(s.empty());
}

TEST(IntervalSet, MatchesByteOracleOnRandomRanges) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    IntervalSet s;
    ByteSetOracle oracle;
    std::uniform_int_distribution<std::uint64_t> lo_dist(0, 400);
    std::uniform_int_distribution<std::uint64_t> len_dist(0, 60);
    for (int i = 0; i < 30; ++i) {
      const std::uint64_t lo = lo_dist(rng);
      const std::uint64_t hi = lo + len_dist(rng);
      ASSERT_EQ(s.intersects(lo, hi), oracle.intersects(lo, hi))
          << "round " << round << " insert " << i;
      s.insert(lo, hi);
      oracle.insert(lo, hi);
      ASSERT_EQ(s.coverage(), oracle.coverage());
      ASSERT_EQ(s.max_end(), oracle.max_end());
      ASSERT_EQ(s.contiguous_end(0), oracle.contiguous_end(0));
    }
  }
}

}  // namespace
