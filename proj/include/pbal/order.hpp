#pragma once

#include <vector>

#include "pbal/integer_partition.hpp"

namespace pbal {

enum class Order { Less, Greater, Equal, Incomparable };

const char* to_string(Order o);

// Reverse dominance order on integer partitions of the same n into the same
// number of parts. Less means a is dominated (b is the more balanced shape).
// Throws std::invalid_argument when n or k differ.
Order dominance_compare(const IntegerPartition& a, const IntegerPartition& b);

// All distinct shapes reachable from `a` by one one-step downshift
// (move one unit from a larger part to a smaller part, keeping validity).
std::vector<IntegerPartition> one_step_downshifts(const IntegerPartition& a);

// Covering relation of the reverse dominance order; `b covers a` holds when
// b is one unit-move above a with no shape strictly between. `star` flags the
// adjacent-position case, `starstar` the equal-resulting-parts case (with the
// common part size in `s`); both can hold at once.
struct CoverResult {
  bool covers = false;
  bool star = false;
  bool starstar = false;
  int s = 0;  // meaningful when starstar
};

enum class CoverCase { Star, StarStar, Both };

CoverResult covers(const IntegerPartition& a, const IntegerPartition& b);

// Literal case tag; requires result.covers.
CoverCase cover_case(const CoverResult& r);

}  // namespace pbal
