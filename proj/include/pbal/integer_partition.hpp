#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pbal {

using BigInt = boost::multiprecision::cpp_int;

// A nonincreasing tuple of positive integers (cluster sizes). Immutable
// after construction; construction validates the shape invariants.
class IntegerPartition {
 public:
  explicit IntegerPartition(std::vector<int> parts);

  // Sorts the input (descending) before validating.
  static IntegerPartition from_unsorted(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int n() const { return n_; }
  int k() const { return static_cast<int>(parts_.size()); }
  int part(int j) const { return parts_[static_cast<size_t>(j)]; }

  // m[i] = number of parts equal to i, for i = 1..n (index 0 unused).
  std::vector<int> multiplicities() const;

  // Dash-joined parts, e.g. "6-2-2".
  std::string to_string() const;
  static IntegerPartition parse(const std::string& text);

  bool operator==(const IntegerPartition& o) const { return parts_ == o.parts_; }
  bool operator!=(const IntegerPartition& o) const { return !(*this == o); }
  // Lexicographic on parts; used for deterministic orderings in containers.
  bool operator<(const IntegerPartition& o) const { return parts_ < o.parts_; }

 private:
  std::vector<int> parts_;
  int n_ = 0;
};

// All integer partitions of n (optionally: into exactly k parts), in
// lexicographic-descending order of parts.
std::vector<IntegerPartition> enumerate_integer_partitions(
    int n, std::optional<int> k = std::nullopt);

// Shannon diversity index (natural log) of the size proportions.
double shannon_index(const IntegerPartition& p);

// Gini-Simpson index 1 - sum (n_j/n)^2.
double gini_simpson_index(const IntegerPartition& p);

// Number of set partitions of [n] whose sorted block sizes equal `p`:
// n! / (prod_i (i!)^{m_i} m_i!). Exact.
BigInt shape_multiplicity(const IntegerPartition& p);

// log of shape_multiplicity, computed in log space.
double log_shape_multiplicity(const IntegerPartition& p);

}  // namespace pbal
