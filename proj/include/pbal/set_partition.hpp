#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pbal/integer_partition.hpp"

namespace pbal {

// A partition of {0,...,n-1} stored as canonical (first-appearance) labels:
// label(0) == 0 and each new label is one more than the maximum seen so far.
class SetPartition {
 public:
  // Accepts arbitrary integer labels; canonicalizes.
  explicit SetPartition(const std::vector<int>& labels);

  static SetPartition from_blocks(const std::vector<std::vector<int>>& blocks,
                                  int n);

  int n() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int label(int i) const { return labels_[static_cast<size_t>(i)]; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<std::vector<int>> blocks() const;
  std::vector<int> block_sizes() const;  // indexed by label
  IntegerPartition shape() const;

  bool operator==(const SetPartition& o) const { return labels_ == o.labels_; }
  bool operator!=(const SetPartition& o) const { return !(*this == o); }
  bool operator<(const SetPartition& o) const { return labels_ < o.labels_; }

 private:
  SetPartition() = default;
  std::vector<int> labels_;
  int k_ = 0;
};

// Canonicalize an arbitrary label vector in place; returns the block count.
int canonicalize_labels(std::vector<int>& labels);

// Upper bound for exhaustive set-partition enumeration (Bell(13) ~ 2.7e7).
inline constexpr int kMaxEnumerationN = 13;

// Visits the canonical label vector of every set partition of {0,...,n-1}
// exactly once, in lexicographic order of the label vectors. The reference
// passed to the callback is reused between calls.
template <class F>
void for_each_set_partition_labels(int n, F&& f) {
  if (n < 1 || n > kMaxEnumerationN)
    throw std::invalid_argument(
        "for_each_set_partition_labels: n must be in [1, 13]");
  std::vector<int> labels(static_cast<size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<size_t>(n), 0);  // max of labels[0..i]
  for (;;) {
    f(static_cast<const std::vector<int>&>(labels));
    // Advance to the next restricted-growth string.
    int i = n - 1;
    for (; i > 0; --i) {
      if (labels[static_cast<size_t>(i)] <= prefix_max[static_cast<size_t>(i - 1)]) break;
    }
    if (i == 0) return;
    ++labels[static_cast<size_t>(i)];
    prefix_max[static_cast<size_t>(i)] =
        std::max(prefix_max[static_cast<size_t>(i - 1)], labels[static_cast<size_t>(i)]);
    for (int j = i + 1; j < n; ++j) {
      labels[static_cast<size_t>(j)] = 0;
      prefix_max[static_cast<size_t>(j)] = prefix_max[static_cast<size_t>(j - 1)];
    }
  }
}

// Materialized enumeration; guarded to small n where the full list fits
// comfortably in memory.
std::vector<SetPartition> enumerate_set_partitions(int n);

BigInt bell_number(int n);

}  // namespace pbal
