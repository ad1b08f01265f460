#include "pbal/set_partition.hpp"

#include <map>
#include <stdexcept>

namespace pbal {

int canonicalize_labels(std::vector<int>& labels) {
  std::map<int, int> remap;
  int next = 0;
  for (int& l : labels) {
    auto [it, inserted] = remap.emplace(l, next);
    if (inserted) ++next;
    l = it->second;
  }
  return next;
}

SetPartition::SetPartition(const std::vector<int>& labels) {
  if (labels.empty()) throw std::invalid_argument("SetPartition: empty");
  labels_ = labels;
  k_ = canonicalize_labels(labels_);
}

SetPartition SetPartition::from_blocks(
    const std::vector<std::vector<int>>& blocks, int n) {
  if (n < 1) throw std::invalid_argument("SetPartition::from_blocks: n < 1");
  std::vector<int> labels(static_cast<size_t>(n), -1);
  int next = 0;
  for (const auto& block : blocks) {
    if (block.empty())
      throw std::invalid_argument("SetPartition::from_blocks: empty block");
    for (int i : block) {
      if (i < 0 || i >= n)
        throw std::invalid_argument("SetPartition::from_blocks: index out of range");
      if (labels[static_cast<size_t>(i)] != -1)
        throw std::invalid_argument("SetPartition::from_blocks: blocks overlap");
      labels[static_cast<size_t>(i)] = next;
    }
    ++next;
  }
  for (int l : labels)
    if (l == -1)
      throw std::invalid_argument("SetPartition::from_blocks: blocks do not cover [n]");
  SetPartition sp;
  sp.labels_ = std::move(labels);
  sp.k_ = canonicalize_labels(sp.labels_);
  return sp;
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<size_t>(k_));
  for (int i = 0; i < n(); ++i)
    out[static_cast<size_t>(labels_[static_cast<size_t>(i)])].push_back(i);
  return out;
}

std::vector<int> SetPartition::block_sizes() const {
  std::vector<int> sizes(static_cast<size_t>(k_), 0);
  for (int l : labels_) ++sizes[static_cast<size_t>(l)];
  return sizes;
}

IntegerPartition SetPartition::shape() const {
  return IntegerPartition::from_unsorted(block_sizes());
}

std::vector<SetPartition> enumerate_set_partitions(int n) {
  if (n < 1 || n > kMaxEnumerationN)
    throw std::invalid_argument("enumerate_set_partitions: n must be in [1, 13]");
  std::vector<SetPartition> out;
  for_each_set_partition_labels(
      n, [&](const std::vector<int>& labels) { out.emplace_back(labels); });
  return out;
}

BigInt bell_number(int n) {
  if (n < 0) throw std::invalid_argument("bell_number: n < 0");
  // Bell triangle.
  std::vector<BigInt> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<BigInt> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (size_t j = 0; j < row.size(); ++j) next.push_back(next[j] + row[j]);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace pbal
