#include "pbal/er_metrics.hpp"

#include <stdexcept>

namespace pbal::er {

namespace {

// Flat index of the pair (i, j), i < j, in the upper triangle.
inline size_t pair_index(int n, int i, int j) {
  return static_cast<size_t>(i) * n - static_cast<size_t>(i) * (i + 1) / 2 +
         static_cast<size_t>(j - i - 1);
}

std::vector<std::vector<int>> blocks_of(const std::vector<int>& labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  std::vector<std::vector<int>> blocks(static_cast<size_t>(k));
  for (size_t i = 0; i < labels.size(); ++i)
    blocks[static_cast<size_t>(labels[i])].push_back(static_cast<int>(i));
  return blocks;
}

}  // namespace

SetPartition dahl_point_estimate(std::span<const std::vector<int>> z_samples) {
  if (z_samples.empty())
    throw std::invalid_argument("dahl_point_estimate: no samples");
  const int n = static_cast<int>(z_samples.front().size());
  for (const auto& z : z_samples)
    if (static_cast<int>(z.size()) != n)
      throw std::invalid_argument("dahl_point_estimate: ragged samples");

  // Mean co-clustering frequencies over the upper triangle.
  std::vector<double> pihat(static_cast<size_t>(n) * (n - 1) / 2, 0.0);
  for (const auto& z : z_samples) {
    for (const auto& block : blocks_of(z)) {
      for (size_t ai = 0; ai < block.size(); ++ai)
        for (size_t bi = ai + 1; bi < block.size(); ++bi)
          pihat[pair_index(n, block[ai], block[bi])] += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(z_samples.size());
  for (double& p : pihat) p *= inv;

  // sum (delta - pihat)^2 = sum pihat^2 + sum_{linked pairs} (1 - 2 pihat);
  // only the second term varies across samples.
  double best_score = 0.0;
  size_t best = 0;
  for (size_t s = 0; s < z_samples.size(); ++s) {
    double score = 0.0;
    for (const auto& block : blocks_of(z_samples[s])) {
      for (size_t ai = 0; ai < block.size(); ++ai)
        for (size_t bi = ai + 1; bi < block.size(); ++bi)
          score += 1.0 - 2.0 * pihat[pair_index(n, block[ai], block[bi])];
    }
    if (s == 0 || score < best_score) {
      best_score = score;
      best = s;
    }
  }
  return SetPartition(z_samples[best]);
}

PairCounts fnr_fdr(const SetPartition& truth, const SetPartition& estimate) {
  if (truth.n() != estimate.n())
    throw std::invalid_argument("fnr_fdr: partitions must share n");
  PairCounts out;
  const int n = truth.n();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool in_truth = truth.label(i) == truth.label(j);
      const bool in_est = estimate.label(i) == estimate.label(j);
      if (in_truth && in_est)
        ++out.correct;
      else if (in_truth)
        ++out.missed;
      else if (in_est)
        ++out.wrong;
    }
  }
  out.fnr = (out.missed + out.correct) > 0
                ? static_cast<double>(out.missed) / (out.missed + out.correct)
                : 0.0;
  out.fdr = (out.wrong + out.correct) > 0
                ? static_cast<double>(out.wrong) / (out.wrong + out.correct)
                : 0.0;
  return out;
}

}  // namespace pbal::er
