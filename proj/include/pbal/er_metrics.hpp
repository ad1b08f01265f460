#pragma once

#include <span>
#include <vector>

#include "pbal/set_partition.hpp"

namespace pbal::er {

// Least-squares co-clustering point estimate: among the sampled label
// vectors, the one minimizing sum_{i<j} (delta_ij - pihat_ij)^2 against the
// mean co-clustering matrix. Ties break toward the earliest sample.
SetPartition dahl_point_estimate(std::span<const std::vector<int>> z_samples);

struct PairCounts {
  long long correct = 0;  // linked in both
  long long missed = 0;   // linked in truth only
  long long wrong = 0;    // linked in estimate only
  double fnr = 0.0;       // missed / (missed + correct), 0 when truth has no pairs
  double fdr = 0.0;       // wrong / (wrong + correct), 0 when estimate has no pairs
};

PairCounts fnr_fdr(const SetPartition& truth, const SetPartition& estimate);

}  // namespace pbal::er
