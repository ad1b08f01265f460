#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbal/esc.hpp"
#include "pbal/set_partition.hpp"

namespace pbal::er {

// A table of n records with L categorical fields (values 0..D_l-1), the
// per-field category probabilities used to generate or model it, and an
// optional ground-truth partition of the records.
struct ERDataset {
  int n = 0;
  int L = 0;
  std::vector<int> D;                       // per-field category counts
  std::vector<std::vector<int>> x;          // n rows of L entries
  std::vector<std::vector<double>> theta;   // per-field probabilities
  std::optional<SetPartition> truth;

  void validate() const;
};

// Per-field empirical category frequencies of the records; the inference
// code fixes theta at these.
std::vector<std::vector<double>> empirical_theta(const ERDataset& data);

// True cluster-size profile of a synthetic dataset: counts[s-1] clusters of
// size s.
struct SyntheticScenario {
  std::vector<int> counts;

  static SyntheticScenario from_counts(std::vector<int> counts);
  // counts[s-1] = round(100 * mu_s); sizes whose rounded count is zero are
  // dropped from the tail.
  static SyntheticScenario from_mu_times_100(const MuFamily& mu);
  // Built-in profiles 1..3: Binomial^+(10,1/2), Poisson^+(5), NegBin^+(5,1/2)
  // via the rounding rule above.
  static SyntheticScenario builtin(int index);

  int total_clusters() const;
  int total_records() const;
};

// Draws latent entities y ~ Cat(theta_l) per cluster, then records that copy
// their entity per field with probability 1 - beta_l and otherwise draw a
// fresh Cat(theta_l) value. Record order is cluster-major, which makes the
// truth labels canonical. Deterministic given the seed.
ERDataset generate_synthetic(const SyntheticScenario& scenario, int L,
                             const std::vector<int>& D,
                             const std::vector<std::vector<double>>& theta,
                             const std::vector<double>& beta_true,
                             uint64_t seed);

// Uniform-theta convenience overload (theta_l = 1/D_l).
ERDataset generate_synthetic(const SyntheticScenario& scenario, int L, int D,
                             double beta_true, uint64_t seed);

// CSV round trip. Header is f1..fL plus an optional trailing `truth` column
// of integer labels; values are written 1-based.
void write_dataset_csv(const ERDataset& data, const std::string& path);
ERDataset read_dataset_csv(const std::string& path);

}  // namespace pbal::er
