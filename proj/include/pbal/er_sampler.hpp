#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pbal/er_data.hpp"
#include "pbal/er_prior.hpp"
#include "pbal/rng.hpp"

namespace pbal::er {

// Initial partition: identical records grouped together (capped at the
// prior's maximum cluster size), or every record its own cluster.
enum class InitMode { MatchGroups, Singletons };

struct MCMCConfig {
  int iterations = 1000;
  int burn_in = 0;
  int thin = 1;
  uint64_t seed = 1;
  InitMode init = InitMode::MatchGroups;

  bool use_chaperones = false;
  int chaperone_moves_per_iter = 0;  // 0 means one move per record
  bool chaperones_agreement_weighted = false;

  bool update_beta = true;
  // Distortion hyperprior Beta(a, b); defaults give mean 0.005, sd 0.01.
  double beta_a = 0.24375;
  double beta_b = 48.50625;
  std::vector<double> beta_init;  // empty: prior mean

  bool store_z = true;

  void validate() const;
  int kept_samples() const { return (iterations - burn_in) / thin; }
};

// Full sampler state. `members` mirrors `z` (records per cluster) and `y`
// holds one latent entity row per cluster. Invariant: w[i][l] == 0 implies
// x[i][l] == y[z[i]][l].
struct MCMCState {
  std::vector<int> z;
  std::vector<int> cluster_sizes;
  std::vector<std::vector<int>> members;
  std::vector<std::vector<int>> y;
  std::vector<std::vector<uint8_t>> w;
  std::vector<double> beta;
  Rng rng;

  explicit MCMCState(uint64_t seed) : rng(seed) {}
  int kplus() const { return static_cast<int>(cluster_sizes.size()); }
  void validate(const ERDataset& data, const PartitionPrior& prior) const;
};

// Per-iteration likelihood caches; theta stays fixed at the empirical field
// distribution, the beta-dependent parts are refreshed every iteration.
struct SamplerWorkspace {
  std::vector<std::vector<double>> theta;  // per field
  std::vector<double> log_match;     // n*L: log((1-b) + b theta[x])
  std::vector<double> log_mismatch;  // n*L: log(b theta[x])
  std::vector<double> log_base;      // per record: sum_l log theta[x]
  mutable std::vector<double> scratch;

  void init(const ERDataset& data);
  void refresh_beta(const ERDataset& data, const std::vector<double>& beta);
};

// sum_l log[(1-beta_l) 1(x_l == y_l) + beta_l theta_l(x_l)]: the record
// likelihood against an entity row with the distortion indicator summed out.
double log_record_likelihood(const std::vector<int>& x,
                             const std::vector<int>& y,
                             const std::vector<double>& beta,
                             const std::vector<std::vector<double>>& theta);

MCMCState init_state(const ERDataset& data, const std::vector<double>& beta0,
                     uint64_t seed, InitMode mode = InitMode::Singletons,
                     int max_cluster_size = INT_MAX);

// One full-conditional reassignment of record i (new clusters allowed; the
// new cluster's entity row is drawn from its conditional after placement).
void gibbs_update_z(MCMCState& s, const ERDataset& data,
                    const PartitionPrior& prior, const SamplerWorkspace& ws,
                    int i);

// One chaperones move: a record pair is drawn from a state-independent
// proposal, both chaperones get unrestricted updates, and every other record
// currently in their two clusters gets a restricted update between them.
void chaperones_move(MCMCState& s, const ERDataset& data,
                     const PartitionPrior& prior, const SamplerWorkspace& ws,
                     const std::vector<double>* pair_weights);

// Blocked update of (y, w): entity rows with distortion indicators
// marginalized, then indicators given the new rows.
void update_y_w(MCMCState& s, const ERDataset& data,
                const SamplerWorkspace& ws);

// Conjugate Beta update of the per-field distortion probabilities.
void update_beta(MCMCState& s, const ERDataset& data, double a, double b);

// Cumulative weights over record pairs (i<j), proportional to the number of
// agreeing fields + 1; the optional chaperones proposal.
std::vector<double> agreement_pair_weights(const ERDataset& data);

struct ERResult {
  int n = 0;
  int L = 0;
  MCMCConfig config;  // settings the samples were collected under
  std::vector<int> kplus;
  std::vector<std::vector<int>> m_hist;  // per sample, index s-1
  std::vector<std::vector<double>> beta_samples;
  std::vector<std::vector<double>> theta_mu_samples;
  std::vector<std::string> theta_mu_names;
  std::vector<std::vector<int>> z_samples;

  double kplus_mean() const;
  double kplus_sd() const;
};

// Runs one chain: per iteration the partition is updated (full sweep, or
// chaperone moves when configured), then the prior's parameters, then
// (y, w, beta). Deterministic given config.seed. The prior is mutated in
// place by its parameter updates.
ERResult run_mcmc(const ERDataset& data, PartitionPrior& prior,
                  const MCMCConfig& config);

}  // namespace pbal::er
