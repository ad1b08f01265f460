#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "pbal/er_data.hpp"
#include "pbal/er_metrics.hpp"
#include "pbal/er_prior.hpp"
#include "pbal/er_sampler.hpp"
#include "pbal/mathutil.hpp"
#include "test_support.hpp"

using namespace pbal;
using namespace pbal::er;

namespace {

// Marginal likelihood of a dataset under a fixed partition: y and w summed
// out analytically, block by block and field by field.
double log_marginal_likelihood(const ERDataset& data,
                               const std::vector<std::vector<double>>& theta,
                               const std::vector<double>& beta,
                               const SetPartition& part) {
  double total = 0.0;
  for (const auto& block : part.blocks()) {
    for (int l = 0; l < data.L; ++l) {
      double block_sum = 0.0;
      for (int v = 0; v < data.D[static_cast<size_t>(l)]; ++v) {
        double prod = theta[static_cast<size_t>(l)][static_cast<size_t>(v)];
        for (int i : block) {
          const int x = data.x[static_cast<size_t>(i)][static_cast<size_t>(l)];
          const double th = theta[static_cast<size_t>(l)][static_cast<size_t>(x)];
          prod *= (x == v ? 1.0 - beta[static_cast<size_t>(l)] : 0.0) +
                  beta[static_cast<size_t>(l)] * th;
        }
        block_sum += prod;
      }
      total += std::log(block_sum);
    }
  }
  return total;
}

// Exhaustively enumerated partition posterior (normalized), keyed by
// canonical labels.
std::map<std::vector<int>, double> exact_posterior(
    const ERDataset& data, const ESCModel& prior,
    const std::vector<double>& beta) {
  const auto theta = empirical_theta(data);
  std::map<std::vector<int>, double> post;
  double log_norm = kNegInf;
  for_each_set_partition_labels(data.n, [&](const std::vector<int>& labels) {
    const SetPartition part(labels);
    const double lp = prior.log_eppf(part.shape()) +
                      log_marginal_likelihood(data, theta, beta, part);
    post[labels] = lp;
    log_norm = log_sum_exp(log_norm, lp);
  });
  for (auto& [labels, lp] : post) lp = std::exp(lp - log_norm);
  return post;
}

ERDataset tiny_dataset() {
  // n=5, L=2, D=2; a deliberately ambiguous instance.
  ERDataset data;
  data.n = 5;
  data.L = 2;
  data.D = {2, 2};
  data.x = {{0, 0}, {0, 0}, {0, 1}, {1, 1}, {1, 1}};
  data.theta = {{0.6, 0.4}, {0.4, 0.6}};  // empirical frequencies
  return data;
}

}  // namespace

TEST_CASE("synthetic scenarios reproduce the published size profiles") {
  const SyntheticScenario s1 = SyntheticScenario::builtin(1);
  CHECK(s1.counts == std::vector<int>{1, 4, 12, 21, 25, 21, 12, 4, 1});
  CHECK(s1.total_clusters() == 101);
  CHECK(s1.total_records() == 505);

  const SyntheticScenario s2 = SyntheticScenario::builtin(2);
  CHECK(s2.counts == std::vector<int>{3, 8, 14, 18, 18, 15, 11, 7, 4, 2, 1});
  CHECK(s2.total_clusters() == 101);

  const SyntheticScenario s3 = SyntheticScenario::builtin(3);
  CHECK(s3.counts ==
        std::vector<int>{8, 12, 14, 14, 13, 11, 8, 6, 5, 3, 2, 1, 1, 1});
  CHECK(s3.total_clusters() == 99);

  CHECK_THROWS_AS(SyntheticScenario::from_counts({0, 0}), std::invalid_argument);
}

TEST_CASE("synthetic data generation") {
  const SyntheticScenario sc = SyntheticScenario::from_counts({2, 1, 1});
  // beta = 0: records copy their entities exactly.
  const ERDataset clean = generate_synthetic(sc, 3, 5, 0.0, 42);
  REQUIRE(clean.truth.has_value());
  CHECK(clean.n == 2 * 1 + 2 + 3);
  for (const auto& block : clean.truth->blocks())
    for (int i : block)
      CHECK(clean.x[static_cast<size_t>(i)] ==
            clean.x[static_cast<size_t>(block.front())]);

  // Determinism under a fixed seed.
  const ERDataset a = generate_synthetic(sc, 3, 5, 0.2, 7);
  const ERDataset b = generate_synthetic(sc, 3, 5, 0.2, 7);
  CHECK(a.x == b.x);
  const ERDataset c = generate_synthetic(sc, 3, 5, 0.2, 8);
  CHECK(a.x != c.x);

  const ERDataset big = generate_synthetic(SyntheticScenario::builtin(1), 5,
                                           10, 0.01, 1);
  CHECK(big.n == 505);
  CHECK(big.truth->k() == 101);
  CHECK(big.truth->shape() == IntegerPartition::from_unsorted([&] {
          std::vector<int> sizes;
          for (size_t s = 0; s < 9; ++s)
            for (int c = 0; c < SyntheticScenario::builtin(1).counts[s]; ++c)
              sizes.push_back(static_cast<int>(s) + 1);
          return sizes;
        }()));
}

TEST_CASE("dataset CSV round trip") {
  const ERDataset data =
      generate_synthetic(SyntheticScenario::from_counts({3, 2}), 2, 4, 0.1, 5);
  const std::string path = "/tmp/pbal_test_dataset.csv";
  write_dataset_csv(data, path);
  const ERDataset back = read_dataset_csv(path);
  CHECK(back.n == data.n);
  CHECK(back.L == data.L);
  CHECK(back.x == data.x);
  REQUIRE(back.truth.has_value());
  CHECK(*back.truth == *data.truth);
  // theta comes back as the empirical distribution; the file carries no
  // category count, so unobserved trailing categories are dropped.
  const auto emp = empirical_theta(data);
  for (int l = 0; l < data.L; ++l) {
    REQUIRE(back.D[static_cast<size_t>(l)] <= data.D[static_cast<size_t>(l)]);
    for (int v = 0; v < data.D[static_cast<size_t>(l)]; ++v) {
      const double expect = emp[static_cast<size_t>(l)][static_cast<size_t>(v)];
      if (v < back.D[static_cast<size_t>(l)])
        CHECK(back.theta[static_cast<size_t>(l)][static_cast<size_t>(v)] ==
              doctest::Approx(expect).epsilon(1e-12));
      else
        CHECK(expect == 0.0);
    }
  }
}

TEST_CASE("record likelihood") {
  const std::vector<std::vector<double>> theta{{0.6, 0.4}, {0.3, 0.7}};
  const std::vector<int> x{0, 1};
  const std::vector<double> beta0{0.0, 0.0};
  CHECK(log_record_likelihood(x, x, beta0, theta) == 0.0);
  CHECK(log_record_likelihood(x, {1, 1}, beta0, theta) == kNegInf);

  // New-cluster marginal: summing the likelihood against y ~ theta gives
  // prod_l theta(x_l), for any beta.
  const std::vector<double> beta{0.3, 0.05};
  for (int x0 = 0; x0 < 2; ++x0) {
    for (int x1 = 0; x1 < 2; ++x1) {
      const std::vector<int> xi{x0, x1};
      double marginal = 0.0;
      for (int y0 = 0; y0 < 2; ++y0)
        for (int y1 = 0; y1 < 2; ++y1)
          marginal += theta[0][static_cast<size_t>(y0)] *
                      theta[1][static_cast<size_t>(y1)] *
                      std::exp(log_record_likelihood(xi, {y0, y1}, beta, theta));
      CHECK(marginal == doctest::Approx(theta[0][static_cast<size_t>(x0)] *
                                        theta[1][static_cast<size_t>(x1)])
                            .epsilon(1e-12));
    }
  }
}

TEST_CASE("prior reallocation weights per family") {
  // Size cap: a zero-truncated binomial cluster at size N cannot grow.
  const EscPartitionPrior ztb(MuFamilyKind::ZtBinomial, {5, 0.3}, false);
  CHECK(ztb.log_existing_weight(5) == kNegInf);
  CHECK(ztb.max_cluster_size() == 5);
  CHECK(std::exp(ztb.log_existing_weight(2)) ==
        doctest::Approx(3.0 * 0.3 / 0.7).epsilon(1e-12));

  // Zero-truncated Poisson: constant existing weight, (k+1) mu_1 new weight.
  const EscPartitionPrior ztp(MuFamilyKind::ZtPoisson, {2.0}, false);
  for (int s = 1; s <= 20; ++s)
    CHECK(ztp.log_existing_weight(s) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const double mu1 = MuFamily::zt_poisson(2.0).pmf(1);
  CHECK(std::exp(ztp.log_new_weight(3, 100)) ==
        doctest::Approx(4.0 * mu1).epsilon(1e-12));

  // Agreement with the generic Gibbs-view ratios.
  const EscPartitionPrior sb(MuFamilyKind::ShiftedBinomial, {8, 0.4}, false);
  const GibbsPartitionPrior gibbs_view(
      ESCModel(MuFamily::shifted_binomial(8, 0.4)).to_gibbs());
  for (int s = 1; s <= 9; ++s) {
    const double a = sb.log_existing_weight(s);
    const double g = gibbs_view.log_existing_weight(s);
    if (a == kNegInf)
      CHECK(g == kNegInf);
    else
      CHECK(a == doctest::Approx(g).epsilon(1e-10));
  }
}

TEST_CASE("state bookkeeping stays consistent under sweeps") {
  const ERDataset data =
      generate_synthetic(SyntheticScenario::from_counts({4, 3, 2}), 3, 6, 0.05, 9);
  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, true);
  SamplerWorkspace ws;
  ws.init(data);
  MCMCState s = init_state(data, {0.01, 0.01, 0.01}, 17);
  for (int t = 0; t < 50; ++t) {
    ws.refresh_beta(data, s.beta);
    for (int i = 0; i < data.n; ++i) gibbs_update_z(s, data, prior, ws, i);
    prior.update_parameters(s.cluster_sizes, s.rng);
    update_y_w(s, data, ws);
    update_beta(s, data, 0.5, 50.0);
    s.validate(data, prior);
  }
}

TEST_CASE("beta = 0 with distinct entities: truth is recovered") {
  // Three entities with pairwise-distinct field values and no distortion.
  ERDataset data;
  data.n = 6;
  data.L = 2;
  data.D = {3, 3};
  data.x = {{0, 0}, {0, 0}, {1, 1}, {1, 1}, {2, 2}, {2, 2}};
  data.theta = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  data.truth = SetPartition({0, 0, 1, 1, 2, 2});

  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {2.0}, false);
  SamplerWorkspace ws;
  ws.init(data);
  MCMCState s = init_state(data, {0.0, 0.0}, 3);
  bool hit_truth = false;
  for (int t = 0; t < 40; ++t) {
    ws.refresh_beta(data, s.beta);
    for (int i = 0; i < data.n; ++i) gibbs_update_z(s, data, prior, ws, i);
    update_y_w(s, data, ws);
    s.validate(data, prior);
    // Wrong merges are impossible: z always refines the truth.
    std::vector<int> labels = s.z;
    canonicalize_labels(labels);
    const SetPartition part(labels);
    for (int i = 0; i < data.n; ++i)
      for (int j = i + 1; j < data.n; ++j)
        if (part.label(i) == part.label(j))
          CHECK(data.truth->label(i) == data.truth->label(j));
    if (part == *data.truth) hit_truth = true;
  }
  CHECK(hit_truth);
}

TEST_CASE("update_y_w: forced indicators and singleton entities") {
  ERDataset data;
  data.n = 2;
  data.L = 1;
  data.D = {4};
  data.x = {{0}, {1}};
  data.theta = {{0.25, 0.25, 0.25, 0.25}};

  SamplerWorkspace ws;
  ws.init(data);
  MCMCState s = init_state(data, {1e-6}, 11);
  ws.refresh_beta(data, s.beta);

  // Singleton clusters with tiny beta: entities equal their records w.h.p.
  for (int t = 0; t < 100; ++t) {
    update_y_w(s, data, ws);
    CHECK(s.y[0][0] == 0);
    CHECK(s.y[1][0] == 1);
    CHECK(s.w[0][0] == 0);
    CHECK(s.w[1][0] == 0);
  }

  // Force both records into one cluster: the mismatching one is distorted.
  MCMCState merged = init_state(data, {0.5}, 13);
  merged.z = {0, 0};
  merged.cluster_sizes = {2};
  merged.members = {{0, 1}};
  merged.y = {{0}};
  merged.w = {{0}, {1}};
  ws.refresh_beta(data, merged.beta);
  for (int t = 0; t < 50; ++t) {
    update_y_w(merged, data, ws);
    const int y = merged.y[0][0];
    for (int i = 0; i < 2; ++i)
      if (data.x[static_cast<size_t>(i)][0] != y)
        CHECK(merged.w[static_cast<size_t>(i)][0] == 1);
  }
}

TEST_CASE("beta posterior: conjugate counts") {
  ERDataset data;
  data.n = 40;
  data.L = 1;
  data.D = {2};
  data.x.assign(40, {0});
  for (int i = 20; i < 40; ++i) data.x[static_cast<size_t>(i)] = {1};
  data.theta = empirical_theta(data);

  MCMCState s = init_state(data, {0.5}, 21);
  // All indicators zero: draws follow Beta(a, b + n).
  const double a = 2.0, b = 3.0;
  double mean = 0.0;
  const int draws = 4000;
  for (int t = 0; t < draws; ++t) {
    update_beta(s, data, a, b);
    mean += s.beta[0];
  }
  mean /= draws;
  const double expect = a / (a + b + data.n);
  const double sd = std::sqrt(expect * (1 - expect) / (a + b + data.n + 1));
  CHECK(std::abs(mean - expect) < 4.0 * sd / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("theta_mu conditionals") {
  Rng rng(5);

  SUBCASE("zt-poisson recovery from sizes drawn at lambda = 5") {
    // K = 200 cluster sizes simulated from the zero-truncated Poisson(5).
    const MuFamily mu = MuFamily::zt_poisson(5.0);
    std::vector<double> pmf;
    for (int s = 1; s <= 40; ++s) pmf.push_back(mu.pmf(s));
    std::vector<int> sizes;
    Rng gen(99);
    for (int j = 0; j < 200; ++j) sizes.push_back(1 + gen.categorical(pmf));

    EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, true);
    double mean = 0.0;
    const int iters = 2000;
    for (int t = 0; t < iters; ++t) {
      prior.update_parameters(sizes, rng);
      mean += prior.parameters()[0];
    }
    mean /= iters;
    CHECK(mean > 4.0);
    CHECK(mean < 6.0);
  }

  SUBCASE("zt-poisson conditional is log-concave in log lambda") {
    const int n = 120, k = 30;
    auto target = [&](double t) {
      const double lambda = std::exp(t);
      return (1.0 + n) * t - lambda - k * (lambda + std::log1p(-std::exp(-lambda)));
    };
    double prev2 = target(-2.0), prev1 = target(-1.9);
    for (double t = -1.8; t <= 3.0; t += 0.1) {
      const double cur = target(t);
      CHECK((cur - prev1) - (prev1 - prev2) <= 1e-9);
      prev2 = prev1;
      prev1 = cur;
    }
  }

  SUBCASE("shifted binomial with all singletons pushes p to zero") {
    EscPartitionPrior prior(MuFamilyKind::ShiftedBinomial, {5, 0.5}, true);
    const std::vector<int> singletons(50, 1);
    double mean_p = 0.0;
    const int iters = 400;
    for (int t = 0; t < iters; ++t) {
      prior.update_parameters(singletons, rng);
      mean_p += prior.parameters()[1];
    }
    mean_p /= iters;
    CHECK(mean_p < 0.05);
  }

  SUBCASE("shifted binomial respects the N support floor") {
    EscPartitionPrior prior(MuFamilyKind::ShiftedBinomial, {5, 0.5}, true);
    const std::vector<int> sizes{7, 7, 6, 5, 1};
    for (int t = 0; t < 200; ++t) {
      prior.update_parameters(sizes, rng);
      CHECK(prior.parameters()[0] >= 6.0);  // max size - 1
      CHECK(prior.max_cluster_size() >= 7);
    }
  }

  SUBCASE("slice-sampled families stay in their parameter domains and move") {
    const std::vector<int> sizes{5, 4, 4, 3, 2, 2, 2, 1, 1, 1};
    struct Entry {
      MuFamilyKind kind;
      std::vector<double> init;
    };
    const std::vector<Entry> entries = {
        {MuFamilyKind::ZtBinomial, {6, 0.5}},
        {MuFamilyKind::ZtNegBinomial, {1.0, 0.5}},
        {MuFamilyKind::Logarithmic, {0.5}},
    };
    for (const auto& e : entries) {
      EscPartitionPrior prior(e.kind, e.init, true);
      std::set<double> seen;
      for (int t = 0; t < 300; ++t) {
        prior.update_parameters(sizes, rng);
        const auto params = prior.parameters();
        if (e.kind == MuFamilyKind::ZtBinomial) {
          CHECK(params[0] == 6.0);  // N stays fixed
          CHECK(params[1] > 0.0);
          CHECK(params[1] < 1.0);
          seen.insert(params[1]);
        } else if (e.kind == MuFamilyKind::ZtNegBinomial) {
          CHECK(params[0] > 0.0);
          CHECK(params[1] > 0.0);
          CHECK(params[1] < 1.0);
          seen.insert(params[0]);
        } else {
          CHECK(params[0] > 0.0);
          CHECK(params[0] < 1.0);
          seen.insert(params[0]);
        }
      }
      CHECK(seen.size() > 50);  // the chain actually moves
    }
  }
}

TEST_CASE("run_mcmc config validation") {
  const ERDataset data =
      generate_synthetic(SyntheticScenario::from_counts({2, 1}), 2, 4, 0.1, 3);
  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, true);
  MCMCConfig cfg;
  cfg.iterations = 10;
  cfg.burn_in = 20;
  CHECK_THROWS_AS(run_mcmc(data, prior, cfg), ConfigError);
  cfg.iterations = 21;
  cfg.burn_in = 20;
  cfg.thin = 5;
  CHECK_THROWS_AS(run_mcmc(data, prior, cfg), ConfigError);
}

TEST_CASE("zt-binomial prior enforces the hard size cap across a run") {
  const ERDataset data = generate_synthetic(
      SyntheticScenario::from_counts({0, 0, 0, 5}), 3, 8, 0.02, 31);
  EscPartitionPrior prior(MuFamilyKind::ZtBinomial, {2, 0.5}, true);
  MCMCConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 100;
  cfg.seed = 8;
  const ERResult r = run_mcmc(data, prior, cfg);
  for (const auto& hist : r.m_hist) CHECK(hist.size() <= 2);
}

TEST_CASE("chaperones with a single record are a no-op") {
  ERDataset data;
  data.n = 1;
  data.L = 1;
  data.D = {2};
  data.x = {{0}};
  data.theta = {{1.0, 0.0}};
  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, false);
  SamplerWorkspace ws;
  ws.init(data);
  MCMCState s = init_state(data, {0.1}, 2);
  ws.refresh_beta(data, s.beta);
  chaperones_move(s, data, prior, ws, nullptr);
  CHECK(s.kplus() == 1);
  s.validate(data, prior);
}

TEST_CASE("beta traces are stationary after burn-in") {
  const ERDataset data = generate_synthetic(
      SyntheticScenario::from_counts({8, 5, 3, 1}), 4, 8, 0.05, 41);
  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, true);
  MCMCConfig cfg;
  cfg.iterations = 12000;
  cfg.burn_in = 2000;
  cfg.seed = 90;
  cfg.store_z = false;
  const ERResult r = run_mcmc(data, prior, cfg);
  // Split-sample comparison: halves agree within Monte Carlo error.
  for (int l = 0; l < data.L; ++l) {
    std::vector<double> first, second;
    const size_t half = r.beta_samples.size() / 2;
    for (size_t t = 0; t < 2 * half; ++t)
      (t < half ? first : second)
          .push_back(r.beta_samples[t][static_cast<size_t>(l)]);
    const auto [m1, se1] = testsupport::batch_mean_se(first);
    const auto [m2, se2] = testsupport::batch_mean_se(second);
    CHECK(std::abs(m1 - m2) <= 3.0 * (se1 + se2) + 1e-12);
  }
}

TEST_CASE("run_mcmc accepts a fixed Gibbs-model prior") {
  const ERDataset data = generate_synthetic(
      SyntheticScenario::from_counts({4, 3, 1}), 3, 6, 0.03, 77);
  GibbsPartitionPrior prior(
      neutral_mixture_model(CountDistribution::shifted_poisson(3.0)));
  MCMCConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 100;
  cfg.seed = 5;
  const ERResult r = run_mcmc(data, prior, cfg);
  CHECK(r.theta_mu_samples.empty());
  CHECK(r.kplus_mean() > 1.0);
  CHECK(r.kplus_mean() < data.n);
}

TEST_CASE("run_mcmc determinism") {
  const ERDataset data =
      generate_synthetic(SyntheticScenario::from_counts({3, 2, 1}), 3, 6, 0.05, 12);
  MCMCConfig cfg;
  cfg.iterations = 200;
  cfg.burn_in = 50;
  cfg.seed = 77;
  EscPartitionPrior p1(MuFamilyKind::ZtPoisson, {1.0}, true);
  EscPartitionPrior p2(MuFamilyKind::ZtPoisson, {1.0}, true);
  const ERResult a = run_mcmc(data, p1, cfg);
  const ERResult b = run_mcmc(data, p2, cfg);
  CHECK(a.kplus == b.kplus);
  CHECK(a.beta_samples == b.beta_samples);
  CHECK(a.z_samples == b.z_samples);
  CHECK(a.theta_mu_samples == b.theta_mu_samples);
}

TEST_CASE("exact posterior agreement on a tiny instance (fast variant)") {
  const ERDataset data = tiny_dataset();
  const ESCModel prior_model(MuFamily::zt_poisson(2.0));
  const std::vector<double> beta{0.05, 0.05};
  const auto exact = exact_posterior(data, prior_model, beta);

  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {2.0}, false);
  MCMCConfig cfg;
  cfg.iterations = 21000;
  cfg.burn_in = 1000;
  cfg.seed = 4;
  cfg.update_beta = false;
  cfg.beta_init = beta;
  const ERResult r = run_mcmc(data, prior, cfg);

  std::map<std::vector<int>, double> freq;
  for (const auto& z : r.z_samples) freq[z] += 1.0;
  for (auto& [labels, f] : freq) f /= static_cast<double>(r.z_samples.size());

  double tv = 0.0;
  for (const auto& [labels, p] : exact) {
    const auto it = freq.find(labels);
    tv += std::abs(p - (it == freq.end() ? 0.0 : it->second));
  }
  for (const auto& [labels, f] : freq)
    if (exact.find(labels) == exact.end()) tv += f;
  tv /= 2.0;
  CHECK(tv < 0.05);
}

TEST_CASE("chaperones: split reachability from a merged state") {
  ERDataset data;
  data.n = 4;
  data.L = 1;
  data.D = {2};
  data.x = {{0}, {0}, {1}, {1}};
  data.theta = empirical_theta(data);

  EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, false);
  SamplerWorkspace ws;
  ws.init(data);
  MCMCState s = init_state(data, {0.2}, 19);
  // Merge everything.
  s.z = {0, 0, 0, 0};
  s.cluster_sizes = {4};
  s.members = {{0, 1, 2, 3}};
  s.y = {{0}};
  for (int i = 0; i < 4; ++i) s.w[static_cast<size_t>(i)][0] = data.x[static_cast<size_t>(i)][0] != 0;
  ws.refresh_beta(data, s.beta);

  std::set<int> kplus_seen;
  for (int t = 0; t < 400; ++t) {
    chaperones_move(s, data, prior, ws, nullptr);
    s.validate(data, prior);
    kplus_seen.insert(s.kplus());
  }
  CHECK(kplus_seen.count(1) == 1);
  CHECK(kplus_seen.size() > 1);  // splits happened

  // The agreement-weighted proposal drives the same moves.
  const std::vector<double> weights = agreement_pair_weights(data);
  REQUIRE(weights.size() == 6);
  std::set<int> kplus_weighted;
  for (int t = 0; t < 400; ++t) {
    chaperones_move(s, data, prior, ws, &weights);
    s.validate(data, prior);
    kplus_weighted.insert(s.kplus());
  }
  CHECK(kplus_weighted.size() > 1);
}

TEST_CASE("chaperones match plain Gibbs on posterior size histograms") {
  const ERDataset data = generate_synthetic(
      SyntheticScenario::from_counts({11, 7, 4, 2, 1}), 4, 8, 0.05, 23);
  REQUIRE(data.n == 50);

  auto run = [&](bool chaperones, uint64_t seed) {
    EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.0}, true);
    MCMCConfig cfg;
    cfg.iterations = 24000;
    cfg.burn_in = 4000;
    cfg.seed = seed;
    cfg.use_chaperones = chaperones;
    cfg.store_z = false;
    return run_mcmc(data, prior, cfg);
  };
  const ERResult plain = run(false, 101);
  const ERResult chap = run(true, 202);

  auto trace_of = [](const ERResult& r, int size) {
    std::vector<double> out;
    for (const auto& h : r.m_hist)
      out.push_back(size <= static_cast<int>(h.size())
                        ? h[static_cast<size_t>(size - 1)]
                        : 0.0);
    return out;
  };
  for (int size = 1; size <= 4; ++size) {
    const auto [m1, se1] = testsupport::batch_mean_se(trace_of(plain, size));
    const auto [m2, se2] = testsupport::batch_mean_se(trace_of(chap, size));
    // Overlapping 95% intervals.
    CHECK(std::abs(m1 - m2) <= 1.96 * (se1 + se2) + 1e-9);
  }
}

TEST_CASE("chaperones with n = 2 behave like two sequential Gibbs updates") {
  ERDataset data;
  data.n = 2;
  data.L = 1;
  data.D = {2};
  data.x = {{0}, {0}};
  data.theta = empirical_theta(data);

  auto together_freq = [&](bool chaperones, uint64_t seed) {
    EscPartitionPrior prior(MuFamilyKind::ZtPoisson, {1.5}, false);
    MCMCConfig cfg;
    cfg.iterations = 30000;
    cfg.burn_in = 2000;
    cfg.seed = seed;
    cfg.use_chaperones = chaperones;
    cfg.chaperone_moves_per_iter = 1;
    cfg.update_beta = false;
    cfg.beta_init = {0.1};
    const ERResult r = run_mcmc(data, prior, cfg);
    double together = 0.0;
    for (int k : r.kplus) together += (k == 1);
    return together / static_cast<double>(r.kplus.size());
  };
  const double f_plain = together_freq(false, 5);
  const double f_chap = together_freq(true, 6);
  CHECK(std::abs(f_plain - f_chap) < 0.02);
}
