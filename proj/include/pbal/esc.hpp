#pragma once

#include <climits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pbal/balance.hpp"
#include "pbal/gibbs.hpp"
#include "pbal/integer_partition.hpp"

namespace pbal {

enum class MuFamilyKind {
  ShiftedBinomial,   // 1 + Binomial(N, p), support {1..N+1}
  ZtBinomial,        // zero-truncated Binomial(N, p), N fixed, support {1..N}
  ZtPoisson,         // zero-truncated Poisson(lambda)
  ZtNegBinomial,     // zero-truncated extended negative binomial (r, p), r > -1, r != 0
  Logarithmic,       // Logarithmic(p)
};

const char* to_string(MuFamilyKind k);

// A cluster-size distribution mu on {1, 2, ...} with mu_1 > 0. Construction
// validates parameter domains and checks that the pmf sums to 1.
class MuFamily {
 public:
  static MuFamily shifted_binomial(int N, double p);
  static MuFamily zt_binomial(int N, double p);
  static MuFamily zt_poisson(double lambda);
  static MuFamily zt_neg_binomial(double r, double p);
  static MuFamily logarithmic(double p);
  // Geometric in the success-probability convention, mu_s = p (1-p)^{s-1}:
  // the r = 1 negative-binomial member with its parameter flipped. Its
  // normalizing constant is exactly p at every n.
  static MuFamily geometric(double p);

  // log(s! mu_s) differences in closed form: log((s+1) mu_{s+1} / mu_s).
  double log_weight_ratio(int s) const;

  double pmf(int s) const;
  double log_pmf(int s) const;
  bool finite_support() const { return support_max_ != kInfinite; }
  int support_max() const { return support_max_; }

  MuFamilyKind kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }
  std::string describe() const;

  static constexpr int kInfinite = INT_MAX;

 private:
  MuFamily() = default;
  MuFamilyKind kind_ = MuFamilyKind::ZtPoisson;
  std::map<std::string, double> params_;
  int support_max_ = kInfinite;
};

double mu_pmf(const MuFamily& f, int s);

// log S2(n, k) and log |S1(n, k)| via the positive-term recurrences in log
// space; -inf when k > n or k < 0 (and for the (n>0, k=0) boundary).
double log_stirling2(int n, int k);
double log_stirling1_abs(int n, int k);
std::vector<double> log_stirling2_row(int n);      // entries k = 0..n
std::vector<double> log_stirling1_abs_row(int n);
BigInt stirling2_exact(int n, int k);
BigInt stirling1_abs_exact(int n, int k);

// log P(E_n | mu) where E_n is the event that some k-fold sum of iid mu draws
// hits n exactly. Closed-form route (per-family series; the alternating-sign
// families are evaluated in 100-digit floats with a cancellation guard that
// throws PrecisionError).
double log_prob_en_closed(const MuFamily& f, int n);

// Independent dynamic-programming route over k-fold convolutions; the oracle
// for the closed forms and the default normalizer for ESC models.
double log_prob_en_dp(const MuFamily& f, int n);
// Same for a raw truncated pmf over sizes 1..m.
double log_prob_en_dp(std::span<const double> pmf, int n);

// ESC random partition model with a fixed mu:
//   p(n_1..n_k) = (1 / P(E_n)) (k!/n!) prod n_j! mu_{n_j}.
// Normalizer values are cached per n behind a lock; copies share the cache.
class ESCModel {
 public:
  explicit ESCModel(MuFamily mu);

  const MuFamily& mu() const { return mu_; }
  double log_prob_en(int n) const;
  double log_eppf(const IntegerPartition& shape) const;

  // Gibbs-form view: W_s = s! mu_s / mu_1 and V_{n,k} = mu_1^k k!/(n! P(E_n)),
  // valid at every n (each n carries its own normalizer). `precompute_n`
  // warms the normalizer cache up to that n.
  GibbsModel to_gibbs(int precompute_n = 0) const;

 private:
  struct Cache;
  MuFamily mu_;
  std::shared_ptr<Cache> cache_;
};

double esc_log_eppf(const ESCModel& m, const IntegerPartition& shape);
GibbsModel esc_to_gibbs(const ESCModel& m, int n);

// W sequence induced by mu: W_s = s! mu_s / mu_1.
WSequence w_from_mu(const MuFamily& f);
WSequence w_from_pmf(std::span<const double> pmf);  // raw pmf over s = 1..m

// Balancedness of the ESC model driven by mu (equivalently, of W above).
BalanceClass classify_mu(const MuFamily& f, int s_max = 200);
// Classification for a user-supplied truncated pmf (covers size laws without
// implemented normalizing constants).
BalanceClass classify_mu(std::span<const double> pmf);

}  // namespace pbal
