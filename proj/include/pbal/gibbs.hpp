#pragma once

#include <climits>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbal/integer_partition.hpp"
#include "pbal/order.hpp"

namespace pbal {

// Weight sequence (W_s)_{s>=1} of a product-form EPPF, held in log space.
// W_1 = 1 is required. Finite-support sequences report the last positive
// index; an entry can be -inf inside a table (detected by the classifiers).
class WSequence {
 public:
  static constexpr int kInfiniteSupport = INT_MAX;

  // `log_ratio` is the optional closed form of log(W_{s+1}/W_s); supplying it
  // lets second differences cancel exactly instead of through log(s!)-sized
  // intermediates.
  static WSequence from_log_fn(std::function<double(int)> log_w,
                               int support_max = kInfiniteSupport,
                               std::function<double(int)> log_ratio = nullptr);
  // Table of log W_s for s = 1..m; trailing -inf entries are trimmed and the
  // sequence is zero beyond the table.
  static WSequence from_log_table(std::vector<double> log_w);
  static WSequence ones();  // W_s == 1 for all s

  double log_w(int s) const;
  bool finite_support() const { return support_max_ != kInfiniteSupport; }
  int support_max() const { return support_max_; }

  bool has_ratio() const { return static_cast<bool>(ratio_); }
  // log(W_{s+1}/W_s); requires W_s > 0. -inf when W_{s+1} = 0.
  double log_ratio(int s) const;

 private:
  WSequence() = default;
  std::function<double(int)> fn_;
  std::function<double(int)> ratio_;
  std::vector<double> table_;
  int support_max_ = kInfiniteSupport;
};

enum class GibbsFamily {
  TwoParameter,
  DirichletMultinomial,
  CouponCollector,
  NeutralMixture,
  MfmMixture,
  EscDerived,
  Custom,
};

const char* to_string(GibbsFamily f);

// Distribution of a component count K over {1, 2, ...}; the mixing law of
// the neutral and MFM families.
class CountDistribution {
 public:
  static CountDistribution dirac(int k);
  static CountDistribution shifted_poisson(double lambda);  // 1 + Poisson
  static CountDistribution from_pmf(std::vector<double> pmf_over_1_2_dots);

  double log_pmf(int k) const;
  int min_support() const { return min_support_; }
  int max_support() const { return max_support_; }  // INT_MAX when infinite
  // Index beyond which the pmf is nonincreasing; truncation heuristic.
  int tail_start() const { return tail_start_; }
  std::string describe() const { return describe_; }

 private:
  CountDistribution() = default;
  std::function<double(int)> log_pmf_;
  int min_support_ = 1;
  int max_support_ = INT_MAX;
  int tail_start_ = 1;
  std::string describe_;
};

// A Gibbs-form random partition model: EPPF(n_1..n_k) = V_{n,k} prod W_{n_j},
// with everything stored in log space. Immutable and cheap to copy.
class GibbsModel {
 public:
  GibbsModel(WSequence w, std::function<double(int, int)> log_v,
             GibbsFamily family, std::map<std::string, double> params,
             std::string label);

  double log_v(int n, int k) const;
  double log_w(int s) const { return w_.log_w(s); }
  const WSequence& w() const { return w_; }
  double log_eppf(const IntegerPartition& shape) const;

  GibbsFamily family() const { return family_; }
  const std::map<std::string, double>& params() const { return params_; }
  const std::string& label() const { return label_; }

 private:
  WSequence w_;
  std::function<double(int, int)> log_v_;
  GibbsFamily family_;
  std::map<std::string, double> params_;
  std::string label_;
};

// Ewens-Pitman two-parameter family. Admissible regimes:
//   sigma in [0,1) with theta > -sigma, or
//   sigma < 0 with theta = K|sigma| for some positive integer K.
GibbsModel two_parameter_model(double sigma, double theta);

// Convenience wrapper for the sigma < 0 regime (K components, parameter
// gamma = |sigma| of the symmetric Dirichlet weights).
GibbsModel dirichlet_multinomial_model(int K, double gamma);

// sigma = -infinity member: V_{n,k} = K(K-1)...(K-k+1)/K^n, W_s == 1.
GibbsModel coupon_collector_model(int K);

// Balance-neutral family: V_{n,k}(q) = sum_{K>=k} q(K) K(K-1)...(K-k+1)/K^n,
// W_s == 1. V tables are memoized internally.
GibbsModel neutral_mixture_model(const CountDistribution& q);

// Mixture of finite mixtures: mixture over K of the Dirichlet-multinomial
// member with parameter gamma.
GibbsModel mfm_model(const CountDistribution& q, double gamma);

// One term/series evaluation of the neutral V; truncation stops once the
// remaining tail is provably below eps relative to the running sum.
double neutral_log_v(const CountDistribution& q, int n, int k,
                     double eps = 1e-15);

// Unnormalized reallocation weights for the next datapoint given current
// cluster sizes (sum = n): (f(n_1),...,f(n_k), g(n,k)) with
// f(s) = W_{s+1}/W_s and g = V_{n+1,k+1}/V_{n+1,k}.
std::vector<double> reallocation_weights(const GibbsModel& m,
                                         std::span<const int> counts, int n);

struct ProjectivityReport {
  bool ok = true;
  // First shape (smallest n, enumeration order) violating the addition rule.
  std::optional<IntegerPartition> first_failure;
  double worst_rel_err = 0.0;
};

// Checks the addition rule p^(n)(shape) = sum_j p^(n+1)(shape with part j
// incremented) + p^(n+1)(shape, 1) for every shape with n <= n_max, at
// relative tolerance tol.
ProjectivityReport check_projectivity(const GibbsModel& m, int n_max,
                                      double tol);

// Log EPPF of a finite mixture of Gibbs models; weights must sum to 1.
// Continuous mixing measures enter via caller-supplied quadrature nodes.
double mixture_log_eppf(
    const std::vector<std::pair<GibbsModel, double>>& components,
    const IntegerPartition& shape);

// Enumeration guard shared by spectrum exports and exhaustive checks.
inline constexpr int kMaxSpectrumN = 13;

struct SpectrumRow {
  IntegerPartition shape;
  int k;
  double shannon;
  double gini_simpson;
  double log_eppf;
  BigInt multiplicity;
};

// One row per integer partition of n (enumeration order), with diversity
// indices and the shape count.
std::vector<SpectrumRow> eppf_spectrum(const GibbsModel& m, int n);

// Exact slope (log p(to) - log p(from)) / (H(to) - H(from)) along a
// (**)-covering pair; throws std::invalid_argument otherwise.
double slope_ratio(const GibbsModel& m, const IntegerPartition& from,
                   const IntegerPartition& to);

}  // namespace pbal
