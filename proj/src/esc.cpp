#include "pbal/esc.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pbal/mathutil.hpp"

namespace pbal {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

const char* to_string(MuFamilyKind k) {
  switch (k) {
    case MuFamilyKind::ShiftedBinomial: return "shifted-binomial";
    case MuFamilyKind::ZtBinomial: return "zt-binomial";
    case MuFamilyKind::ZtPoisson: return "zt-poisson";
    case MuFamilyKind::ZtNegBinomial: return "zt-negbinomial";
    case MuFamilyKind::Logarithmic: return "logarithmic";
  }
  return "?";
}

namespace {

void check_prob(double p, const char* where) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument(std::string(where) + ": p must be in (0,1)");
}

// Sanity check that the pmf integrates to 1 (catches formula slips early).
void check_normalized(const MuFamily& f) {
  double total = 0.0;
  double last = 1.0;
  const int cap = f.finite_support() ? f.support_max() : 500000;
  int s = 1;
  for (; s <= cap; ++s) {
    last = f.pmf(s);
    total += last;
    if (!f.finite_support() && s > 16 && last < 1e-19) break;
  }
  if (!f.finite_support() && s > cap && last > 1e-16)
    return;  // extremely slow tail; skip the strict check
  // lgamma-backed terms carry ~ulp(log magnitude) relative error each, so
  // the achievable agreement degrades slowly with the support size.
  const double tol = 1e-12 + 5e-15 * std::min(s, cap);
  if (std::abs(total - 1.0) > tol)
    throw std::logic_error("MuFamily: pmf does not sum to 1: " +
                           f.describe());
}

}  // namespace

MuFamily MuFamily::shifted_binomial(int N, double p) {
  if (N < 1) throw std::invalid_argument("shifted_binomial: N must be >= 1");
  check_prob(p, "shifted_binomial");
  MuFamily f;
  f.kind_ = MuFamilyKind::ShiftedBinomial;
  f.params_ = {{"N", static_cast<double>(N)}, {"p", p}};
  f.support_max_ = N + 1;
  check_normalized(f);
  return f;
}

MuFamily MuFamily::zt_binomial(int N, double p) {
  if (N < 1) throw std::invalid_argument("zt_binomial: N must be >= 1");
  check_prob(p, "zt_binomial");
  MuFamily f;
  f.kind_ = MuFamilyKind::ZtBinomial;
  f.params_ = {{"N", static_cast<double>(N)}, {"p", p}};
  f.support_max_ = N;
  check_normalized(f);
  return f;
}

MuFamily MuFamily::zt_poisson(double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("zt_poisson: lambda must be > 0");
  MuFamily f;
  f.kind_ = MuFamilyKind::ZtPoisson;
  f.params_ = {{"lambda", lambda}};
  check_normalized(f);
  return f;
}

MuFamily MuFamily::zt_neg_binomial(double r, double p) {
  if (!(r > -1.0) || r == 0.0)
    throw std::invalid_argument("zt_neg_binomial: need r > -1 and r != 0");
  check_prob(p, "zt_neg_binomial");
  MuFamily f;
  f.kind_ = MuFamilyKind::ZtNegBinomial;
  f.params_ = {{"r", r}, {"p", p}};
  check_normalized(f);
  return f;
}

MuFamily MuFamily::logarithmic(double p) {
  check_prob(p, "logarithmic");
  MuFamily f;
  f.kind_ = MuFamilyKind::Logarithmic;
  f.params_ = {{"p", p}};
  check_normalized(f);
  return f;
}

MuFamily MuFamily::geometric(double p) {
  check_prob(p, "geometric");
  MuFamily f = zt_neg_binomial(1.0, 1.0 - p);
  // The success probability is the normalizing constant; kept verbatim so
  // the closed form can return it without a 1-p round trip.
  f.params_["success_p"] = p;
  return f;
}

double MuFamily::log_pmf(int s) const {
  if (s < 1) return kNegInf;
  if (s > support_max_) return kNegInf;
  switch (kind_) {
    case MuFamilyKind::ShiftedBinomial: {
      const int N = static_cast<int>(params_.at("N"));
      const double p = params_.at("p");
      return log_binomial(N, s - 1) + (s - 1) * std::log(p) +
             (N - s + 1) * std::log1p(-p);
    }
    case MuFamilyKind::ZtBinomial: {
      const int N = static_cast<int>(params_.at("N"));
      const double p = params_.at("p");
      // 1 - (1-p)^N, computed from N log(1-p).
      const double log_norm = log1mexp(-static_cast<double>(N) * std::log1p(-p));
      return log_binomial(N, s) + s * std::log(p) + (N - s) * std::log1p(-p) -
             log_norm;
    }
    case MuFamilyKind::ZtPoisson: {
      const double lambda = params_.at("lambda");
      return s * std::log(lambda) - lambda - log_factorial(s) -
             log1mexp(lambda);
    }
    case MuFamilyKind::ZtNegBinomial: {
      const double r = params_.at("r");
      const double p = params_.at("p");
      // |C(s+r-1, s)| = |prod_{i=0}^{s-1} (r+i)| / s!; the overall sign of
      // the pmf is positive for every admissible r (one negative factor pairs
      // with the negative normalizer when r < 0).
      double log_coef = -log_factorial(s);
      for (int i = 0; i < s; ++i) log_coef += std::log(std::abs(r + i));
      const double log_norm = std::log(std::abs(1.0 - std::pow(1.0 - p, r)));
      return log_coef + r * std::log1p(-p) + s * std::log(p) - log_norm;
    }
    case MuFamilyKind::Logarithmic: {
      const double p = params_.at("p");
      return s * std::log(p) - std::log(static_cast<double>(s)) -
             std::log(-std::log1p(-p));
    }
  }
  return kNegInf;
}

double MuFamily::pmf(int s) const {
  const double lp = log_pmf(s);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

double MuFamily::log_weight_ratio(int s) const {
  if (s < 1)
    throw std::invalid_argument("log_weight_ratio: s must be >= 1");
  if (s + 1 > support_max_) return kNegInf;
  switch (kind_) {
    case MuFamilyKind::ShiftedBinomial: {
      const double N = params_.at("N");
      const double p = params_.at("p");
      return std::log((s + 1.0) * (N - s + 1.0) * p / (s * (1.0 - p)));
    }
    case MuFamilyKind::ZtBinomial: {
      const double N = params_.at("N");
      const double p = params_.at("p");
      return std::log((N - s) * p / (1.0 - p));
    }
    case MuFamilyKind::ZtPoisson:
      return std::log(params_.at("lambda"));
    case MuFamilyKind::ZtNegBinomial:
      return std::log(params_.at("p") * (s + params_.at("r")));
    case MuFamilyKind::Logarithmic:
      return std::log(params_.at("p") * s);
  }
  return kNegInf;
}

std::string MuFamily::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(";
  bool first = true;
  for (const auto& [k, v] : params_) {
    if (!first) os << ",";
    os << k << "=" << v;
    first = false;
  }
  os << ")";
  return os.str();
}

double mu_pmf(const MuFamily& f, int s) {
  if (s < 1) throw std::invalid_argument("mu_pmf: s must be >= 1");
  return f.pmf(s);
}

// ---------------------------------------------------------------------------
// Stirling numbers

std::vector<double> log_stirling2_row(int n) {
  if (n < 0) throw std::invalid_argument("log_stirling2_row: n < 0");
  std::vector<double> row{0.0};  // S2(0,0) = 1
  for (int m = 1; m <= n; ++m) {
    std::vector<double> next(static_cast<size_t>(m) + 1, kNegInf);
    for (int k = 1; k <= m; ++k) {
      const double keep =
          (k < m) ? std::log(static_cast<double>(k)) + row[static_cast<size_t>(k)]
                  : kNegInf;
      const double add = row[static_cast<size_t>(k - 1)];
      next[static_cast<size_t>(k)] = log_sum_exp(keep, add);
    }
    row = std::move(next);
  }
  return row;
}

std::vector<double> log_stirling1_abs_row(int n) {
  if (n < 0) throw std::invalid_argument("log_stirling1_abs_row: n < 0");
  std::vector<double> row{0.0};  // |S1|(0,0) = 1
  for (int m = 1; m <= n; ++m) {
    std::vector<double> next(static_cast<size_t>(m) + 1, kNegInf);
    for (int k = 1; k <= m; ++k) {
      const double keep =
          (k < m) ? std::log(static_cast<double>(m - 1)) + row[static_cast<size_t>(k)]
                  : kNegInf;
      const double add = row[static_cast<size_t>(k - 1)];
      next[static_cast<size_t>(k)] = log_sum_exp(keep, add);
    }
    row = std::move(next);
  }
  return row;
}

double log_stirling2(int n, int k) {
  if (n < 0 || k < 0 || k > n) return kNegInf;
  return log_stirling2_row(n)[static_cast<size_t>(k)];
}

double log_stirling1_abs(int n, int k) {
  if (n < 0 || k < 0 || k > n) return kNegInf;
  return log_stirling1_abs_row(n)[static_cast<size_t>(k)];
}

BigInt stirling2_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  std::vector<BigInt> row{1};
  for (int m = 1; m <= n; ++m) {
    std::vector<BigInt> next(static_cast<size_t>(m) + 1, 0);
    for (int j = 1; j <= m; ++j) {
      next[static_cast<size_t>(j)] = row[static_cast<size_t>(j - 1)];
      if (j < m) next[static_cast<size_t>(j)] += j * row[static_cast<size_t>(j)];
    }
    row = std::move(next);
  }
  return row[static_cast<size_t>(k)];
}

BigInt stirling1_abs_exact(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  std::vector<BigInt> row{1};
  for (int m = 1; m <= n; ++m) {
    std::vector<BigInt> next(static_cast<size_t>(m) + 1, 0);
    for (int j = 1; j <= m; ++j) {
      next[static_cast<size_t>(j)] = row[static_cast<size_t>(j - 1)];
      if (j < m) next[static_cast<size_t>(j)] += (m - 1) * row[static_cast<size_t>(j)];
    }
    row = std::move(next);
  }
  return row[static_cast<size_t>(k)];
}

// ---------------------------------------------------------------------------
// Normalizing constants

namespace {

BigInt big_binomial(long long a, long long b) {
  if (b < 0 || b > a) return 0;
  b = std::min(b, a - b);
  BigInt num = 1, den = 1;
  for (long long i = 0; i < b; ++i) {
    num *= (a - i);
    den *= (i + 1);
  }
  return num / den;
}

double log_from_bigfloat(const BigFloat& x, const char* where) {
  if (x <= 0)
    throw PrecisionError(std::string(where) +
                         ": alternating series collapsed to a nonpositive value");
  return static_cast<double>(boost::multiprecision::log(x));
}

void guard_cancellation(const BigFloat& max_abs, const BigFloat& total,
                        const char* where) {
  if (total <= 0)
    throw PrecisionError(std::string(where) +
                         ": alternating series collapsed to a nonpositive value");
  const BigFloat ratio = max_abs / total;
  if (ratio > BigFloat("1e85"))
    throw PrecisionError(
        std::string(where) +
        ": cancellation exceeds the precision budget; use the convolution "
        "route instead");
}

double closed_shifted_binomial(int N, double p, int n) {
  const int kmin = (n + N) / (N + 1);  // ceil(n / (N+1))
  double acc = kNegInf;
  for (int k = kmin; k <= n; ++k) {
    const long long trials = static_cast<long long>(N) * k;
    const double term = log_binomial(trials, n - k) +
                        (n - k) * std::log(p) +
                        (trials - n + k) * std::log1p(-p);
    acc = log_sum_exp(acc, term);
  }
  return acc;
}

double closed_zt_binomial(int N, double p, int n) {
  const BigFloat bp(p);
  const BigFloat q = 1 - bp;
  const BigFloat norm = 1 - boost::multiprecision::pow(q, N);  // 1-(1-p)^N
  const BigFloat p_pow_n = boost::multiprecision::pow(bp, n);

  // C(N i, n) reused across the outer sum.
  std::vector<BigFloat> cni(static_cast<size_t>(n) + 1);
  for (int i = 1; i <= n; ++i)
    cni[static_cast<size_t>(i)] =
        BigFloat(big_binomial(static_cast<long long>(N) * i, n));

  BigFloat total = 0, max_abs = 0;
  const int kmin = (n + N - 1) / N;  // smaller k only contributes zeros
  for (int k = kmin; k <= n; ++k) {
    const BigFloat factor =
        p_pow_n * boost::multiprecision::pow(q, static_cast<long long>(N) * k - n) /
        boost::multiprecision::pow(norm, k);
    for (int i = 1; i <= k; ++i) {
      if (cni[static_cast<size_t>(i)] == 0) continue;
      BigFloat term = BigFloat(big_binomial(k, i)) * cni[static_cast<size_t>(i)] * factor;
      if ((k - i) % 2 == 1) term = -term;
      total += term;
      const BigFloat mag = boost::multiprecision::abs(term);
      if (mag > max_abs) max_abs = mag;
    }
  }
  guard_cancellation(max_abs, total, "closed_zt_binomial");
  return log_from_bigfloat(total, "closed_zt_binomial");
}

double closed_zt_poisson(double lambda, int n) {
  const std::vector<double> s2 = log_stirling2_row(n);
  const double log_em1 = log_expm1(lambda);
  double acc = kNegInf;
  for (int k = 1; k <= n; ++k) {
    const double term = log_factorial(k) + n * std::log(lambda) -
                        k * log_em1 - log_factorial(n) +
                        s2[static_cast<size_t>(k)];
    acc = log_sum_exp(acc, term);
  }
  return acc;
}

double closed_zt_neg_binomial(double r, double p, int n,
                              const std::map<std::string, double>& params) {
  // r = 1: mu_s = (1-p) p^{s-1}, and the k-fold sums telescope to
  // sum_k C(n-1,k-1)(1-p)^k p^{n-k} = 1-p for every n.
  if (r == 1.0) {
    const auto it = params.find("success_p");
    if (it != params.end()) return std::log(it->second);
    return std::log1p(-p);
  }

  const BigFloat br(r), bp(p);
  const BigFloat q = 1 - bp;
  // (1-p)^{-r} - 1; negative when r < 0. Powers of a negative base are
  // handled with an explicit sign to stay inside pow's domain.
  const BigFloat denom_base = boost::multiprecision::pow(q, BigFloat(-br)) - 1;
  const int denom_sign = denom_base < 0 ? -1 : 1;
  const BigFloat denom_abs = boost::multiprecision::abs(denom_base);
  const BigFloat p_pow_n = boost::multiprecision::pow(bp, n);

  // C(n + r i - 1, n) = prod_{m=0}^{n-1} (r i + m) / n!, signed.
  std::vector<BigFloat> cri(static_cast<size_t>(n) + 1);
  BigFloat nfact = 1;
  for (int m = 2; m <= n; ++m) nfact *= m;
  for (int i = 1; i <= n; ++i) {
    BigFloat prod = 1;
    for (int m = 0; m < n; ++m) prod *= (br * i + m);
    cri[static_cast<size_t>(i)] = prod / nfact;
  }

  BigFloat total = 0, max_abs = 0;
  for (int k = 1; k <= n; ++k) {
    BigFloat factor = p_pow_n / boost::multiprecision::pow(denom_abs, k);
    if (denom_sign < 0 && k % 2 == 1) factor = -factor;
    for (int i = 1; i <= k; ++i) {
      BigFloat term = BigFloat(big_binomial(k, i)) * cri[static_cast<size_t>(i)] * factor;
      if ((k - i) % 2 == 1) term = -term;
      total += term;
      const BigFloat mag = boost::multiprecision::abs(term);
      if (mag > max_abs) max_abs = mag;
    }
  }
  guard_cancellation(max_abs, total, "closed_zt_neg_binomial");
  return log_from_bigfloat(total, "closed_zt_neg_binomial");
}

double closed_logarithmic(double p, int n) {
  const std::vector<double> s1 = log_stirling1_abs_row(n);
  const double log_z = std::log(-std::log1p(-p));
  double acc = kNegInf;
  for (int k = 1; k <= n; ++k) {
    const double term = log_factorial(k) + n * std::log(p) -
                        log_factorial(n) - k * log_z +
                        s1[static_cast<size_t>(k)];
    acc = log_sum_exp(acc, term);
  }
  return acc;
}

}  // namespace

double log_prob_en_closed(const MuFamily& f, int n) {
  if (n < 1) throw std::invalid_argument("log_prob_en_closed: n < 1");
  const auto& P = f.params();
  switch (f.kind()) {
    case MuFamilyKind::ShiftedBinomial:
      return closed_shifted_binomial(static_cast<int>(P.at("N")), P.at("p"), n);
    case MuFamilyKind::ZtBinomial:
      return closed_zt_binomial(static_cast<int>(P.at("N")), P.at("p"), n);
    case MuFamilyKind::ZtPoisson:
      return closed_zt_poisson(P.at("lambda"), n);
    case MuFamilyKind::ZtNegBinomial:
      return closed_zt_neg_binomial(P.at("r"), P.at("p"), n, P);
    case MuFamilyKind::Logarithmic:
      return closed_logarithmic(P.at("p"), n);
  }
  throw std::logic_error("log_prob_en_closed: unknown family");
}

namespace {

double dp_from_log_pmf(std::span<const double> log_mu, int n) {
  // c[k][m] = sum_s mu_s c[k-1][m-s]; answer is sum_k c[k][n], all in logs.
  const int smax = static_cast<int>(log_mu.size());
  std::vector<double> prev(static_cast<size_t>(n) + 1, kNegInf);
  prev[0] = 0.0;
  double answer = kNegInf;
  for (int k = 1; k <= n; ++k) {
    std::vector<double> cur(static_cast<size_t>(n) + 1, kNegInf);
    for (int m = k; m <= n; ++m) {
      double acc = kNegInf;
      const int s_hi = std::min(m, smax);
      for (int s = 1; s <= s_hi; ++s) {
        const double lm = log_mu[static_cast<size_t>(s - 1)];
        if (lm == kNegInf) continue;
        const double below = prev[static_cast<size_t>(m - s)];
        if (below == kNegInf) continue;
        acc = log_sum_exp(acc, lm + below);
      }
      cur[static_cast<size_t>(m)] = acc;
    }
    answer = log_sum_exp(answer, cur[static_cast<size_t>(n)]);
    prev = std::move(cur);
  }
  return answer;
}

}  // namespace

double log_prob_en_dp(const MuFamily& f, int n) {
  if (n < 1) throw std::invalid_argument("log_prob_en_dp: n < 1");
  // Only sizes 1..n can appear in a sum hitting n.
  std::vector<double> log_mu(static_cast<size_t>(n));
  for (int s = 1; s <= n; ++s)
    log_mu[static_cast<size_t>(s - 1)] = f.log_pmf(s);
  return dp_from_log_pmf(log_mu, n);
}

double log_prob_en_dp(std::span<const double> pmf, int n) {
  if (n < 1) throw std::invalid_argument("log_prob_en_dp: n < 1");
  if (pmf.empty() || !(pmf[0] > 0.0))
    throw std::invalid_argument("log_prob_en_dp: need mu_1 > 0");
  std::vector<double> log_mu(static_cast<size_t>(n), kNegInf);
  for (int s = 1; s <= n && s <= static_cast<int>(pmf.size()); ++s) {
    if (pmf[static_cast<size_t>(s - 1)] < 0.0)
      throw std::invalid_argument("log_prob_en_dp: negative pmf entry");
    if (pmf[static_cast<size_t>(s - 1)] > 0.0)
      log_mu[static_cast<size_t>(s - 1)] =
          std::log(pmf[static_cast<size_t>(s - 1)]);
  }
  return dp_from_log_pmf(log_mu, n);
}

// ---------------------------------------------------------------------------
// ESCModel

struct ESCModel::Cache {
  std::mutex mu;
  std::unordered_map<int, double> log_pen;
};

ESCModel::ESCModel(MuFamily mu)
    : mu_(std::move(mu)), cache_(std::make_shared<Cache>()) {}

double ESCModel::log_prob_en(int n) const {
  if (n < 1) throw std::invalid_argument("ESCModel::log_prob_en: n < 1");
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->log_pen.find(n);
    if (it != cache_->log_pen.end()) return it->second;
  }
  const double value = log_prob_en_dp(mu_, n);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->log_pen.emplace(n, value);
  return value;
}

double ESCModel::log_eppf(const IntegerPartition& shape) const {
  double acc = log_factorial(shape.k()) - log_factorial(shape.n());
  for (int part : shape.parts()) {
    const double lm = mu_.log_pmf(part);
    if (lm == kNegInf) return kNegInf;  // part outside the support of mu
    acc += log_factorial(part) + lm;
  }
  return acc - log_prob_en(shape.n());
}

GibbsModel ESCModel::to_gibbs(int precompute_n) const {
  for (int m = 1; m <= precompute_n; ++m) log_prob_en(m);
  const ESCModel self = *this;  // shares the normalizer cache
  const double log_mu1 = mu_.log_pmf(1);
  auto log_v = [self, log_mu1](int n, int k) {
    return k * log_mu1 + log_factorial(k) - log_factorial(n) -
           self.log_prob_en(n);
  };
  return GibbsModel(w_from_mu(mu_), log_v, GibbsFamily::EscDerived,
                    mu_.params(), "esc(" + mu_.describe() + ")");
}

double esc_log_eppf(const ESCModel& m, const IntegerPartition& shape) {
  return m.log_eppf(shape);
}

GibbsModel esc_to_gibbs(const ESCModel& m, int n) { return m.to_gibbs(n); }

// ---------------------------------------------------------------------------
// Balancedness of mu

WSequence w_from_mu(const MuFamily& f) {
  const double log_mu1 = f.log_pmf(1);
  if (log_mu1 == kNegInf)
    throw std::invalid_argument("w_from_mu: mu_1 must be positive");
  auto fn = [f, log_mu1](int s) {
    const double lm = f.log_pmf(s);
    if (lm == kNegInf) return kNegInf;
    return log_factorial(s) + lm - log_mu1;
  };
  auto ratio = [f](int s) { return f.log_weight_ratio(s); };
  const int support =
      f.finite_support() ? f.support_max() : WSequence::kInfiniteSupport;
  return WSequence::from_log_fn(fn, support, ratio);
}

WSequence w_from_pmf(std::span<const double> pmf) {
  if (pmf.empty() || !(pmf[0] > 0.0))
    throw std::invalid_argument("w_from_pmf: need mu_1 > 0");
  std::vector<double> table(pmf.size());
  const double log_mu1 = std::log(pmf[0]);
  for (size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] < 0.0)
      throw std::invalid_argument("w_from_pmf: negative pmf entry");
    table[i] = pmf[i] > 0.0
                   ? log_factorial(static_cast<int>(i) + 1) +
                         std::log(pmf[i]) - log_mu1
                   : kNegInf;
  }
  return WSequence::from_log_table(std::move(table));
}

BalanceClass classify_mu(const MuFamily& f, int s_max) {
  const WSequence w = w_from_mu(f);
  const int horizon =
      f.finite_support() ? std::max(3, f.support_max() + 1) : s_max;
  return classify_balance(w, horizon);
}

BalanceClass classify_mu(std::span<const double> pmf) {
  const WSequence w = w_from_pmf(pmf);
  const int horizon = std::max(3, w.support_max() + 1);
  return classify_balance(w, horizon);
}

}  // namespace pbal
