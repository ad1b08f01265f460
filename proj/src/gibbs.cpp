#include "pbal/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "pbal/mathutil.hpp"

namespace pbal {

// ---------------------------------------------------------------------------
// WSequence

WSequence WSequence::from_log_fn(std::function<double(int)> log_w,
                                 int support_max,
                                 std::function<double(int)> log_ratio) {
  WSequence w;
  w.fn_ = std::move(log_w);
  w.ratio_ = std::move(log_ratio);
  w.support_max_ = support_max;
  if (std::abs(w.log_w(1)) > 1e-12)
    throw std::invalid_argument("WSequence: W_1 must equal 1");
  return w;
}

WSequence WSequence::from_log_table(std::vector<double> log_w) {
  while (!log_w.empty() && log_w.back() == kNegInf) log_w.pop_back();
  if (log_w.empty())
    throw std::invalid_argument("WSequence: empty support");
  if (std::abs(log_w.front()) > 1e-12)
    throw std::invalid_argument("WSequence: W_1 must equal 1");
  WSequence w;
  w.support_max_ = static_cast<int>(log_w.size());
  w.table_ = std::move(log_w);
  return w;
}

WSequence WSequence::ones() {
  return from_log_fn([](int) { return 0.0; }, kInfiniteSupport,
                     [](int) { return 0.0; });
}

double WSequence::log_w(int s) const {
  if (s < 1) throw std::invalid_argument("WSequence::log_w: s must be >= 1");
  if (!table_.empty()) {
    if (s > static_cast<int>(table_.size())) return kNegInf;
    return table_[static_cast<size_t>(s - 1)];
  }
  if (s > support_max_) return kNegInf;
  return fn_(s);
}

double WSequence::log_ratio(int s) const {
  if (s < 1) throw std::invalid_argument("WSequence::log_ratio: s must be >= 1");
  if (ratio_) {
    if (s >= support_max_) return kNegInf;
    return ratio_(s);
  }
  return log_w(s + 1) - log_w(s);
}

// ---------------------------------------------------------------------------
// CountDistribution

CountDistribution CountDistribution::dirac(int k) {
  if (k < 1) throw std::invalid_argument("CountDistribution::dirac: k < 1");
  CountDistribution q;
  q.log_pmf_ = [k](int j) { return j == k ? 0.0 : kNegInf; };
  q.min_support_ = k;
  q.max_support_ = k;
  q.tail_start_ = k;
  q.describe_ = "dirac:" + std::to_string(k);
  return q;
}

CountDistribution CountDistribution::shifted_poisson(double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("CountDistribution::shifted_poisson: lambda <= 0");
  CountDistribution q;
  q.log_pmf_ = [lambda](int k) {
    if (k < 1) return kNegInf;
    const int j = k - 1;  // Poisson mass at j
    return j * std::log(lambda) - lambda - log_factorial(j);
  };
  q.min_support_ = 1;
  q.max_support_ = INT_MAX;
  q.tail_start_ = 2 + static_cast<int>(std::ceil(lambda));
  std::ostringstream os;
  os << "shifted-poisson:" << lambda;
  q.describe_ = os.str();
  return q;
}

CountDistribution CountDistribution::from_pmf(std::vector<double> pmf) {
  if (pmf.empty())
    throw std::invalid_argument("CountDistribution::from_pmf: empty pmf");
  double total = 0.0;
  for (double p : pmf) {
    if (p < 0.0) throw std::invalid_argument("CountDistribution: negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("CountDistribution: pmf must sum to 1");
  auto table = std::make_shared<std::vector<double>>(std::move(pmf));
  CountDistribution q;
  q.log_pmf_ = [table](int k) {
    if (k < 1 || k > static_cast<int>(table->size())) return kNegInf;
    const double p = (*table)[static_cast<size_t>(k - 1)];
    return p > 0.0 ? std::log(p) : kNegInf;
  };
  int mn = 1;
  while (mn <= static_cast<int>(table->size()) &&
         (*table)[static_cast<size_t>(mn - 1)] == 0.0)
    ++mn;
  q.min_support_ = mn;
  q.max_support_ = static_cast<int>(table->size());
  q.tail_start_ = static_cast<int>(
      std::max_element(table->begin(), table->end()) - table->begin() + 1);
  q.describe_ = "pmf[" + std::to_string(table->size()) + "]";
  return q;
}

double CountDistribution::log_pmf(int k) const { return log_pmf_(k); }

// ---------------------------------------------------------------------------
// GibbsModel

const char* to_string(GibbsFamily f) {
  switch (f) {
    case GibbsFamily::TwoParameter: return "two-parameter";
    case GibbsFamily::DirichletMultinomial: return "dirichlet-multinomial";
    case GibbsFamily::CouponCollector: return "coupon-collector";
    case GibbsFamily::NeutralMixture: return "neutral-mixture";
    case GibbsFamily::MfmMixture: return "mfm";
    case GibbsFamily::EscDerived: return "esc";
    case GibbsFamily::Custom: return "custom";
  }
  return "?";
}

GibbsModel::GibbsModel(WSequence w, std::function<double(int, int)> log_v,
                       GibbsFamily family, std::map<std::string, double> params,
                       std::string label)
    : w_(std::move(w)),
      log_v_(std::move(log_v)),
      family_(family),
      params_(std::move(params)),
      label_(std::move(label)) {
  if (std::abs(log_v_(1, 1)) > 1e-12)
    throw std::invalid_argument("GibbsModel: V_{1,1} must equal 1");
}

double GibbsModel::log_v(int n, int k) const {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("GibbsModel::log_v: need 1 <= k <= n");
  return log_v_(n, k);
}

double GibbsModel::log_eppf(const IntegerPartition& shape) const {
  double acc = log_v(shape.n(), shape.k());
  for (int part : shape.parts()) {
    if (acc == kNegInf) return kNegInf;
    acc += w_.log_w(part);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Families

namespace {

// log prod_{i=1}^{k-1} (theta + i sigma), with a zero factor mapping to -inf.
double log_rising_numerator(double sigma, double theta, int k) {
  double acc = 0.0;
  for (int i = 1; i <= k - 1; ++i) {
    const double factor = theta + i * sigma;
    if (factor <= 0.0) {
      // Admissible parameters make a nonpositive factor an exact zero
      // (theta = K|sigma| with k - 1 > K); treat as probability zero.
      return kNegInf;
    }
    acc += std::log(factor);
  }
  return acc;
}

double log_theta_denominator(double theta, int n) {
  double acc = 0.0;
  for (int i = 1; i <= n - 1; ++i) acc += std::log(theta + i);
  return acc;
}

// log of K(K-1)...(K-k+1); -inf when k > K.
double log_falling(int K, int k) {
  if (k > K) return kNegInf;
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::log(static_cast<double>(K - i));
  return acc;
}

struct VCache {
  std::mutex mu;
  std::unordered_map<uint64_t, double> map;
};

uint64_t nk_key(int n, int k) {
  return (static_cast<uint64_t>(n) << 32) | static_cast<uint64_t>(k);
}

}  // namespace

GibbsModel two_parameter_model(double sigma, double theta) {
  const bool regime_a = sigma >= 0.0 && sigma < 1.0 && theta > -sigma;
  bool regime_b = false;
  if (sigma < 0.0 && std::isfinite(sigma)) {
    const double K = theta / (-sigma);
    regime_b = K > 0.5 && std::abs(K - std::round(K)) < 1e-9;
  }
  if (!regime_a && !regime_b)
    throw std::invalid_argument(
        "two_parameter_model: need sigma in [0,1) with theta > -sigma, or "
        "sigma < 0 with theta = K|sigma| for integer K");

  WSequence w = WSequence::from_log_fn(
      [sigma](int s) {
        return std::lgamma(s - sigma) - std::lgamma(1.0 - sigma);
      },
      WSequence::kInfiniteSupport,
      [sigma](int s) { return std::log(s - sigma); });
  auto log_v = [sigma, theta](int n, int k) {
    return log_rising_numerator(sigma, theta, k) -
           log_theta_denominator(theta, n);
  };
  std::ostringstream os;
  os << "two-parameter(sigma=" << sigma << ",theta=" << theta << ")";
  return GibbsModel(std::move(w), log_v, GibbsFamily::TwoParameter,
                    {{"sigma", sigma}, {"theta", theta}}, os.str());
}

GibbsModel dirichlet_multinomial_model(int K, double gamma) {
  if (K < 1 || !(gamma > 0.0))
    throw std::invalid_argument(
        "dirichlet_multinomial_model: need K >= 1 and gamma > 0");
  GibbsModel base = two_parameter_model(-gamma, K * gamma);
  std::ostringstream os;
  os << "dirichlet-multinomial(K=" << K << ",gamma=" << gamma << ")";
  return GibbsModel(base.w(),
                    [base](int n, int k) { return base.log_v(n, k); },
                    GibbsFamily::DirichletMultinomial,
                    {{"K", static_cast<double>(K)}, {"gamma", gamma}},
                    os.str());
}

GibbsModel coupon_collector_model(int K) {
  if (K < 1) throw std::invalid_argument("coupon_collector_model: K < 1");
  auto log_v = [K](int n, int k) {
    const double lf = log_falling(K, k);
    if (lf == kNegInf) return kNegInf;
    return lf - n * std::log(static_cast<double>(K));
  };
  return GibbsModel(WSequence::ones(), log_v, GibbsFamily::CouponCollector,
                    {{"K", static_cast<double>(K)}},
                    "coupon-collector(K=" + std::to_string(K) + ")");
}

double neutral_log_v(const CountDistribution& q, int n, int k, double eps) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("neutral_log_v: need 1 <= k <= n");
  const int k_start = std::max(k, q.min_support());
  const int k_end = q.max_support();
  double acc = kNegInf;
  for (int K = k_start; K <= k_end; ++K) {
    const double lq = q.log_pmf(K);
    if (lq == kNegInf) {
      if (K > q.tail_start() && acc != kNegInf) break;
      continue;
    }
    const double term = lq + log_falling(K, k) - n * std::log(static_cast<double>(K));
    acc = log_sum_exp(acc, term);
    // Beyond the pmf's mode both q and the K-dependent factor shrink, so the
    // remaining tail is bounded by a small multiple of max(term, q(K)).
    if (K > q.tail_start() && K > 2 * k &&
        std::max(term, lq) < acc + std::log(eps))
      break;
    if (K - k_start > 1000000)
      throw std::runtime_error("neutral_log_v: series did not converge");
  }
  return acc;
}

GibbsModel neutral_mixture_model(const CountDistribution& q) {
  auto cache = std::make_shared<VCache>();
  auto log_v = [q, cache](int n, int k) {
    const uint64_t key = nk_key(n, k);
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->map.find(key);
      if (it != cache->map.end()) return it->second;
    }
    const double value = neutral_log_v(q, n, k);
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->map.emplace(key, value);
    return value;
  };
  return GibbsModel(WSequence::ones(), log_v, GibbsFamily::NeutralMixture, {},
                    "neutral(q=" + q.describe() + ")");
}

GibbsModel mfm_model(const CountDistribution& q, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("mfm_model: gamma <= 0");
  auto cache = std::make_shared<VCache>();
  auto log_v = [q, gamma, cache](int n, int k) {
    const uint64_t key = nk_key(n, k);
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->map.find(key);
      if (it != cache->map.end()) return it->second;
    }
    // Mixture over K of the Dirichlet-multinomial V with theta = K gamma.
    double acc = kNegInf;
    const int k_start = std::max(k, q.min_support());
    for (int K = k_start; K <= q.max_support(); ++K) {
      const double lq = q.log_pmf(K);
      if (lq == kNegInf) {
        if (K > q.tail_start() && acc != kNegInf) break;
        continue;
      }
      const double theta = K * gamma;
      double term = lq;
      for (int i = 1; i <= k - 1; ++i) term += std::log(gamma * (K - i));
      term += std::lgamma(theta + 1.0) - std::lgamma(theta + n);
      acc = log_sum_exp(acc, term);
      if (K > q.tail_start() && K > 2 * k &&
          std::max(term, lq) < acc + std::log(1e-15))
        break;
    }
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->map.emplace(key, acc);
    return acc;
  };
  WSequence w = WSequence::from_log_fn(
      [gamma](int s) {
        return std::lgamma(s + gamma) - std::lgamma(1.0 + gamma);
      },
      WSequence::kInfiniteSupport,
      [gamma](int s) { return std::log(s + gamma); });
  std::ostringstream os;
  os << "mfm(q=" << q.describe() << ",gamma=" << gamma << ")";
  return GibbsModel(std::move(w), log_v, GibbsFamily::MfmMixture,
                    {{"gamma", gamma}}, os.str());
}

// ---------------------------------------------------------------------------
// Operations

std::vector<double> reallocation_weights(const GibbsModel& m,
                                         std::span<const int> counts, int n) {
  long long total = 0;
  for (int c : counts) {
    if (c < 1) throw std::invalid_argument("reallocation_weights: count < 1");
    total += c;
  }
  if (total != n)
    throw std::invalid_argument("reallocation_weights: counts must sum to n");
  const int k = static_cast<int>(counts.size());
  const double log_vk = m.log_v(n + 1, k);
  if (log_vk == kNegInf)
    throw std::runtime_error(
        "reallocation_weights: degenerate state, V_{n+1,k} = 0");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(k) + 1);
  for (int c : counts) {
    const double lw = m.log_w(c);
    if (lw == kNegInf)
      throw std::runtime_error(
          "reallocation_weights: cluster size outside W support");
    out.push_back(std::exp(m.log_w(c + 1) - lw));
  }
  const double log_vk1 = (k + 1 <= n + 1) ? m.log_v(n + 1, k + 1) : kNegInf;
  out.push_back(std::exp(log_vk1 - log_vk));
  return out;
}

ProjectivityReport check_projectivity(const GibbsModel& m, int n_max,
                                      double tol) {
  ProjectivityReport report;
  for (int n = 1; n <= n_max; ++n) {
    for (const IntegerPartition& shape : enumerate_integer_partitions(n)) {
      const double lhs = m.log_eppf(shape);
      std::vector<double> terms;
      terms.reserve(static_cast<size_t>(shape.k()) + 1);
      for (int j = 0; j < shape.k(); ++j) {
        std::vector<int> parts = shape.parts();
        ++parts[static_cast<size_t>(j)];
        terms.push_back(m.log_eppf(IntegerPartition::from_unsorted(std::move(parts))));
      }
      {
        std::vector<int> parts = shape.parts();
        parts.push_back(1);
        terms.push_back(m.log_eppf(IntegerPartition(std::move(parts))));
      }
      const double rhs = log_sum_exp(terms);
      double rel_err;
      if (lhs == kNegInf)
        rel_err = (rhs == kNegInf) ? 0.0 : kPosInf;
      else
        rel_err = std::abs(std::expm1(rhs - lhs));
      if (rel_err > report.worst_rel_err) report.worst_rel_err = rel_err;
      if (rel_err > tol && report.ok) {
        report.ok = false;
        report.first_failure = shape;
      }
    }
  }
  return report;
}

double mixture_log_eppf(
    const std::vector<std::pair<GibbsModel, double>>& components,
    const IntegerPartition& shape) {
  if (components.empty())
    throw std::invalid_argument("mixture_log_eppf: empty mixture");
  double wsum = 0.0;
  for (const auto& [model, weight] : components) {
    if (weight < 0.0)
      throw std::invalid_argument("mixture_log_eppf: negative weight");
    wsum += weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("mixture_log_eppf: weights must sum to 1");
  double acc = kNegInf;
  for (const auto& [model, weight] : components) {
    if (weight == 0.0) continue;
    acc = log_sum_exp(acc, std::log(weight) + model.log_eppf(shape));
  }
  return acc;
}

std::vector<SpectrumRow> eppf_spectrum(const GibbsModel& m, int n) {
  if (n < 1 || n > kMaxSpectrumN)
    throw std::invalid_argument("eppf_spectrum: n must be in [1, 13]");
  std::vector<SpectrumRow> rows;
  for (IntegerPartition& shape : enumerate_integer_partitions(n)) {
    SpectrumRow row{shape,
                    shape.k(),
                    shannon_index(shape),
                    gini_simpson_index(shape),
                    m.log_eppf(shape),
                    shape_multiplicity(shape)};
    rows.push_back(std::move(row));
  }
  return rows;
}

double slope_ratio(const GibbsModel& m, const IntegerPartition& from,
                   const IntegerPartition& to) {
  const CoverResult c = covers(from, to);
  if (!c.starstar)
    throw std::invalid_argument(
        "slope_ratio: pair is not a (**)-covering relation");
  const double dh = shannon_index(to) - shannon_index(from);
  return (m.log_eppf(to) - m.log_eppf(from)) / dh;
}

}  // namespace pbal
