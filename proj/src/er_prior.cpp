#include "pbal/er_prior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pbal/mathutil.hpp"

namespace pbal::er {

void PartitionPrior::update_parameters(const std::vector<int>&, Rng&) {}

// ---------------------------------------------------------------------------
// EscPartitionPrior

namespace {

size_t expected_param_count(MuFamilyKind kind) {
  switch (kind) {
    case MuFamilyKind::ShiftedBinomial:
    case MuFamilyKind::ZtBinomial:
    case MuFamilyKind::ZtNegBinomial:
      return 2;
    case MuFamilyKind::ZtPoisson:
    case MuFamilyKind::Logarithmic:
      return 1;
  }
  return 0;
}

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

constexpr double kPClip = 1e-12;

}  // namespace

EscPartitionPrior::EscPartitionPrior(MuFamilyKind kind,
                                     std::vector<double> params, bool update,
                                     EscHyperPriors hyper)
    : kind_(kind), params_(std::move(params)), update_(update), hyper_(hyper) {
  if (params_.size() != expected_param_count(kind_))
    throw std::invalid_argument("EscPartitionPrior: wrong parameter count");
  current_mu();  // validates parameter domains
  refresh_tables();
}

MuFamily EscPartitionPrior::current_mu() const {
  switch (kind_) {
    case MuFamilyKind::ShiftedBinomial:
      return MuFamily::shifted_binomial(static_cast<int>(params_[0]), params_[1]);
    case MuFamilyKind::ZtBinomial:
      return MuFamily::zt_binomial(static_cast<int>(params_[0]), params_[1]);
    case MuFamilyKind::ZtPoisson:
      return MuFamily::zt_poisson(params_[0]);
    case MuFamilyKind::ZtNegBinomial:
      return MuFamily::zt_neg_binomial(params_[0], params_[1]);
    case MuFamilyKind::Logarithmic:
      return MuFamily::logarithmic(params_[0]);
  }
  throw std::logic_error("EscPartitionPrior: unknown family");
}

void EscPartitionPrior::refresh_tables() {
  const MuFamily mu = current_mu();
  log_mu1_ = mu.log_pmf(1);
  max_size_ = mu.finite_support() ? mu.support_max() : INT_MAX;
}

int EscPartitionPrior::max_cluster_size() const { return max_size_; }

double EscPartitionPrior::log_existing_weight(int size) const {
  // f(s) = (s+1) mu_{s+1} / mu_s in closed form per family.
  if (size < 1) throw std::invalid_argument("log_existing_weight: size < 1");
  if (size >= max_size_) return kNegInf;  // size cap reached
  switch (kind_) {
    case MuFamilyKind::ShiftedBinomial: {
      const double N = params_[0], p = params_[1];
      return std::log((size + 1.0) * (N - size + 1.0) * p /
                      (size * (1.0 - p)));
    }
    case MuFamilyKind::ZtBinomial: {
      const double N = params_[0], p = params_[1];
      return std::log((N - size) * p / (1.0 - p));
    }
    case MuFamilyKind::ZtPoisson:
      return std::log(params_[0]);
    case MuFamilyKind::ZtNegBinomial:
      return std::log(params_[1] * (size + params_[0]));
    case MuFamilyKind::Logarithmic:
      return std::log(params_[0] * size);
  }
  throw std::logic_error("log_existing_weight: unknown family");
}

double EscPartitionPrior::log_new_weight(int k, int /*n*/) const {
  // g = (k+1) mu_1.
  return std::log(k + 1.0) + log_mu1_;
}

std::vector<std::string> EscPartitionPrior::parameter_names() const {
  switch (kind_) {
    case MuFamilyKind::ShiftedBinomial:
    case MuFamilyKind::ZtBinomial:
      return {"N", "p"};
    case MuFamilyKind::ZtPoisson:
      return {"lambda"};
    case MuFamilyKind::ZtNegBinomial:
      return {"r", "p"};
    case MuFamilyKind::Logarithmic:
      return {"p"};
  }
  return {};
}

std::string EscPartitionPrior::describe() const {
  std::ostringstream os;
  os << "esc:" << to_string(kind_) << "(";
  const auto names = parameter_names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) os << ",";
    os << names[i] << "=" << params_[i];
  }
  os << (update_ ? ";sampled)" : ";fixed)");
  return os.str();
}

void EscPartitionPrior::update_parameters(const std::vector<int>& sizes,
                                          Rng& rng) {
  if (!update_) return;
  int n = 0, k = static_cast<int>(sizes.size()), max_nj = 0;
  std::map<int, int> hist;  // size -> count
  for (int s : sizes) {
    n += s;
    max_nj = std::max(max_nj, s);
    ++hist[s];
  }
  if (k < 1) throw std::invalid_argument("update_parameters: no clusters");

  switch (kind_) {
    case MuFamilyKind::ShiftedBinomial: {
      // Exact draw of N from its marginal (p integrated out against the
      // arcsine kernel), then p | N from its Beta conditional. The N-support
      // is truncated at a cap; a posterior mode sitting at the cap means the
      // truncation is eating real mass.
      const int n_lo = std::max(1, max_nj - 1);
      const int n_hi = std::max(n_lo + 1, hyper_.shifted_binomial_n_cap);
      if (static_cast<int>(log_fact_.size()) < n_hi + 3) {
        log_fact_.resize(static_cast<size_t>(n_hi) + 3);
        log_fact_[0] = 0.0;
        for (size_t m = 1; m < log_fact_.size(); ++m)
          log_fact_[m] = log_fact_[m - 1] + std::log(static_cast<double>(m));
      }
      const double a = n - k + 0.5;
      std::vector<double> log_terms;
      log_terms.reserve(static_cast<size_t>(n_hi - n_lo) + 1);
      for (int N = n_lo; N <= n_hi; ++N) {
        const double b = static_cast<double>(k) * (N + 1.0) - n + 0.5;
        double t = -std::log(static_cast<double>(N)) + lbeta(a, b) +
                   k * log_fact_[static_cast<size_t>(N)];
        for (const auto& [s, m] : hist)
          t -= m * log_fact_[static_cast<size_t>(N - s + 1)];
        log_terms.push_back(t);
      }
      const size_t argmax = static_cast<size_t>(
          std::max_element(log_terms.begin(), log_terms.end()) -
          log_terms.begin());
      if (argmax + 1 == log_terms.size())
        throw std::runtime_error(
            "shifted-binomial N update: posterior mode at the truncation cap; "
            "raise shifted_binomial_n_cap");
      const int N = n_lo + rng.categorical_log(log_terms);
      const double b = static_cast<double>(k) * (N + 1.0) - n + 0.5;
      const double p = std::min(1.0 - kPClip, std::max(kPClip, rng.beta(a, b)));
      params_[0] = N;
      params_[1] = p;
      break;
    }
    case MuFamilyKind::ZtBinomial: {
      const int N = static_cast<int>(params_[0]);
      auto log_target = [&](double p) {
        if (p < kPClip || p > 1.0 - kPClip) return kNegInf;
        const double l1p = std::log1p(-p);
        return (hyper_.ztb_p_a - 1.0) * std::log(p) +
               (hyper_.ztb_p_b - 1.0) * l1p + n * std::log(p) +
               (static_cast<double>(N) * k - n) * l1p -
               k * log1mexp(-N * l1p);
      };
      params_[1] = slice_sample(params_[1], log_target, rng);
      break;
    }
    case MuFamilyKind::ZtPoisson: {
      // Sampled on the log scale.
      auto log_target = [&](double t) {
        if (t < -60.0 || t > 60.0) return kNegInf;
        const double lambda = std::exp(t);
        return (hyper_.ztp_lambda_a + n) * t - hyper_.ztp_lambda_b * lambda -
               k * (lambda + log1mexp(lambda));
      };
      const double t = slice_sample(std::log(params_[0]), log_target, rng);
      params_[0] = std::exp(t);
      break;
    }
    case MuFamilyKind::ZtNegBinomial: {
      // Coordinate-wise: r on the log scale, then p on (0,1).
      auto size_loglik = [&](double r) {
        // sum_j log[(r)(r+1)...(r+n_j-1)]
        double acc = 0.0;
        for (const auto& [s, m] : hist)
          for (int j = 0; j < s; ++j) acc += m * std::log(r + j);
        return acc;
      };
      auto log_target_r = [&](double t) {
        if (t < -40.0 || t > 40.0) return kNegInf;
        const double r = std::exp(t);
        const double p = params_[1];
        const double l1p = std::log1p(-p);
        return hyper_.ztnb_r_a * t - hyper_.ztnb_r_b * r +
               k * (r * l1p - log1mexp(-r * l1p)) + size_loglik(r);
      };
      const double t = slice_sample(std::log(params_[0]), log_target_r, rng);
      params_[0] = std::exp(t);
      auto log_target_p = [&](double p) {
        if (p < kPClip || p > 1.0 - kPClip) return kNegInf;
        const double r = params_[0];
        const double l1p = std::log1p(-p);
        return (hyper_.ztnb_p_a - 1.0) * std::log(p) +
               (hyper_.ztnb_p_b - 1.0) * l1p + n * std::log(p) +
               k * (r * l1p - log1mexp(-r * l1p));
      };
      params_[1] = slice_sample(params_[1], log_target_p, rng);
      break;
    }
    case MuFamilyKind::Logarithmic: {
      auto log_target = [&](double p) {
        if (p < kPClip || p > 1.0 - kPClip) return kNegInf;
        const double z = -std::log1p(-p);
        return (hyper_.log_p_a - 1.0) * std::log(p) +
               (hyper_.log_p_b - 1.0) * std::log1p(-p) + n * std::log(p) -
               k * std::log(z);
      };
      params_[0] = slice_sample(params_[0], log_target, rng);
      break;
    }
  }
  refresh_tables();
}

// ---------------------------------------------------------------------------
// GibbsPartitionPrior

GibbsPartitionPrior::GibbsPartitionPrior(GibbsModel model)
    : model_(std::move(model)) {}

double GibbsPartitionPrior::log_existing_weight(int size) const {
  const double lw = model_.log_w(size);
  if (lw == kNegInf)
    throw std::runtime_error(
        "GibbsPartitionPrior: cluster size outside W support");
  return model_.log_w(size + 1) - lw;
}

double GibbsPartitionPrior::log_new_weight(int k, int n) const {
  const double log_vk = model_.log_v(n, k);
  if (log_vk == kNegInf)
    throw std::runtime_error("GibbsPartitionPrior: degenerate state (V = 0)");
  const double log_vk1 = (k + 1 <= n) ? model_.log_v(n, k + 1) : kNegInf;
  return log_vk1 - log_vk;
}

int GibbsPartitionPrior::max_cluster_size() const {
  return model_.w().finite_support() ? model_.w().support_max() : INT_MAX;
}

}  // namespace pbal::er
