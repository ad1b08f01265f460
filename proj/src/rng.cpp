#include "pbal/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "pbal/mathutil.hpp"

namespace pbal {

double Rng::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  have_spare_normal_ = true;
  return u * f;
}

double Rng::gamma(double shape, double rate) {
  if (shape <= 0.0 || rate <= 0.0)
    throw std::invalid_argument("Rng::gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and rescale (Marsaglia-Tsang augmentation).
    const double u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v / rate;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

int Rng::poisson(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("Rng::poisson: lambda <= 0");
  if (lambda < 30.0) {
    // Knuth multiplication method.
    const double l = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }
  // Split recursively; fine for the moderate rates used here.
  const double half = std::floor(lambda / 2.0);
  return poisson(half) + poisson(lambda - half);
}

int Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || std::isnan(w))
      throw std::invalid_argument("Rng::categorical: bad weight");
    total += w;
  }
  if (total <= 0.0)
    throw std::invalid_argument("Rng::categorical: all weights zero");
  double u = uniform() * total;
  for (size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

int Rng::categorical_log(std::span<const double> log_weights) {
  double m = kNegInf;
  for (double lw : log_weights) m = std::max(m, lw);
  if (m == kNegInf)
    throw std::invalid_argument("Rng::categorical_log: all weights zero");
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - m);
  double u = uniform() * total;
  for (size_t i = 0; i + 1 < log_weights.size(); ++i) {
    u -= std::exp(log_weights[i] - m);
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(log_weights.size()) - 1;
}

uint64_t Rng::derive_seed(uint64_t master, uint64_t stream) {
  // splitmix64 over a combined word.
  uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double slice_sample(double x0, const std::function<double(double)>& log_f,
                    Rng& rng, double width, int max_steps) {
  const double f0 = log_f(x0);
  if (!std::isfinite(f0))
    throw std::runtime_error("slice_sample: log density not finite at start");
  const double log_y = f0 + std::log(rng.uniform());

  // Stepping out.
  double lo = x0 - width * rng.uniform();
  double hi = lo + width;
  int lo_steps = max_steps, hi_steps = max_steps;
  while (lo_steps-- > 0 && log_f(lo) > log_y) lo -= width;
  while (hi_steps-- > 0 && log_f(hi) > log_y) hi += width;

  // Shrinkage.
  for (int it = 0; it < 1000; ++it) {
    const double x1 = rng.uniform(lo, hi);
    if (log_f(x1) > log_y) return x1;
    if (x1 < x0)
      lo = x1;
    else
      hi = x1;
  }
  return x0;  // bracket collapsed; keep current point
}

}  // namespace pbal
