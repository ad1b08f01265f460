#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

namespace pbal {

// Deterministic random stream. The engine is std::mt19937_64 (bit-exact per
// the standard); all variate transforms are implemented here because the
// standard library's distribution objects are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  double normal();
  double gamma(double shape, double rate = 1.0);
  double beta(double a, double b);
  int poisson(double lambda);

  // Index drawn proportionally to nonnegative weights (unnormalized).
  int categorical(std::span<const double> weights);
  // Same with weights in log space; -inf entries have zero probability.
  int categorical_log(std::span<const double> log_weights);

  // Stable seed derivation for parallel chains: splitmix64 over
  // (master, stream index).
  static uint64_t derive_seed(uint64_t master, uint64_t stream);

 private:
  std::mt19937_64 gen_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Univariate slice sampler (stepping out + shrinkage) targeting an
// unnormalized log density. `width` is the initial bracket size and
// `max_steps` bounds the stepping-out expansion on each side.
double slice_sample(double x0, const std::function<double(double)>& log_f,
                    Rng& rng, double width = 1.0, int max_steps = 50);

}  // namespace pbal
