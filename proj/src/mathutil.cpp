#include "pbal/mathutil.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pbal {

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf || m == kPosInf) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (b > a) throw std::invalid_argument("log_diff_exp: requires a >= b");
  if (a == b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

namespace {

std::array<double, 171> make_log_factorial_table() {
  std::array<double, 171> t{};
  long double acc = 0.0L;
  t[0] = 0.0;
  for (int i = 1; i <= 170; ++i) {
    acc += std::log(static_cast<long double>(i));
    t[i] = static_cast<double>(acc);
  }
  return t;
}

}  // namespace

double log_factorial(int n) {
  static const std::array<double, 171> table = make_log_factorial_table();
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (n <= 170) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(long long a, long long b) {
  if (b < 0 || b > a) return kNegInf;
  if (b == 0 || b == a) return 0.0;
  auto lf = [](long long m) {
    if (m <= 170) return log_factorial(static_cast<int>(m));
    return std::lgamma(static_cast<double>(m) + 1.0);
  };
  return lf(a) - lf(b) - lf(a - b);
}

double log_expm1(double x) {
  if (x <= 0.0) throw std::invalid_argument("log_expm1: requires x > 0");
  if (x > 36.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

double log1mexp(double x) {
  if (x <= 0.0) throw std::invalid_argument("log1mexp: requires x > 0");
  // Cutoff per the usual accuracy analysis of log(1 - e^{-x}).
  if (x < 0.6931471805599453) return std::log(-std::expm1(-x));
  return std::log1p(-std::exp(-x));
}

}  // namespace pbal
