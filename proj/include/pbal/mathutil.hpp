#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace pbal {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Raised when a numerical route loses too much precision to honor its
// accuracy contract (CLI maps this to exit code 3).
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for malformed configuration / CLI input (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// log(e^a + e^b); tolerates -inf operands.
double log_sum_exp(double a, double b);
double log_sum_exp(std::span<const double> v);

// log(e^a - e^b); requires a >= b (returns -inf when a == b).
double log_diff_exp(double a, double b);

// log(n!); exact-table backed for n <= 170, lgamma beyond.
double log_factorial(int n);

// log C(a, b) with integer arguments; -inf when b < 0 or b > a.
double log_binomial(long long a, long long b);

// log(e^x - 1) for x > 0, stable for both small and large x.
double log_expm1(double x);

// log(1 - e^{-x}) for x > 0.
double log1mexp(double x);

}  // namespace pbal
