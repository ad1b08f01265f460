#include "pbal/integer_partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pbal/mathutil.hpp"

namespace pbal {

IntegerPartition::IntegerPartition(std::vector<int> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty())
    throw std::invalid_argument("IntegerPartition: no parts");
  long long total = 0;
  for (size_t j = 0; j < parts_.size(); ++j) {
    if (parts_[j] < 1)
      throw std::invalid_argument("IntegerPartition: parts must be positive");
    if (j > 0 && parts_[j] > parts_[j - 1])
      throw std::invalid_argument("IntegerPartition: parts must be nonincreasing");
    total += parts_[j];
  }
  if (total > std::numeric_limits<int>::max())
    throw std::invalid_argument("IntegerPartition: total overflows int");
  n_ = static_cast<int>(total);
}

IntegerPartition IntegerPartition::from_unsorted(std::vector<int> parts) {
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  return IntegerPartition(std::move(parts));
}

std::vector<int> IntegerPartition::multiplicities() const {
  std::vector<int> m(static_cast<size_t>(n_) + 1, 0);
  for (int p : parts_) ++m[static_cast<size_t>(p)];
  return m;
}

std::string IntegerPartition::to_string() const {
  std::ostringstream os;
  for (size_t j = 0; j < parts_.size(); ++j) {
    if (j) os << '-';
    os << parts_[j];
  }
  return os.str();
}

IntegerPartition IntegerPartition::parse(const std::string& text) {
  std::vector<int> parts;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, '-')) {
    if (tok.empty()) throw std::invalid_argument("IntegerPartition::parse: empty part");
    parts.push_back(std::stoi(tok));
  }
  return IntegerPartition(std::move(parts));
}

namespace {

void enumerate_rec(int remaining, int parts_left, int max_part,
                   std::vector<int>& prefix,
                   std::vector<IntegerPartition>& out) {
  if (parts_left == 0) {
    if (remaining == 0) out.push_back(IntegerPartition(prefix));
    return;
  }
  // Largest feasible first => lexicographic-descending output order.
  const int hi = std::min(max_part, remaining - (parts_left - 1));
  const int lo = (remaining + parts_left - 1) / parts_left;  // ceil
  for (int p = hi; p >= lo; --p) {
    prefix.push_back(p);
    enumerate_rec(remaining - p, parts_left - 1, p, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<IntegerPartition> enumerate_integer_partitions(
    int n, std::optional<int> k) {
  if (n < 1)
    throw std::invalid_argument("enumerate_integer_partitions: n must be >= 1");
  std::vector<IntegerPartition> out;
  std::vector<int> prefix;
  if (k.has_value()) {
    if (*k < 1 || *k > n)
      throw std::invalid_argument(
          "enumerate_integer_partitions: k must satisfy 1 <= k <= n");
    enumerate_rec(n, *k, n, prefix, out);
  } else {
    for (int kk = 1; kk <= n; ++kk) enumerate_rec(n, kk, n, prefix, out);
    // Merge the per-k lists into a single global lexicographic-descending order.
    std::sort(out.begin(), out.end(),
              [](const IntegerPartition& a, const IntegerPartition& b) {
                return b < a;
              });
  }
  return out;
}

double shannon_index(const IntegerPartition& p) {
  const double n = p.n();
  double h = 0.0;
  for (int part : p.parts()) {
    const double q = part / n;
    h -= q * std::log(q);
  }
  return h;
}

double gini_simpson_index(const IntegerPartition& p) {
  const double n = p.n();
  double s = 0.0;
  for (int part : p.parts()) {
    const double q = part / n;
    s += q * q;
  }
  return 1.0 - s;
}

BigInt shape_multiplicity(const IntegerPartition& p) {
  auto factorial = [](int m) {
    BigInt f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  BigInt numer = factorial(p.n());
  BigInt denom = 1;
  const std::vector<int> mult = p.multiplicities();
  for (int i = 1; i <= p.n(); ++i) {
    const int mi = mult[static_cast<size_t>(i)];
    if (mi == 0) continue;
    BigInt fi = factorial(i);
    for (int j = 0; j < mi; ++j) denom *= fi;
    denom *= factorial(mi);
  }
  return numer / denom;
}

double log_shape_multiplicity(const IntegerPartition& p) {
  double lg = log_factorial(p.n());
  const std::vector<int> mult = p.multiplicities();
  for (int i = 1; i <= p.n(); ++i) {
    const int mi = mult[static_cast<size_t>(i)];
    if (mi == 0) continue;
    lg -= mi * log_factorial(i) + log_factorial(mi);
  }
  return lg;
}

}  // namespace pbal
