#pragma once

#include <functional>
#include <optional>
#include <string>

#include "pbal/gibbs.hpp"
#include "pbal/integer_partition.hpp"
#include "pbal/order.hpp"

namespace pbal {

enum class BalanceKind { Averse, Seeking, Neutral, Neither };

const char* to_string(BalanceKind k);

struct BalanceClass {
  BalanceKind kind = BalanceKind::Neither;
  // First s at which the log-convexity (averse) test fails, when it does.
  std::optional<int> averse_violation;
  // First s at which the log-concavity / no-internal-zero (seeking) test fails.
  std::optional<int> seeking_violation;
  // Horizon actually examined; the tests quantify over all s, so results on
  // infinite supports are "verified up to" this value.
  int verified_up_to = 0;

  bool is_averse() const {
    return kind == BalanceKind::Averse || kind == BalanceKind::Neutral;
  }
  bool is_seeking() const {
    return kind == BalanceKind::Seeking || kind == BalanceKind::Neutral;
  }
};

// Relative tolerance on second log-differences; values within it count as
// both convex and concave, which is what makes exact neutrality detectable.
inline constexpr double kBalanceTol = 1e-9;

// Classifies W by the sign of its second log-differences over 2 <= s < s_max.
BalanceClass classify_balance(const WSequence& w, int s_max,
                              double tol = kBalanceTol);

// B_s = -s (log W_{s+1} - 2 log W_s + log W_{s-1}); +inf when W_{s+1} = 0.
// Requires W_{s-1}, W_s > 0 (an interior zero is reported as an error).
double b_sequence(const WSequence& w, int s);

// Relative log-concavity comparison: Less means w is log-concave relative to
// wp (w <=_lc wp), equivalent to B_s(w) >= B_s(wp) for every s together with
// support containment.
Order lc_compare(const WSequence& w, const WSequence& wp, int s_max,
                 double tol = kBalanceTol);

// Literal pairwise test of the balancedness definition over every comparable
// pair of shapes in every I_n^k; the oracle the classifier is checked
// against. Works for any EPPF, Gibbs-form or not.
BalanceClass brute_force_balance_check(
    const std::function<double(const IntegerPartition&)>& log_eppf, int n,
    double tol = kBalanceTol);

BalanceClass brute_force_balance_check(const GibbsModel& m, int n,
                                       double tol = kBalanceTol);

}  // namespace pbal
