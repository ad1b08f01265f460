#include "pbal/balance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pbal/mathutil.hpp"

namespace pbal {

const char* to_string(BalanceKind k) {
  switch (k) {
    case BalanceKind::Averse: return "AVERSE";
    case BalanceKind::Seeking: return "SEEKING";
    case BalanceKind::Neutral: return "NEUTRAL";
    case BalanceKind::Neither: return "NEITHER";
  }
  return "?";
}

namespace {

BalanceKind combine(bool averse_ok, bool seeking_ok) {
  if (averse_ok && seeking_ok) return BalanceKind::Neutral;
  if (averse_ok) return BalanceKind::Averse;
  if (seeking_ok) return BalanceKind::Seeking;
  return BalanceKind::Neither;
}

}  // namespace

BalanceClass classify_balance(const WSequence& w, int s_max, double tol) {
  if (s_max < 3)
    throw std::invalid_argument("classify_balance: s_max must be >= 3");

  std::vector<double> lw(static_cast<size_t>(s_max) + 1, kNegInf);
  int last_pos = 1;
  for (int s = 1; s <= s_max; ++s) {
    lw[static_cast<size_t>(s)] = w.log_w(s);
    if (lw[static_cast<size_t>(s)] != kNegInf) last_pos = s;
  }

  BalanceClass out;
  out.verified_up_to = s_max;
  bool averse_ok = true, seeking_ok = true;

  // Zeros strictly inside the (observed) support break log-concavity.
  for (int s = 2; s < last_pos; ++s) {
    if (lw[static_cast<size_t>(s)] == kNegInf) {
      seeking_ok = false;
      out.seeking_violation = s;
      break;
    }
  }

  for (int s = 2; s + 1 <= s_max; ++s) {
    const double a = lw[static_cast<size_t>(s - 1)];
    const double b = lw[static_cast<size_t>(s)];
    const double c = lw[static_cast<size_t>(s + 1)];
    bool convex_here, concave_here;
    if (b == kNegInf) {
      // W_s = 0: W_s^2 <= W_{s-1} W_{s+1} trivially, and >= holds unless the
      // right side is positive (only possible with an interior zero, already
      // handled above).
      convex_here = true;
      concave_here = !(a != kNegInf && c != kNegInf);
    } else if (a == kNegInf || c == kNegInf) {
      // Positive W_s against a zero neighbor: convexity fails; concavity is
      // compatible with a trailing support boundary.
      convex_here = false;
      concave_here = true;
    } else {
      const double d_lo = w.log_ratio(s - 1);  // log W_s - log W_{s-1}
      const double d_hi = w.log_ratio(s);      // log W_{s+1} - log W_s
      const double d2 = d_hi - d_lo;
      const double scale = std::max({1.0, std::abs(d_lo), std::abs(d_hi)});
      convex_here = d2 >= -tol * scale;
      concave_here = d2 <= tol * scale;
    }
    if (!convex_here && averse_ok) {
      averse_ok = false;
      out.averse_violation = s;
    }
    if (!concave_here && seeking_ok) {
      seeking_ok = false;
      out.seeking_violation = s;
    }
    if (!averse_ok && !seeking_ok) break;
  }

  out.kind = combine(averse_ok, seeking_ok);
  return out;
}

double b_sequence(const WSequence& w, int s) {
  if (s < 2) throw std::invalid_argument("b_sequence: s must be >= 2");
  const double a = w.log_w(s - 1);
  const double b = w.log_w(s);
  if (b == kNegInf) {
    if (a != kNegInf)
      throw std::runtime_error("b_sequence: internal zero (W_s = 0, W_{s-1} > 0)");
    throw std::invalid_argument("b_sequence: s outside the support of W");
  }
  if (a == kNegInf)
    throw std::runtime_error("b_sequence: W_{s-1} = 0 below a positive W_s");
  if (w.log_w(s + 1) == kNegInf) return kPosInf;
  return -static_cast<double>(s) * (w.log_ratio(s) - w.log_ratio(s - 1));
}

namespace {

// Last index <= s_max with positive weight; also detects interior zeros.
struct SupportScan {
  int last_pos = 1;
  bool internal_zero = false;
};

SupportScan scan_support(const WSequence& w, int s_max) {
  SupportScan r;
  for (int s = 1; s <= s_max; ++s)
    if (w.log_w(s) != kNegInf) r.last_pos = s;
  for (int s = 2; s < r.last_pos; ++s)
    if (w.log_w(s) == kNegInf) r.internal_zero = true;
  return r;
}

// ga >= gb, up to tolerance, with extended-real conventions.
bool geq_tol(double ga, double gb, double tol) {
  if (ga == kPosInf) return true;
  if (gb == kPosInf) return false;
  const double scale = std::max({1.0, std::abs(ga), std::abs(gb)});
  return ga >= gb - tol * scale;
}

}  // namespace

Order lc_compare(const WSequence& w, const WSequence& wp, int s_max,
                 double tol) {
  if (s_max < 2) throw std::invalid_argument("lc_compare: s_max must be >= 2");
  const SupportScan sa = scan_support(w, s_max + 1);
  const SupportScan sb = scan_support(wp, s_max + 1);
  if (sa.internal_zero || sb.internal_zero) return Order::Incomparable;

  const int ma = w.finite_support() ? w.support_max() : WSequence::kInfiniteSupport;
  const int mb = wp.finite_support() ? wp.support_max() : WSequence::kInfiniteSupport;
  bool less_ok = ma <= mb;     // supp(w) contained in supp(wp)
  bool greater_ok = mb <= ma;

  const int lim = std::min({s_max, sa.last_pos, sb.last_pos});
  bool all_equal = ma == mb;
  for (int s = 2; s <= lim && (less_ok || greater_ok); ++s) {
    const double ga = b_sequence(w, s);
    const double gb = b_sequence(wp, s);
    if (!geq_tol(ga, gb, tol)) less_ok = false;
    if (!geq_tol(gb, ga, tol)) greater_ok = false;
    if (!(geq_tol(ga, gb, tol) && geq_tol(gb, ga, tol))) all_equal = false;
  }
  if (less_ok && greater_ok && all_equal) return Order::Equal;
  if (less_ok) return Order::Less;
  if (greater_ok) return Order::Greater;
  return Order::Incomparable;
}

BalanceClass brute_force_balance_check(
    const std::function<double(const IntegerPartition&)>& log_eppf, int n,
    double tol) {
  if (n < 1) throw std::invalid_argument("brute_force_balance_check: n < 1");
  BalanceClass out;
  out.verified_up_to = n;
  bool averse_ok = true, seeking_ok = true;
  for (int k = 1; k <= n && (averse_ok || seeking_ok); ++k) {
    const std::vector<IntegerPartition> shapes =
        enumerate_integer_partitions(n, k);
    for (size_t i = 0; i < shapes.size(); ++i) {
      for (size_t j = i + 1; j < shapes.size(); ++j) {
        const Order ord = dominance_compare(shapes[i], shapes[j]);
        if (ord != Order::Less && ord != Order::Greater) continue;
        const IntegerPartition& lo = ord == Order::Less ? shapes[i] : shapes[j];
        const IntegerPartition& hi = ord == Order::Less ? shapes[j] : shapes[i];
        const double pl = log_eppf(lo);  // the less balanced shape
        const double ph = log_eppf(hi);
        const double scale =
            std::max({1.0, std::isfinite(pl) ? std::abs(pl) : 0.0,
                      std::isfinite(ph) ? std::abs(ph) : 0.0});
        // Averse: p(lo) >= p(hi); seeking: p(lo) <= p(hi).
        const bool averse_here = pl >= ph - tol * scale || ph == kNegInf;
        const bool seeking_here = ph >= pl - tol * scale || pl == kNegInf;
        if (!averse_here) averse_ok = false;
        if (!seeking_here) seeking_ok = false;
        if (!averse_ok && !seeking_ok) break;
      }
    }
  }
  out.kind = combine(averse_ok, seeking_ok);
  return out;
}

BalanceClass brute_force_balance_check(const GibbsModel& m, int n, double tol) {
  return brute_force_balance_check(
      [&m](const IntegerPartition& s) { return m.log_eppf(s); }, n, tol);
}

}  // namespace pbal
