#include "pbal/order.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pbal {

const char* to_string(Order o) {
  switch (o) {
    case Order::Less: return "LESS";
    case Order::Greater: return "GREATER";
    case Order::Equal: return "EQUAL";
    case Order::Incomparable: return "INCOMPARABLE";
  }
  return "?";
}

namespace {

void require_same_frame(const IntegerPartition& a, const IntegerPartition& b,
                        const char* where) {
  if (a.n() != b.n() || a.k() != b.k())
    throw std::invalid_argument(std::string(where) +
                                ": partitions must share n and k");
}

}  // namespace

Order dominance_compare(const IntegerPartition& a, const IntegerPartition& b) {
  require_same_frame(a, b, "dominance_compare");
  if (a == b) return Order::Equal;
  bool a_geq = true;  // prefix sums of a dominate those of b
  bool b_geq = true;
  long long pa = 0, pb = 0;
  for (int j = 0; j < a.k(); ++j) {
    pa += a.part(j);
    pb += b.part(j);
    if (pa < pb) a_geq = false;
    if (pb < pa) b_geq = false;
  }
  if (a_geq) return Order::Less;     // a is dominated: a < b in balancedness
  if (b_geq) return Order::Greater;
  return Order::Incomparable;
}

std::vector<IntegerPartition> one_step_downshifts(const IntegerPartition& a) {
  std::set<IntegerPartition> seen;
  const int k = a.k();
  for (int u = 0; u < k; ++u) {
    for (int v = u + 1; v < k; ++v) {
      if (a.part(u) - 1 < a.part(v) + 1) continue;
      std::vector<int> parts = a.parts();
      --parts[static_cast<size_t>(u)];
      ++parts[static_cast<size_t>(v)];
      seen.insert(IntegerPartition::from_unsorted(std::move(parts)));
    }
  }
  // Deterministic lexicographic-descending order.
  std::vector<IntegerPartition> out(seen.begin(), seen.end());
  std::reverse(out.begin(), out.end());
  return out;
}

CoverResult covers(const IntegerPartition& a, const IntegerPartition& b) {
  require_same_frame(a, b, "covers");
  CoverResult r;
  if (a == b) return r;
  // b must differ from a exactly at two positions u < v with
  // b[u] = a[u]-1 and b[v] = a[v]+1.
  int u = -1, v = -1;
  for (int j = 0; j < a.k(); ++j) {
    const int d = b.part(j) - a.part(j);
    if (d == 0) continue;
    if (d == -1 && u == -1 && v == -1) {
      u = j;
    } else if (d == 1 && u != -1 && v == -1) {
      v = j;
    } else {
      return r;
    }
  }
  if (u == -1 || v == -1) return r;
  r.star = (v == u + 1);
  r.starstar = (b.part(u) == b.part(v));
  if (r.starstar) r.s = b.part(u);
  r.covers = r.star || r.starstar;
  if (!r.covers) r.s = 0;
  return r;
}

CoverCase cover_case(const CoverResult& r) {
  if (!r.covers) throw std::invalid_argument("cover_case: not a covering pair");
  if (r.star && r.starstar) return CoverCase::Both;
  return r.star ? CoverCase::Star : CoverCase::StarStar;
}

}  // namespace pbal
