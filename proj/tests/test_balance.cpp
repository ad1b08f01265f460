#include <doctest.h>

#include <cmath>

#include "pbal/balance.hpp"
#include "pbal/esc.hpp"
#include "pbal/gibbs.hpp"
#include "pbal/mathutil.hpp"

using namespace pbal;

TEST_CASE("classification of the core families") {
  CHECK(classify_balance(two_parameter_model(0.8, 1.0).w(), 100).kind ==
        BalanceKind::Averse);
  CHECK(classify_balance(two_parameter_model(0.0, 1.0).w(), 100).kind ==
        BalanceKind::Averse);
  CHECK(classify_balance(two_parameter_model(-2.0, 10.0).w(), 100).kind ==
        BalanceKind::Averse);
  CHECK(classify_balance(WSequence::ones(), 100).kind == BalanceKind::Neutral);
  CHECK(classify_mu(MuFamily::zt_binomial(5, 0.3)).kind ==
        BalanceKind::Seeking);
  CHECK(classify_mu(MuFamily::zt_poisson(2.0)).kind == BalanceKind::Neutral);
}

TEST_CASE("classification reports a violation witness") {
  const BalanceClass averse = classify_balance(two_parameter_model(0.8, 1.0).w(), 50);
  CHECK(averse.kind == BalanceKind::Averse);
  REQUIRE(averse.seeking_violation.has_value());
  CHECK(*averse.seeking_violation == 2);
  CHECK_FALSE(averse.averse_violation.has_value());
  CHECK(averse.verified_up_to == 50);

  // A sequence convex below s=4 and concave above is neither.
  std::vector<double> lw{0.0, 0.0, 1.0, 1.5, 1.6};
  const BalanceClass neither = classify_balance(WSequence::from_log_table(lw), 5);
  CHECK(neither.kind == BalanceKind::Neither);

  CHECK_THROWS_AS(classify_balance(WSequence::ones(), 2), std::invalid_argument);
}

TEST_CASE("internal zeros break log-concavity") {
  // W = (1, 0, 6 mu_3 / mu_1, ...) style table with a positive tail.
  std::vector<double> pmf{0.5, 0.0, 0.25, 0.25};
  const BalanceClass cls = classify_mu(pmf);
  CHECK(cls.kind != BalanceKind::Seeking);
  CHECK(cls.kind != BalanceKind::Neutral);
  REQUIRE(cls.seeking_violation.has_value());
  CHECK(*cls.seeking_violation == 2);
}

TEST_CASE("b-sequence values") {
  const GibbsModel crp = two_parameter_model(0.0, 1.0);
  CHECK(b_sequence(crp.w(), 2) ==
        doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-12));

  // Zero-truncated Poisson induces a log-linear W: B identically zero.
  const WSequence w_pois = w_from_mu(MuFamily::zt_poisson(2.0));
  for (int s = 2; s <= 60; ++s)
    CHECK(std::abs(b_sequence(w_pois, s)) <= 1e-12);

  // Finite support: +inf at the boundary.
  const WSequence w_bin = w_from_mu(MuFamily::zt_binomial(5, 0.3));
  CHECK(b_sequence(w_bin, 5) == kPosInf);
  for (int s = 2; s < 5; ++s) CHECK(b_sequence(w_bin, s) > 0.0);

  CHECK_THROWS_AS(b_sequence(crp.w(), 1), std::invalid_argument);
  std::vector<double> pmf{0.5, 0.0, 0.5};
  CHECK_THROWS_AS(b_sequence(w_from_pmf(pmf), 2), std::runtime_error);
}

TEST_CASE("relative log-concavity comparisons") {
  const WSequence w08 = two_parameter_model(0.8, 1.0).w();
  const WSequence w05 = two_parameter_model(0.5, 1.0).w();
  const WSequence w0 = two_parameter_model(0.0, 1.0).w();
  const WSequence wm1 = two_parameter_model(-1.0, 5.0).w();

  // Larger discount = less balanced = log-convex relative to the smaller one.
  CHECK(lc_compare(w08, w0, 50) == Order::Greater);
  CHECK(lc_compare(w0, w08, 50) == Order::Less);
  CHECK(lc_compare(w0, w0, 50) == Order::Equal);
  CHECK(lc_compare(w05, wm1, 50) == Order::Greater);

  // Equivalence with the pointwise B comparison.
  for (int s = 2; s <= 50; ++s)
    CHECK(b_sequence(wm1, s) >= b_sequence(w05, s));

  // Finite vs infinite support: containment forces the direction.
  const WSequence w_bin = w_from_mu(MuFamily::zt_binomial(6, 0.4));
  CHECK(lc_compare(w_bin, w0, 50) == Order::Less);
  CHECK(lc_compare(w0, w_bin, 50) == Order::Greater);

  // Crossing B-sequences are incomparable: convex-then-concave table.
  std::vector<double> lw{0.0, 0.2, 1.0, 1.2, 1.3};
  const WSequence mixed = WSequence::from_log_table(lw);
  CHECK(lc_compare(mixed, w_from_mu(MuFamily::zt_poisson(1.0)), 4) ==
        Order::Incomparable);
}

TEST_CASE("brute force balance check") {
  CHECK(brute_force_balance_check(two_parameter_model(0.0, 1.0), 8).kind ==
        BalanceKind::Averse);
  CHECK(brute_force_balance_check(
            neutral_mixture_model(CountDistribution::shifted_poisson(3.0)), 8)
            .kind == BalanceKind::Neutral);
  CHECK(brute_force_balance_check(two_parameter_model(0.0, 1.0), 1).kind ==
        BalanceKind::Neutral);  // vacuous

  // Classifier and brute force agree across a small model grid.
  const std::vector<GibbsModel> models = {
      two_parameter_model(0.0, 1.0),
      two_parameter_model(0.8, 4.0),
      two_parameter_model(-1.0, 2.0),
      coupon_collector_model(4),
      neutral_mixture_model(CountDistribution::shifted_poisson(3.0)),
      mfm_model(CountDistribution::shifted_poisson(3.0), 1.0),
      ESCModel(MuFamily::zt_binomial(5, 0.3)).to_gibbs(),
      ESCModel(MuFamily::zt_poisson(2.0)).to_gibbs(),
      ESCModel(MuFamily::logarithmic(0.5)).to_gibbs(),
  };
  for (const auto& m : models) {
    const int s_max =
        m.w().finite_support() ? std::max(3, m.w().support_max() + 1) : 60;
    CHECK(classify_balance(m.w(), s_max).kind ==
          brute_force_balance_check(m, 10).kind);
  }
}

TEST_CASE("reallocation monotonicity matches the classification") {
  // f(s) = W_{s+1}/W_s nondecreasing iff averse, nonincreasing iff seeking.
  auto ratios = [](const WSequence& w, int hi) {
    std::vector<double> f;
    for (int s = 1; s <= hi; ++s) f.push_back(std::exp(w.log_w(s + 1) - w.log_w(s)));
    return f;
  };
  struct Case {
    WSequence w;
    int hi;
    BalanceKind kind;
  };
  const std::vector<Case> cases = {
      {two_parameter_model(0.5, 1.0).w(), 30, BalanceKind::Averse},
      {w_from_mu(MuFamily::zt_neg_binomial(2.0, 0.4)), 30, BalanceKind::Averse},
      {w_from_mu(MuFamily::shifted_binomial(8, 0.4)), 7, BalanceKind::Seeking},
      {w_from_mu(MuFamily::zt_poisson(1.5)), 30, BalanceKind::Neutral},
  };
  for (const auto& c : cases) {
    const auto f = ratios(c.w, c.hi);
    bool nondecreasing = true, nonincreasing = true;
    for (size_t i = 1; i < f.size(); ++i) {
      if (f[i] < f[i - 1] * (1 - 1e-12)) nondecreasing = false;
      if (f[i] > f[i - 1] * (1 + 1e-12)) nonincreasing = false;
    }
    const BalanceClass cls = classify_balance(
        c.w, c.w.finite_support() ? c.w.support_max() + 1 : c.hi + 2);
    CHECK(cls.kind == c.kind);
    CHECK(cls.is_averse() == nondecreasing);
    CHECK(cls.is_seeking() == nonincreasing);
  }
}
