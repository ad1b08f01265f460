#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "pbal/balance.hpp"
#include "pbal/esc.hpp"
#include "pbal/gibbs.hpp"
#include "pbal/mathutil.hpp"
#include "test_support.hpp"

using namespace pbal;

namespace {

IntegerPartition ip(std::vector<int> parts) {
  return IntegerPartition(std::move(parts));
}

// Total EPPF mass over all set partitions of [n], via shape multiplicities.
double eppf_total_mass(const GibbsModel& m, int n) {
  double total = 0.0;
  for (const auto& shape : enumerate_integer_partitions(n)) {
    const double lp = m.log_eppf(shape);
    if (lp == kNegInf) continue;
    total += std::exp(log_shape_multiplicity(shape) + lp);
  }
  return total;
}

}  // namespace

TEST_CASE("two-parameter family: CRP values") {
  const GibbsModel crp = two_parameter_model(0.0, 1.0);
  CHECK(crp.log_eppf(ip({1})) == 0.0);
  CHECK(crp.log_eppf(ip({3})) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
  CHECK(crp.log_eppf(ip({2, 1})) == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("two-parameter family: admissible regimes") {
  CHECK_NOTHROW(two_parameter_model(0.5, 1.0));
  CHECK_NOTHROW(two_parameter_model(0.0, 0.5));
  CHECK_NOTHROW(two_parameter_model(-2.0, 10.0));  // K = 5
  CHECK_THROWS_AS(two_parameter_model(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(two_parameter_model(0.5, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(two_parameter_model(-2.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(two_parameter_model(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("coupon collector") {
  const GibbsModel m = coupon_collector_model(3);
  CHECK(std::exp(m.log_eppf(ip({1, 1}))) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.log_eppf(ip({1, 1, 1, 1})) == kNegInf);  // more blocks than coupons
}

TEST_CASE("neutral mixture: dirac mixing") {
  const GibbsModel m = neutral_mixture_model(CountDistribution::dirac(2));
  CHECK(m.log_eppf(ip({1, 1})) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(neutral_log_v(CountDistribution::dirac(2), 2, 2) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(neutral_log_v(CountDistribution::dirac(2), 2, 1) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  // No mass on K >= 3 blocks.
  CHECK(neutral_log_v(CountDistribution::dirac(2), 3, 3) == kNegInf);
}

TEST_CASE("neutral series against long-double direct summation") {
  const CountDistribution q = CountDistribution::shifted_poisson(3.0);
  for (int n : {5, 10}) {
    for (int k = 1; k <= n; ++k) {
      long double acc = 0.0L;
      for (int K = k; K <= 600; ++K) {
        // q(K) = e^{-3} 3^{K-1} / (K-1)!
        long double term = std::exp(-3.0L);
        for (int j = 1; j <= K - 1; ++j) term *= 3.0L / j;
        for (int i = 0; i < k; ++i) term *= (K - i);
        for (int i = 0; i < n; ++i) term /= K;
        acc += term;
      }
      const double expect = static_cast<double>(std::log(acc));
      CHECK(neutral_log_v(q, n, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("EPPF normalization over set partitions") {
  const std::vector<GibbsModel> models = {
      two_parameter_model(0.0, 1.0),   two_parameter_model(0.8, 1.0),
      two_parameter_model(-1.0, 5.0),  coupon_collector_model(3),
      neutral_mixture_model(CountDistribution::shifted_poisson(3.0)),
      mfm_model(CountDistribution::shifted_poisson(3.0), 1.0),
      dirichlet_multinomial_model(10, 2.0)};
  for (const auto& m : models)
    for (int n = 1; n <= 9; ++n)
      CHECK(eppf_total_mass(m, n) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reallocation weights") {
  const GibbsModel crp = two_parameter_model(0.0, 1.0);
  const std::vector<int> counts{2, 1};
  const auto w = reallocation_weights(crp, counts, 3);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(1.0).epsilon(1e-12));  // g = theta

  const GibbsModel neutral =
      neutral_mixture_model(CountDistribution::shifted_poisson(3.0));
  const std::vector<int> counts2{3, 2, 1};
  const auto wn = reallocation_weights(neutral, counts2, 6);
  CHECK(wn[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wn[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wn[2] == doctest::Approx(1.0).epsilon(1e-12));
  const double g = std::exp(neutral.log_v(7, 4) - neutral.log_v(7, 3));
  CHECK(wn[3] == doctest::Approx(g).epsilon(1e-12));

  CHECK_THROWS_AS(reallocation_weights(crp, counts, 4), std::invalid_argument);

  // Degenerate state: three blocks under a two-coupon model has V = 0.
  const std::vector<int> counts3{1, 1, 1};
  CHECK_THROWS_AS(reallocation_weights(coupon_collector_model(2), counts3, 3),
                  std::runtime_error);
}

TEST_CASE("projectivity holds exactly for the projective families") {
  CHECK(check_projectivity(two_parameter_model(0.5, 1.0), 8, 1e-10).ok);
  CHECK(check_projectivity(two_parameter_model(0.0, 4.0), 8, 1e-10).ok);
  CHECK(check_projectivity(dirichlet_multinomial_model(10, 2.0), 8, 1e-10).ok);
  CHECK(check_projectivity(coupon_collector_model(4), 8, 1e-10).ok);
  CHECK(check_projectivity(
            neutral_mixture_model(CountDistribution::shifted_poisson(3.0)), 8,
            1e-10)
            .ok);
  CHECK(check_projectivity(mfm_model(CountDistribution::shifted_poisson(2.0), 1.5),
                           7, 1e-9)
            .ok);
}

TEST_CASE("size-conditioned models are not projective") {
  const ProjectivityReport bin = check_projectivity(
      ESCModel(MuFamily::zt_binomial(5, 0.3)).to_gibbs(), 7, 1e-8);
  CHECK_FALSE(bin.ok);
  CHECK(bin.first_failure.has_value());
  CHECK(bin.worst_rel_err > 1e-8);
  CHECK_FALSE(check_projectivity(
                  ESCModel(MuFamily::zt_poisson(2.0)).to_gibbs(), 7, 1e-8)
                  .ok);
}

TEST_CASE("mixtures") {
  const GibbsModel crp1 = two_parameter_model(0.0, 1.0);
  const GibbsModel crp4 = two_parameter_model(0.0, 4.0);

  const std::vector<std::pair<GibbsModel, double>> single{{crp1, 1.0}};
  for (const auto& shape : enumerate_integer_partitions(6))
    CHECK(mixture_log_eppf(single, shape) ==
          doctest::Approx(crp1.log_eppf(shape)).epsilon(1e-12));

  const std::vector<std::pair<GibbsModel, double>> mix{{crp1, 0.5}, {crp4, 0.5}};
  auto mix_fn = [&](const IntegerPartition& s) { return mixture_log_eppf(mix, s); };
  CHECK(brute_force_balance_check(mix_fn, 6).kind == BalanceKind::Averse);

  CHECK_THROWS_AS(mixture_log_eppf({}, ip({1})), std::invalid_argument);
  const std::vector<std::pair<GibbsModel, double>> bad{{crp1, 0.7}};
  CHECK_THROWS_AS(mixture_log_eppf(bad, ip({1})), std::invalid_argument);
}

TEST_CASE("a mixture of seeking components stays seeking") {
  const std::vector<std::pair<GibbsModel, double>> mix{
      {ESCModel(MuFamily::zt_binomial(6, 0.4)).to_gibbs(), 0.5},
      {ESCModel(MuFamily::shifted_binomial(8, 0.3)).to_gibbs(), 0.5}};
  auto mix_fn = [&](const IntegerPartition& s) {
    return mixture_log_eppf(mix, s);
  };
  for (int n = 2; n <= 8; ++n)
    CHECK(brute_force_balance_check(mix_fn, n).is_seeking());
}

TEST_CASE("spectrum rows") {
  const GibbsModel crp = two_parameter_model(0.0, 1.0);
  const auto rows = eppf_spectrum(crp, 10);
  CHECK(rows.size() == 42);

  const auto single = eppf_spectrum(crp, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].log_eppf == 0.0);
  CHECK(single[0].multiplicity == 1);

  // Flat per-(n,k) spectrum for the neutral family.
  const GibbsModel neutral =
      neutral_mixture_model(CountDistribution::shifted_poisson(3.0));
  std::map<int, std::pair<double, double>> by_k;  // k -> (min, max)
  for (const auto& row : eppf_spectrum(neutral, 10)) {
    auto it = by_k.find(row.k);
    if (it == by_k.end())
      by_k[row.k] = {row.log_eppf, row.log_eppf};
    else {
      it->second.first = std::min(it->second.first, row.log_eppf);
      it->second.second = std::max(it->second.second, row.log_eppf);
    }
  }
  for (const auto& [k, mm] : by_k) CHECK(mm.second - mm.first <= 1e-12);

  CHECK_THROWS_AS(eppf_spectrum(crp, 14), std::invalid_argument);
}

TEST_CASE("slope ratio along (**)-covers") {
  const GibbsModel crp = two_parameter_model(0.0, 1.0);
  const double ratio = slope_ratio(crp, ip({6, 3, 1}), ip({6, 2, 2}));
  const double nb2 = 10.0 * b_sequence(crp.w(), 2);
  CHECK(std::abs(ratio - nb2) / std::abs(nb2) < 0.06);

  const GibbsModel neutral =
      neutral_mixture_model(CountDistribution::shifted_poisson(3.0));
  CHECK(slope_ratio(neutral, ip({6, 3, 1}), ip({6, 2, 2})) == 0.0);

  // A (*)-only cover carries no s and is rejected.
  CHECK_THROWS_AS(slope_ratio(crp, ip({8, 1, 1}), ip({7, 2, 1})),
                  std::invalid_argument);
}

TEST_CASE("exact Shannon difference vs 1/(ns) bound") {
  // (**)-covering pairs of [10] with s = 2..5, against the stated envelopes.
  const double n = 10.0;
  const std::vector<std::tuple<IntegerPartition, IntegerPartition, int, double>>
      cases = {{ip({6, 3, 1}), ip({6, 2, 2}), 2, 0.024},
               {ip({4, 4, 2}), ip({4, 3, 3}), 3, 0.008},
               {ip({5, 3, 2}), ip({4, 4, 2}), 4, 0.004},
               {ip({6, 4}), ip({5, 5}), 5, 0.002}};
  for (const auto& [a, b, s, bound] : cases) {
    REQUIRE(covers(a, b).starstar);
    REQUIRE(covers(a, b).s == s);
    const double dh = shannon_index(b) - shannon_index(a);
    CHECK(std::abs(dh - 1.0 / (n * s)) <= bound / n);
  }
}
