#include <algorithm>
#include <cmath>
#include <numeric>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "riskforms/model.hpp"
#include "riskforms/random.hpp"

using namespace riskforms;
using Catch::Matchers::WithinAbs;

namespace {

const FiniteModel kTwoPoint({1.0, 3.0}, {0.5, 0.5});

}  // namespace

TEST_CASE("FiniteModel validation") {
  CHECK_THROWS_AS(FiniteModel({}, {}), ValidationError);
  CHECK_THROWS_AS(FiniteModel({1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(FiniteModel({1.0, 2.0}, {0.7, 0.7}), ValidationError);
  CHECK_THROWS_AS(FiniteModel({1.0, 2.0}, {1.5, -0.5}), ValidationError);
  CHECK_NOTHROW(FiniteModel({1.0, 2.0}, {1.0, 0.0}));
}

TEST_CASE("distribution_function examples") {
  CHECK(distribution_function(kTwoPoint, 2.0) == 0.5);
  CHECK(distribution_function(FiniteModel::dirac(7.0), 7.0) == 1.0);
  CHECK(distribution_function(kTwoPoint, 0.0) == 0.0);
  CHECK(distribution_function(kTwoPoint, 3.0) == 1.0);
}

TEST_CASE("quantile examples") {
  CHECK(quantile(kTwoPoint, 0.5) == 1.0);
  CHECK(quantile(kTwoPoint, 0.75) == 3.0);
  for (double p : {0.01, 0.5, 1.0}) CHECK(quantile(FiniteModel::dirac(7.0), p) == 7.0);
  CHECK_THROWS_AS(quantile(kTwoPoint, 0.0), DomainError);
  CHECK_THROWS_AS(quantile(kTwoPoint, 1.5), DomainError);
  CHECK_THROWS_AS(quantile(kTwoPoint, -0.1), DomainError);
}

TEST_CASE("quantile_function examples") {
  const auto steps = quantile_function(kTwoPoint).steps();
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].cum_prob == 0.5);
  CHECK(steps[0].value == 1.0);
  CHECK(steps[1].cum_prob == 1.0);
  CHECK(steps[1].value == 3.0);

  const auto dirac = quantile_function(FiniteModel::dirac(7.0)).steps();
  REQUIRE(dirac.size() == 1);
  CHECK(dirac[0].cum_prob == 1.0);
  CHECK(dirac[0].value == 7.0);

  const auto reversed = quantile_function(FiniteModel({3.0, 1.0}, {0.5, 0.5})).steps();
  REQUIRE(reversed.size() == 2);
  CHECK(reversed[0].value == 1.0);
  CHECK(reversed[1].value == 3.0);
}

TEST_CASE("quantile_function merges ties and drops null atoms") {
  const FiniteModel m({2.0, 5.0, 2.0, -1.0}, {0.25, 0.25, 0.5, 0.0});
  const auto steps = quantile_function(m).steps();
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].value == 2.0);
  CHECK_THAT(steps[0].cum_prob, WithinAbs(0.75, 1e-15));
  CHECK(steps[1].value == 5.0);
  CHECK(quantile(m, 1e-9) == 2.0);
}

TEST_CASE("law_equivalent examples") {
  CHECK(law_equivalent(kTwoPoint, FiniteModel({3.0, 1.0}, {0.5, 0.5})));
  CHECK_FALSE(law_equivalent(kTwoPoint, FiniteModel({1.0, 3.0}, {0.4, 0.6})));
  CHECK(law_equivalent(FiniteModel({2.0, 2.0}, {0.5, 0.5}), FiniteModel::dirac(2.0)));
  CHECK(law_equivalent(FiniteModel({2.0, 9.0}, {1.0, 0.0}), FiniteModel::dirac(2.0)));
}

TEST_CASE("icx_compare examples") {
  const FiniteModel a({0.0, 1.0}, {0.5, 0.5});
  const FiniteModel b({0.0, 2.0}, {0.5, 0.5});
  const FiniteModel c({0.0, 2.0}, {0.5, 0.5});
  CHECK(icx_compare(a, a));
  CHECK(icx_compare(a, b));
  CHECK(oracle::icx_dense(a, b));
  CHECK_FALSE(icx_compare(c, FiniteModel::dirac(1.0)));
  CHECK_FALSE(oracle::icx_dense(c, FiniteModel::dirac(1.0)));
  // the converse direction holds: Dirac at the mean is below any spread
  CHECK(icx_compare(FiniteModel::dirac(1.0), c));
}

TEST_CASE("quantile matches brute-force inf-scan") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    Rng rng(derive_seed(11, t));
    const FiniteModel m = random_model(rng, 1, 8, -10.0, 10.0, 0.2, 0.4);
    for (double p : oracle::probability_probe(m)) {
      CHECK_THAT(quantile(m, p), WithinAbs(oracle::quantile_scan(m, p), 1e-12));
      CHECK(quantile_function(m)(p) == quantile(m, p));
    }
  }
}

TEST_CASE("quantile is nondecreasing and left-continuous") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(12, t));
    const FiniteModel m = random_model(rng, 1, 8, -10.0, 10.0, 0.2, 0.4);
    double prev = -INFINITY;
    for (int k = 1; k <= 400; ++k) {
      const double p = k / 400.0;
      const double q = quantile(m, p);
      CHECK(q >= prev);
      prev = q;
    }
    const QuantileFunction qf = quantile_function(m);
    for (const auto& s : qf.steps()) {
      // approaching a breakpoint from the left gives the breakpoint's value
      const double left = s.cum_prob - 1e-9;
      if (left > 0.0 && s.mass > 1e-8) CHECK(quantile(m, left) == s.value);
      CHECK(quantile(m, s.cum_prob) == s.value);
    }
  }
}

TEST_CASE("distribution_function is right-continuous and nondecreasing") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng(derive_seed(13, t));
    const FiniteModel m = random_model(rng, 1, 8, -10.0, 10.0, 0.2, 0.4);
    double prev = 0.0;
    for (double z = -11.0; z <= 11.0; z += 0.05) {
      const double f = distribution_function(m, z);
      CHECK(f >= prev);
      prev = f;
    }
    for (double v : m.values()) CHECK(distribution_function(m, v) == distribution_function(m, std::nextafter(v, INFINITY)));
    CHECK_THAT(distribution_function(m, 10.0), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("law_equivalent is an equivalence relation") {
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(derive_seed(14, t));
    const FiniteModel base = random_model(rng, 1, 5, -5.0, 5.0, 0.2, 0.6);
    // a, b, c are either twins of base (shuffled, split, padded) or unrelated
    auto make = [&](void) {
      if (rng.coin(0.6)) return oracle::law_twin(rng, base);
      return random_model(rng, 1, 5, -5.0, 5.0, 0.2, 0.6);
    };
    const FiniteModel a = make(), b = make(), c = make();
    CHECK(law_equivalent(a, a));
    CHECK(law_equivalent(a, b) == law_equivalent(b, a));
    if (law_equivalent(a, b) && law_equivalent(b, c)) CHECK(law_equivalent(a, c));
    CHECK(law_equivalent(base, oracle::law_twin(rng, base)));
  }
}

TEST_CASE("outcome-wise dominance implies icx order") {
  for (std::uint64_t t = 0; t < 500; ++t) {
    Rng rng(derive_seed(15, t));
    const FiniteModel m = random_model(rng, 1, 6, -10.0, 10.0, 0.15, 0.3);
    std::vector<double> raised = m.values();
    for (double& v : raised) v += rng.coin(0.5) ? rng.uniform(0.0, 3.0) : 0.0;
    const FiniteModel up(raised, m.probs());
    CHECK(icx_compare(m, up));
    CHECK(oracle::icx_dense(m, up));
  }
}

TEST_CASE("icx_compare agrees with the dense threshold grid") {
  int positives = 0;
  for (std::uint64_t t = 0; t < 400; ++t) {
    Rng rng(derive_seed(16, t));
    const FiniteModel a = random_model(rng, 1, 4, -3.0, 3.0, 0.1, 0.8);
    const FiniteModel b = random_model(rng, 1, 4, -3.0, 3.0, 0.1, 0.8);
    const bool fast = icx_compare(a, b);
    CHECK(fast == oracle::icx_dense(a, b));
    positives += fast;
  }
  CHECK(positives > 20);
}

TEST_CASE("mutual icx order implies equality in law") {
  int mutual = 0;
  for (std::uint64_t t = 0; t < 400; ++t) {
    Rng rng(derive_seed(17, t));
    const FiniteModel a = random_model(rng, 1, 4, -3.0, 3.0, 0.2, 0.8);
    const FiniteModel b = rng.coin(0.5) ? oracle::law_twin(rng, a) : random_model(rng, 1, 4, -3.0, 3.0, 0.2, 0.8);
    if (icx_compare(a, b) && icx_compare(b, a)) {
      ++mutual;
      CHECK(law_equivalent(a, b));
    }
  }
  CHECK(mutual > 50);
}

TEST_CASE("shifted and scaled models") {
  const FiniteModel m({1.0, -2.0}, {0.25, 0.75});
  CHECK(m.shifted(1.5).values() == std::vector<double>{2.5, -0.5});
  CHECK(m.scaled(2.0).values() == std::vector<double>{2.0, -4.0});
  CHECK(m.support_min() == -2.0);
  CHECK(m.support_max() == 1.0);
  CHECK(FiniteModel({1.0, 9.0}, {1.0, 0.0}).support_max() == 1.0);
  CHECK_THAT(expectation(m), WithinAbs(0.25 - 1.5, 1e-15));
}
