#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mpcpen/mendelian.hpp"
#include "test_util.hpp"

using namespace mpcpen;
using mpcpen::testing::person;

namespace {

std::vector<GenotypeLogLik> random_logliks(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<GenotypeLogLik> ll(n);
  for (auto& l : ll)
    for (double& v : l) v = std::log(u(rng));
  return ll;
}

}  // namespace

TEST_CASE("founder prior follows Hardy-Weinberg") {
  auto p = founder_prior(0.0006);
  CHECK(p[1] + p[2] == doctest::Approx(0.00119964).epsilon(1e-12));
  auto z = founder_prior(0.0);
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 0.0);
  auto h = founder_prior(0.5);
  CHECK(h[0] == 0.25);
  CHECK(h[1] == 0.5);
  CHECK(h[2] == 0.25);
  CHECK_THROWS(founder_prior(-0.1));
  CHECK_THROWS(founder_prior(1.1));
}

TEST_CASE("transmission probabilities") {
  using G = Genotype3;
  CHECK(transmission_prob(G::Aa, G::Aa, G::aa) == 0.5);
  CHECK(transmission_prob(G::AA, G::aa, G::aa) == 0.0);
  CHECK(transmission_prob(G::Aa, G::Aa, G::Aa) == 0.5);
  CHECK(transmission_prob(G::AA, G::Aa, G::Aa) == 0.25);
  for (auto f : kGenotypes)
    for (auto m : kGenotypes) {
      double s = 0;
      for (auto c : kGenotypes) s += transmission_prob(c, f, m);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("single founder") {
  Family f{"S", {person("A", "", "", 1, GenotypeObs::Missing, {30}, 40, true)}};
  std::vector<GenotypeLogLik> ll{{std::log(0.2), std::log(0.5), std::log(0.7)}};
  const double psi = 0.1;
  auto pr = founder_prior(psi);
  const double expect = std::log(pr[0] * 0.2 + pr[1] * 0.5 + pr[2] * 0.7);
  CHECK(peel_family(f, ll, observed_genotypes(f), psi) == doctest::Approx(expect).epsilon(1e-14));

  f.members[0].genotype = GenotypeObs::Carrier;
  const double carrier = std::log(pr[1] * 0.5 + pr[2] * 0.7);
  CHECK(brute_force_family_loglik(f, ll, observed_genotypes(f), psi) ==
        doctest::Approx(carrier).epsilon(1e-14));
  CHECK(peel_family(f, ll, observed_genotypes(f), psi) == doctest::Approx(carrier).epsilon(1e-14));
}

TEST_CASE("wildtype parents force a wildtype child") {
  Family f{"W",
           {person("F", "", "", 1, GenotypeObs::Wildtype), person("M", "", "", 0, GenotypeObs::Wildtype),
            person("C", "F", "M", 0, GenotypeObs::Missing, {30}, 40, true)}};
  std::vector<GenotypeLogLik> ll{{0, 0, 0}, {0, 0, 0}, {std::log(0.3), std::log(0.9), std::log(0.9)}};
  const double psi = 0.2;
  const double prior_aa = std::pow(1 - psi, 2);
  const double expect = 2 * std::log(prior_aa) + std::log(0.3);
  CHECK(peel_family(f, ll, observed_genotypes(f), psi) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("three-member family by hand") {
  Family f{"T",
           {person("F", "", "", 1), person("M", "", "", 0),
            person("C", "F", "M", 0, GenotypeObs::Missing, {30}, 40, true)}};
  std::mt19937_64 rng(5);
  auto ll = random_logliks(3, rng);
  const double psi = 0.3;
  auto pr = founder_prior(psi);
  double total = 0;
  for (auto gf : kGenotypes)
    for (auto gm : kGenotypes)
      for (auto gc : kGenotypes)
        total += pr[int(gf)] * pr[int(gm)] * transmission_prob(gc, gf, gm) *
                 std::exp(ll[0][int(gf)] + ll[1][int(gm)] + ll[2][int(gc)]);
  CHECK(peel_family(f, ll, observed_genotypes(f), psi) == doctest::Approx(std::log(total)).epsilon(1e-13));
  CHECK(brute_force_family_loglik(f, ll, observed_genotypes(f), psi) ==
        doctest::Approx(std::log(total)).epsilon(1e-13));
}

TEST_CASE("peeling matches enumeration on random loop-free families") {
  std::mt19937_64 rng(2024);
  int compared = 0;
  double worst = 0;
  for (int rep = 0; rep < 250; ++rep) {
    Family f = testing::random_family(rng, 3 + rng() % 16, 0.6);
    auto obs = observed_genotypes(f);
    if (std::count(obs.begin(), obs.end(), GenotypeObs::Missing) > 12) continue;
    auto ll = random_logliks(f.members.size(), rng);
    const double psi = 0.05 + 0.4 * double(rng() % 1000) / 1000.0;
    const double a = peel_family(f, ll, obs, psi);
    const double b = brute_force_family_loglik(f, ll, obs, psi);
    REQUIRE(std::isfinite(a));
    worst = std::max(worst, std::abs(a - b));
    ++compared;
  }
  CHECK(compared >= 200);
  CHECK(worst < 1e-10);
}

TEST_CASE("peeling is invariant to member order") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    Family f = testing::random_family(rng, 12, 0.5);
    auto ll = random_logliks(f.members.size(), rng);
    const double a = peel_family(f, ll, observed_genotypes(f), 0.1);
    std::vector<std::size_t> perm(f.members.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Family g = f;
    std::vector<GenotypeLogLik> ll2(ll.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      g.members[i] = f.members[perm[i]];
      ll2[i] = ll[perm[i]];
    }
    CHECK(peel_family(g, ll2, observed_genotypes(g), 0.1) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("conditional likelihood") {
  std::mt19937_64 rng(4);
  Family f = testing::random_family(rng, 10, 0.5);
  const std::size_t n = f.members.size();
  auto obs = observed_genotypes(f);

  std::vector<GenotypeLogLik> zero(n, GenotypeLogLik{0, 0, 0});
  CHECK(std::abs(conditional_family_loglik(f, zero, obs, 0.1)) < 1e-12);

  const double c = std::log(0.37);
  std::vector<GenotypeLogLik> constant(n, GenotypeLogLik{c, c, c});
  CHECK(conditional_family_loglik(f, constant, obs, 0.1) == doctest::Approx(n * c).epsilon(1e-12));

  // all genotypes observed: the genotype term cancels
  Family all = f;
  std::vector<GenotypeLogLik> ll = random_logliks(n, rng);
  // wildtype everywhere is consistent with any pedigree
  for (auto& m : all.members) m.genotype = GenotypeObs::Wildtype;
  double sum = 0;
  for (auto& l : ll) sum += l[0];
  CHECK(conditional_family_loglik(all, ll, observed_genotypes(all), 0.1) == doctest::Approx(sum).epsilon(1e-12));

  // matches the enumeration-based ratio
  auto ll2 = random_logliks(n, rng);
  const double ratio = brute_force_family_loglik(f, ll2, obs, 0.1) - brute_force_family_loglik(f, zero, obs, 0.1);
  CHECK(conditional_family_loglik(f, ll2, obs, 0.1) == doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("impossible genotypes are reported") {
  Family f{"X",
           {person("F", "", "", 1, GenotypeObs::Wildtype), person("M", "", "", 0, GenotypeObs::Wildtype),
            person("C", "F", "M", 0, GenotypeObs::Carrier, {30}, 40, true)}};
  std::vector<GenotypeLogLik> ll(3, GenotypeLogLik{0, 0, 0});
  CHECK(peel_family(f, ll, observed_genotypes(f), 0.1) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(conditional_family_loglik(f, ll, observed_genotypes(f), 0.1), std::domain_error);
}

TEST_CASE("enumeration guard") {
  std::mt19937_64 rng(1);
  Family f = testing::random_family(rng, 20, 1.0);
  std::vector<GenotypeLogLik> ll(f.members.size(), GenotypeLogLik{0, 0, 0});
  CHECK_THROWS_AS(brute_force_family_loglik(f, ll, observed_genotypes(f), 0.1), std::length_error);
}

TEST_CASE("loops are rejected by the peeling plan") {
  Family loop{"L",
              {person("F", "", "", 1), person("M", "", "", 0), person("A", "F", "M", 1),
               person("B", "F", "M", 0), person("K", "A", "B", 0, GenotypeObs::Missing, {30}, 40, true)}};
  CHECK_THROWS_AS(PeelingPlan{loop}, std::invalid_argument);
}
