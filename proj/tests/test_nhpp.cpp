#include <doctest.h>

#include <cmath>
#include <random>

#include "mpcpen/nhpp.hpp"
#include "test_util.hpp"

using namespace mpcpen;

namespace {

ModelParams random_params(std::mt19937_64& rng, CovariateSet set, int degree) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p = ModelParams::initial(set, degree);
  for (double& b : p.beta) b = 2.0 * u(rng) - 1.0;
  for (double& g : p.gamma) g = 3.0 * u(rng);
  return p;
}

}  // namespace

TEST_CASE("covariate vectors") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(covariates_at({1, 1, 0.2}, 0.3, CovariateSet::M4) == std::vector<double>{1, 1, 1, 1, 1});
  CHECK(covariates_at({0, 0, inf}, 0.7, CovariateSet::M4) == std::vector<double>{0, 0, 0, 0, 0});
  CHECK(covariates_at({1, 0, 0.2}, 0.2, CovariateSet::M4) == std::vector<double>{1, 0, 0, 0, 0});
  CHECK(covariates_at({1, 1, 0.2}, 0.5, CovariateSet::M1).size() == 3);
  CHECK(covariates_at({0, 1, 0.2}, 0.5, CovariateSet::M5) == std::vector<double>{0, 1, 1, 0, 0, 1});
  CHECK(covariates_at({1, 1, 0.2}, 0.5, CovariateSet::M2) == std::vector<double>{1, 1, 1, 1});
  CHECK(covariates_at({1, 0, 0.2}, 0.5, CovariateSet::M3) == std::vector<double>{1, 0, 1, 1});
  CHECK(parse_covariate_set("M3") == CovariateSet::M3);
  CHECK_THROWS(parse_covariate_set("M9"));
}

TEST_CASE("baseline special cases") {
  for (double t : {0.0, 0.25, 0.9, 1.0}) {
    CHECK(baseline_intensity(t, std::vector<double>{2.5}) == doctest::Approx(2.5));
    CHECK(cumulative_baseline(t, std::vector<double>{2.5}) == doctest::Approx(2.5 * t));
    CHECK(baseline_intensity(t, std::vector<double>(5, 0.0)) == 0.0);
  }
  std::vector<double> g{0.3, 1.2, 0.0, 2.0, 0.7};
  CHECK(cumulative_baseline(0.0, g) == 0.0);
  CHECK(cumulative_baseline(1.0, g) == doctest::Approx(4.2).epsilon(1e-14));
  // Bernstein densities of degree M sum to M
  CHECK(baseline_intensity(0.37, std::vector<double>(5, 1.0)) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("beta CDF against quadrature of the density") {
  for (int a = 1; a <= 8; ++a)
    for (int b = 1; b <= 8; ++b)
      for (double t : {1e-6, 0.01, 0.3, 0.77, 0.999}) {
        const double q = testing::adaptive_simpson([&](double x) { return beta_density(x, a, b); }, 0.0, t);
        CHECK(beta_cdf(t, a, b) == doctest::Approx(q).epsilon(1e-10));
      }
}

TEST_CASE("derivative of the cumulative baseline matches the baseline") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> g(5);
    for (double& x : g) x = u(rng);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = (i + 0.5) / 1000.0;
      const double fd = (cumulative_baseline(t + h, g) - cumulative_baseline(t - h, g)) / (2 * h);
      worst = std::max(worst, std::abs(fd - baseline_intensity(t, g)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("cumulative baseline is nondecreasing") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> g(1 + rng() % 10);
    for (double& x : g) x = u(rng) < 0.2 ? 0.0 : 5.0 * u(rng);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double v = cumulative_baseline(i / 1000.0, g);
      REQUIRE(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("intensity") {
  ModelParams p = ModelParams::initial(CovariateSet::M4, 5);
  p.gamma = {0.2, 0.4, 0.1, 0.9, 0.3};
  CovariateSchedule s{1, 0, 0.4};
  CHECK(intensity(0.3, s, 1.0, p) == doctest::Approx(baseline_intensity(0.3, p.gamma)));
  CHECK(intensity(0.3, s, 2.0, p) == doctest::Approx(2.0 * intensity(0.3, s, 1.0, p)));
  p.beta[0] = std::log(2.0);
  CovariateSchedule w{0, 0, 0.4};
  CHECK(intensity(0.3, s, 1.0, p) / intensity(0.3, w, 1.0, p) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("cumulative intensity") {
  ModelParams p = ModelParams::initial(CovariateSet::M4, 5);
  p.gamma = {0.2, 0.4, 0.1, 0.9, 0.3};
  CovariateSchedule s{0, 0, 0.4};
  CHECK(cumulative_intensity(0.3, 0.3, s, 1.0, p) == 0.0);
  CHECK(cumulative_intensity(0.0, 1.0, {0, 0}, 1.0, p) == doctest::Approx(1.9).epsilon(1e-14));
  CHECK_THROWS(cumulative_intensity(0.5, 0.2, s, 1.0, p));

  // D switches inside the interval
  p.beta[2] = std::log(3.0);
  const double a = 0.1, b = 0.8, t1 = 0.4;
  const double closed = cumulative_baseline(t1, p.gamma) - cumulative_baseline(a, p.gamma) +
                        3.0 * (cumulative_baseline(b, p.gamma) - cumulative_baseline(t1, p.gamma));
  CHECK(cumulative_intensity(a, b, s, 1.0, p) == doctest::Approx(closed).epsilon(1e-13));
  const double quad = testing::adaptive_simpson([&](double t) { return intensity(t, s, 1.0, p); }, a, b);
  CHECK(std::abs(cumulative_intensity(a, b, s, 1.0, p) - quad) < 1e-8);
}

TEST_CASE("cumulative intensity against quadrature on random inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    ModelParams p = random_params(rng, CovariateSet::M5, 1 + rng() % 8);
    CovariateSchedule s{int(rng() % 2), int(rng() % 2), u(rng) < 0.3 ? std::numeric_limits<double>::infinity() : u(rng)};
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const double xi = 0.5 + u(rng);
    const double exact = cumulative_intensity(a, b, s, xi, p);
    const double quad = testing::adaptive_simpson([&](double t) { return intensity(t, s, xi, p); }, a, b);
    worst = std::max(worst, std::abs(exact - quad) / std::max(1.0, std::abs(exact)));
    // additivity
    const double c = a + (b - a) * u(rng);
    CHECK(cumulative_intensity(a, c, s, xi, p) + cumulative_intensity(c, b, s, xi, p) ==
          doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("parameter checks") {
  ModelParams p = ModelParams::initial(CovariateSet::M1, 5);
  CHECK_NOTHROW(p.check());
  p.gamma[2] = -1;
  CHECK_THROWS(p.check());
  p = ModelParams::initial(CovariateSet::M1, 5);
  p.beta.push_back(0);
  CHECK_THROWS(p.check());
}
