#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mpcpen/eda.hpp"
#include "test_util.hpp"

using namespace mpcpen;
using mpcpen::testing::person;

namespace {

double classical_tau(const std::vector<GapPair>& p) {
  double s = 0.0, n = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dx = p[i].x_tilde - p[j].x_tilde, dy = p[i].y_tilde - p[j].y_tilde;
      s += (dx * dy > 0) - (dx * dy < 0);
      n += 1;
    }
  return s / n;
}

}  // namespace

TEST_CASE("Kaplan-Meier hand table") {
  std::vector<double> t{3, 2, 1, 2, 5, 4};
  std::vector<int> e{1, 0, 1, 1, 1, 0};
  auto km = km_estimator(t, e);
  REQUIRE(km.time == std::vector<double>{1, 2, 3, 5});
  CHECK(km.survival[0] == doctest::Approx(5.0 / 6));
  CHECK(km.survival[1] == doctest::Approx(2.0 / 3));
  CHECK(km.survival[2] == doctest::Approx(4.0 / 9));
  CHECK(km.survival[3] == 0.0);
  CHECK(km.at_risk == std::vector<std::size_t>{6, 5, 3, 1});
  CHECK(km.variance[2] == doctest::Approx(16.0 / 81 * (1.0 / 30 + 1.0 / 20 + 1.0 / 6)));
  CHECK(km.at(0.5) == 1.0);
  CHECK(km.at(2.0) == doctest::Approx(2.0 / 3));
  CHECK(km.at(4.9) == doctest::Approx(4.0 / 9));
  CHECK(km.at(10.0) == 0.0);
  CHECK(km.variance_at(0.1) == 0.0);
  CHECK_THROWS(km_estimator(std::vector<double>{}, std::vector<int>{}));
  CHECK_THROWS(km_estimator(std::vector<double>{-1.0}, std::vector<int>{1}));
}

TEST_CASE("Kaplan-Meier without censoring is the empirical survivor function") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> t(200);
  for (double& v : t) v = ex(rng);
  std::vector<int> e(t.size(), 1);
  auto km = km_estimator(t, e);
  for (double q : {0.1, 0.5, 1.0, 2.0}) {
    double above = 0;
    for (double v : t) above += v > q;
    CHECK(km.at(q) == doctest::Approx(above / 200.0).epsilon(1e-12));
  }
}

TEST_CASE("Kendall's tau on complete data is the classical coefficient") {
  std::vector<GapPair> up, down;
  for (int i = 0; i < 20; ++i) {
    up.push_back({double(i + 1), double(2 * i + 1), 1, 1});
    down.push_back({double(i + 1), double(40 - i), 1, 1});
  }
  CHECK(ipcw_kendall_point(up).tau == doctest::Approx(1.0));
  CHECK(ipcw_kendall_point(down).tau == doctest::Approx(-1.0));

  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<GapPair> p;
    for (int i = 0; i < 40; ++i) p.push_back({double(rng() % 15), double(rng() % 10), 1, 1});
    auto r = ipcw_kendall_point(p);
    CHECK(r.tau == doctest::Approx(classical_tau(p)).epsilon(1e-12));
    CHECK(r.dropped_pairs == 0);
  }
}

TEST_CASE("weighted tau under censoring recovers the latent association") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> z(0.0, 1.0);
  std::exponential_distribution<double> cens(0.12);
  const double rho = 0.6, truth = 2.0 / std::numbers::pi * std::asin(rho);
  std::vector<GapPair> p;
  std::size_t censored = 0;
  for (int i = 0; i < 500; ++i) {
    const double z1 = z(rng), z2 = rho * z1 + std::sqrt(1 - rho * rho) * z(rng);
    const double x = std::exp(z1), y = std::exp(z2), c = cens(rng);
    // the first gap is always observed here; censoring acts on the total time
    if (x + y <= x + c) p.push_back({x, y, 1, 1});
    else {
      p.push_back({x, c, 1, 0});
      ++censored;
    }
  }
  CHECK(censored > 50);
  auto r = ipcw_kendall_tau(p, 4);
  CHECK(r.se > 0.0);
  CHECK(std::abs(r.tau - truth) < 4 * r.se);
  CHECK(r.subjects == 500);
}

TEST_CASE("independent gaps give tau near zero") {
  std::mt19937_64 rng(23);
  std::exponential_distribution<double> ex(1.0), cens(0.3);
  std::vector<GapPair> p;
  for (int i = 0; i < 300; ++i) {
    const double x = ex(rng), y = ex(rng), c = cens(rng);
    p.push_back(y <= c ? GapPair{x, y, 1, 1} : GapPair{x, c, 1, 0});
  }
  auto r = ipcw_kendall_tau(p);
  CHECK(std::abs(r.tau) < 4 * r.se);
  auto r4 = ipcw_kendall_tau(p, 4);
  CHECK(r4.tau == r.tau);
  CHECK(r4.se == r.se);
}

TEST_CASE("Kendall edge cases") {
  std::vector<GapPair> none{{5, 0, 0, 0}, {6, 0, 0, 0}, {7, 0, 0, 0}};
  CHECK_THROWS_AS(ipcw_kendall_point(none), std::domain_error);
  CHECK_THROWS(ipcw_kendall_tau(std::vector<GapPair>{{1, 1, 1, 1}}));
  // a pair where the smaller second gap is censored is not orderable
  std::vector<GapPair> two{{1, 2, 1, 0}, {2, 5, 1, 1}, {3, 1, 1, 1}};
  auto r = ipcw_kendall_point(two);
  CHECK(r.orderable_pairs == 2);
}

TEST_CASE("gap pairs from pedigrees") {
  FamilySet fs;
  fs.families.push_back({"F",
                         {person("a", "", "", 0, GenotypeObs::Missing, {}, 50.0),
                          person("b", "", "", 1, GenotypeObs::Missing, {30.0}, 45.0),
                          person("c", "a", "b", 1, GenotypeObs::Missing, {20.0, 26.0, 30.0}, 40.0, true)}});
  auto g = gap_pairs(fs);
  REQUIRE(g.size() == 2);
  CHECK(g[0].x_tilde == 50.0);
  CHECK(g[0].delta_x == 0);
  CHECK(g[1].y_tilde == 15.0);
  CHECK(g[1].delta_y == 0);
  auto all = gap_pairs(fs, false);
  REQUIRE(all.size() == 3);
  CHECK(all[2].y_tilde == 6.0);
  CHECK(all[2].delta_y == 1);
}
