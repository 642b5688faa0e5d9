#include <doctest.h>

#include <cmath>
#include <map>

#include <json.hpp>

#include "mpcpen/simulate.hpp"

using namespace mpcpen;

namespace {

struct Tally {
  double n = 0, sum = 0, sum2 = 0;
  void add(double v) {
    n += 1;
    sum += v;
    sum2 += v * v;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt((sum2 / n - mean() * mean()) / n); }
};

}  // namespace

TEST_CASE("config checks") {
  SimConfig c;
  CHECK_NOTHROW(c.check());
  c.family_size = 20;
  CHECK_THROWS(c.check());
  c = SimConfig{};
  c.genotype_missing_frac = 1.5;
  CHECK_THROWS(c.check());
  c = SimConfig{};
  c.censor_rate = 0;
  CHECK_THROWS(c.check());
}

TEST_CASE("member gap times") {
  SimConfig cfg;
  cfg.baseline_rate = 0.02;
  cfg.censor_rate = 0.03;
  cfg.beta1 = 1.0;
  Rng rng(5);
  Tally first, second;
  const double r = 0.02 * std::exp(1.0), r2 = r * std::exp(cfg.beta2), c = 0.03;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    auto m = simulate_member_gaps(1, 1.0, cfg, rng);
    first.add(m.event1);
    if (m.event1) second.add(m.event2);
    CHECK(m.censor <= cfg.t_max);
    if (m.event2) CHECK(m.onset_ages().size() == 2);
  }
  // clipping at t_max is negligible at these rates
  CHECK(std::abs(first.mean() - r / (r + c)) < 4 * first.se());
  // memorylessness: the second gap competes with the remaining follow-up
  CHECK(std::abs(second.mean() - r2 / (r2 + c)) < 4 * second.se());
}

TEST_CASE("proband draw matches rejection sampling") {
  SimConfig cfg;
  cfg.proband_carrier_prob = 0.05;
  cfg.baseline_rate = 0.002;
  cfg.beta1 = 2.5;
  cfg.censor_rate = 0.05;
  const double xi = 1.3;
  Rng rng(10);
  Tally g_exact, w_exact, v_exact, g_rej, w_rej, v_rej;
  for (int i = 0; i < 100000; ++i) {
    auto d = simulate_proband(xi, cfg, rng);
    g_exact.add(d.g);
    w_exact.add(d.gaps.w1);
    v_exact.add(d.gaps.censor);
    CHECK(d.gaps.event1);
  }
  std::bernoulli_distribution carrier(cfg.proband_carrier_prob);
  while (g_rej.n < 30000) {
    const int g = carrier(rng);
    auto m = simulate_member_gaps(g, xi, cfg, rng);
    if (!m.event1) continue;
    g_rej.add(g);
    w_rej.add(m.w1);
    v_rej.add(m.censor);
  }
  auto close = [](const Tally& a, const Tally& b) {
    return std::abs(a.mean() - b.mean()) < 4.5 * std::hypot(a.se(), b.se());
  };
  CHECK(close(g_exact, g_rej));
  CHECK(close(w_exact, w_rej));
  CHECK(close(v_exact, v_rej));
}

TEST_CASE("family template and genotype rules") {
  SimConfig cfg;
  cfg.n_families = 400;
  cfg.proband_carrier_prob = 0.5;
  cfg.seed = 3;
  auto sim = simulate_dataset(cfg);
  REQUIRE(sim.data.families.size() == 400);
  double masked = 0, non_probands = 0;
  for (std::size_t i = 0; i < sim.data.families.size(); ++i) {
    const Family& f = sim.data.families[i];
    const auto& g = sim.carriers[i];
    REQUIRE(f.members.size() == 30);
    CHECK(validate_family(f).ok());
    std::map<std::string, int> carrier;
    for (std::size_t k = 0; k < f.members.size(); ++k) {
      const auto& m = f.members[k];
      carrier[m.id] = g[k];
      if (m.genotype != GenotypeObs::Missing) CHECK((m.genotype == GenotypeObs::Carrier) == (g[k] == 1));
      if (!m.is_proband) {
        non_probands += 1;
        masked += m.genotype == GenotypeObs::Missing;
      }
    }
    const Individual& pb = f.members[0];
    CHECK(pb.is_proband);
    CHECK(pb.id == "P");
    CHECK_FALSE(pb.onset_ages.empty());
    CHECK(pb.genotype != GenotypeObs::Missing);
    CHECK(carrier["F"] + carrier["M"] == carrier["P"]);
    for (int s = 1; s <= 5; ++s) {
      const std::string sid = "S" + std::to_string(s);
      CHECK(carrier["SP" + std::to_string(s)] == 0);
      if (!carrier["P"]) CHECK(carrier[sid] == 0);
      for (const auto& m : f.members)
        if ((m.father_id == sid || m.mother_id == sid) && !carrier[sid]) CHECK(carrier[m.id] == 0);
    }
    CHECK(carrier["PS"] == 0);
  }
  const double p = masked / non_probands;
  CHECK(std::abs(p - 0.7) < 4 * std::sqrt(0.21 / non_probands));
}

TEST_CASE("simulation is reproducible family by family") {
  SimConfig cfg;
  cfg.n_families = 10;
  cfg.seed = 42;
  auto a = simulate_dataset(cfg);
  auto b = simulate_dataset(cfg);
  CHECK(a.data == b.data);
  CHECK(a.xi == b.xi);
  cfg.n_families = 4;
  auto c = simulate_dataset(cfg);
  for (std::size_t i = 0; i < 4; ++i) CHECK(c.data.families[i] == a.data.families[i]);
  cfg.seed = 43;
  CHECK_FALSE(simulate_dataset(cfg).data == c.data);
  cfg.frailty = false;
  for (double x : simulate_dataset(cfg).xi) CHECK(x == 1.0);
}

TEST_CASE("truth document") {
  SimConfig cfg;
  cfg.n_families = 3;
  auto sim = simulate_dataset(cfg);
  auto j = nlohmann::json::parse(truth_json(cfg, sim));
  CHECK(j["parameters"]["beta1"] == 6.0);
  REQUIRE(j["families"].size() == 3);
  CHECK(j["families"][1]["family_id"] == "2");
  CHECK(j["families"][0]["carriers"].size() == 30);
  CHECK(j["families"][2]["xi"].get<double>() == sim.xi[2]);
}
