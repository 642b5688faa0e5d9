#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpcpen/pedigree.hpp"
#include "mpcpen/sampler.hpp"

namespace mpcpen {

/// Generating model: W1 ~ Exp(xi * rate * e^{beta1 G}),
/// W2 ~ Exp(xi * rate * e^{beta1 G + beta2}), censoring V ~ Exp(censor_rate),
/// xi ~ Gamma(phi, phi) shared by the family. Times are ages in years.
struct SimConfig {
  std::size_t n_families = 100;
  std::size_t family_size = 30;  // only the 30-member template is available
  double proband_carrier_prob = 0.001;
  double beta1 = 6.0;
  double beta2 = 1.0;
  double baseline_rate = 0.0005;  // per year
  double phi = 1.0;
  bool frailty = true;  // false fixes xi = 1
  double censor_rate = 0.5;
  double genotype_missing_frac = 0.7;
  double t_max = 100.0;
  std::uint64_t seed = 1;

  void check() const;
};

struct MemberGaps {
  double w1 = 0.0, w2 = 0.0;  // latent gap times
  bool event1 = false, event2 = false;
  double censor = 0.0;  // observed follow-up end, clipped at t_max

  std::vector<double> onset_ages() const;
};

MemberGaps simulate_member_gaps(int g, double xi, const SimConfig& cfg, Rng& rng);

/// Proband history and carrier status drawn conditionally on at least one
/// observed onset. Equivalent in distribution to redrawing (G, W1, V) until
/// W1 <= V while holding the family frailty fixed.
struct ProbandDraw {
  int g;
  MemberGaps gaps;
};
ProbandDraw simulate_proband(double xi, const SimConfig& cfg, Rng& rng);

struct SimulatedFamily {
  Family family;
  double xi = 1.0;
  std::vector<int> carriers;  // true carrier status, member order
};

SimulatedFamily simulate_family(const SimConfig& cfg, Rng& rng, const std::string& family_id = "1");

struct SimulatedData {
  FamilySet data;
  std::vector<double> xi;
  std::vector<std::vector<int>> carriers;
};

/// Family i uses its own stream seeded from (cfg.seed, i), so the output does
/// not depend on generation order.
SimulatedData simulate_dataset(const SimConfig& cfg);

/// True parameters, frailties and genotypes as a JSON document.
std::string truth_json(const SimConfig& cfg, const SimulatedData& sim);

}  // namespace mpcpen
