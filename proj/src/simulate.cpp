#include "mpcpen/simulate.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace mpcpen {

namespace {

double exp_draw(double rate, Rng& rng) { return std::exponential_distribution<double>(rate)(rng); }

bool coin(double p, Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

// proband, both parents, five siblings each with a spouse and 2, 2, 2, 3, 3
// children, the proband's spouse and four children.
constexpr std::array<int, 5> kSiblingChildren = {2, 2, 2, 3, 3};

}  // namespace

void SimConfig::check() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(proband_carrier_prob) || !prob(genotype_missing_frac))
    throw std::invalid_argument("probabilities must lie in [0, 1]");
  if (!(baseline_rate > 0) || !(censor_rate > 0)) throw std::invalid_argument("rates must be positive");
  if (frailty && !(phi > 0)) throw std::invalid_argument("phi must be positive");
  if (!(t_max > 0)) throw std::invalid_argument("t_max must be positive");
  if (family_size != 30) throw std::invalid_argument("only the 30-member family template is available");
}

std::vector<double> MemberGaps::onset_ages() const {
  std::vector<double> a;
  if (event1) a.push_back(w1);
  if (event2) a.push_back(w1 + w2);
  return a;
}

MemberGaps simulate_member_gaps(int g, double xi, const SimConfig& cfg, Rng& rng) {
  const double r1 = xi * cfg.baseline_rate * std::exp(cfg.beta1 * g);
  const double r2 = r1 * std::exp(cfg.beta2);
  MemberGaps m;
  const double v = exp_draw(cfg.censor_rate, rng);
  m.w1 = exp_draw(r1, rng);
  m.w2 = exp_draw(r2, rng);
  m.censor = std::min(v, cfg.t_max);
  m.event1 = m.w1 <= m.censor;
  m.event2 = m.event1 && m.w1 + m.w2 <= m.censor;
  return m;
}

ProbandDraw simulate_proband(double xi, const SimConfig& cfg, Rng& rng) {
  const double c = cfg.censor_rate;
  const double r0 = xi * cfg.baseline_rate;
  const double r1 = r0 * std::exp(cfg.beta1);
  // Pr(W1 <= min(V, t_max) | G = g) = r_g / (r_g + c) * (1 - exp(-(r_g + c) t_max))
  auto observed = [&](double r) { return r / (r + c) * -std::expm1(-(r + c) * cfg.t_max); };
  const double w0 = (1.0 - cfg.proband_carrier_prob) * observed(r0);
  const double w1 = cfg.proband_carrier_prob * observed(r1);
  ProbandDraw d;
  d.g = coin(w1 / (w0 + w1), rng) ? 1 : 0;
  const double r = d.g ? r1 : r0;
  // given W1 < V, W1 = min(W1, V) ~ Exp(r + c) truncated at t_max and V - W1 ~ Exp(c)
  do {
    d.gaps.w1 = exp_draw(r + c, rng);
  } while (d.gaps.w1 > cfg.t_max);
  const double v = d.gaps.w1 + exp_draw(c, rng);
  d.gaps.w2 = exp_draw(r * std::exp(cfg.beta2), rng);
  d.gaps.censor = std::min(v, cfg.t_max);
  d.gaps.event1 = true;
  d.gaps.event2 = d.gaps.w1 + d.gaps.w2 <= d.gaps.censor;
  return d;
}

SimulatedFamily simulate_family(const SimConfig& cfg, Rng& rng, const std::string& family_id) {
  cfg.check();
  SimulatedFamily out;
  out.xi = cfg.frailty ? std::gamma_distribution<double>(cfg.phi, 1.0 / cfg.phi)(rng) : 1.0;
  const ProbandDraw pb = simulate_proband(out.xi, cfg, rng);

  Family& f = out.family;
  f.family_id = family_id;
  std::vector<int>& g = out.carriers;
  auto add = [&](std::string id, std::string father, std::string mother, int sex, int carrier) {
    Individual ind;
    ind.id = std::move(id);
    ind.father_id = std::move(father);
    ind.mother_id = std::move(mother);
    ind.sex = sex;
    f.members.push_back(std::move(ind));
    g.push_back(carrier);
    return f.members.size() - 1;
  };
  auto random_sex = [&] { return coin(0.5, rng) ? 1 : 0; };
  auto half = [&](int parent_carrier) { return parent_carrier && coin(0.5, rng) ? 1 : 0; };

  const int pg = pb.g;
  const int carrier_parent = pg ? (coin(0.5, rng) ? 1 : 2) : 0;  // 1 father, 2 mother
  const int proband_sex = random_sex();
  add("P", "F", "M", proband_sex, pg);
  add("F", "", "", 1, carrier_parent == 1);
  add("M", "", "", 0, carrier_parent == 2);

  for (std::size_t s = 0; s < kSiblingChildren.size(); ++s) {
    const std::string sid = "S" + std::to_string(s + 1), spid = "SP" + std::to_string(s + 1);
    const int sex = random_sex();
    const int sg = half(pg);
    add(sid, "F", "M", sex, sg);
    add(spid, "", "", 1 - sex, 0);
    const std::string& dad = sex ? sid : spid;
    const std::string& mom = sex ? spid : sid;
    for (int c = 0; c < kSiblingChildren[s]; ++c)
      add("N" + std::to_string(s + 1) + "_" + std::to_string(c + 1), dad, mom, random_sex(), half(sg));
  }
  add("PS", "", "", 1 - proband_sex, 0);
  for (int c = 0; c < 4; ++c) {
    add("C" + std::to_string(c + 1), proband_sex ? "P" : "PS", proband_sex ? "PS" : "P", random_sex(),
        half(pg));
  }

  for (std::size_t j = 0; j < f.members.size(); ++j) {
    Individual& ind = f.members[j];
    const MemberGaps gaps = j == 0 ? pb.gaps : simulate_member_gaps(g[j], out.xi, cfg, rng);
    ind.onset_ages = gaps.onset_ages();
    ind.censor_age = gaps.censor;
    ind.is_proband = j == 0;
    const bool masked = j != 0 && coin(cfg.genotype_missing_frac, rng);
    ind.genotype = masked ? GenotypeObs::Missing : (g[j] ? GenotypeObs::Carrier : GenotypeObs::Wildtype);
  }
  return out;
}

SimulatedData simulate_dataset(const SimConfig& cfg) {
  cfg.check();
  SimulatedData out;
  out.data.t_max = cfg.t_max;
  for (std::size_t i = 0; i < cfg.n_families; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    Rng rng(seq);
    auto fam = simulate_family(cfg, rng, std::to_string(i + 1));
    out.data.families.push_back(std::move(fam.family));
    out.xi.push_back(fam.xi);
    out.carriers.push_back(std::move(fam.carriers));
  }
  return out;
}

std::string truth_json(const SimConfig& cfg, const SimulatedData& sim) {
  nlohmann::ordered_json j;
  j["parameters"] = {{"beta1", cfg.beta1},
                     {"beta2", cfg.beta2},
                     {"baseline_rate", cfg.baseline_rate},
                     {"phi", cfg.phi},
                     {"frailty", cfg.frailty},
                     {"censor_rate", cfg.censor_rate},
                     {"proband_carrier_prob", cfg.proband_carrier_prob},
                     {"genotype_missing_frac", cfg.genotype_missing_frac},
                     {"t_max", cfg.t_max},
                     {"seed", cfg.seed}};
  auto fams = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sim.data.families.size(); ++i) {
    const Family& f = sim.data.families[i];
    nlohmann::ordered_json g = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < f.members.size(); ++k) g[f.members[k].id] = sim.carriers[i][k];
    fams.push_back({{"family_id", f.family_id}, {"xi", sim.xi[i]}, {"carriers", g}});
  }
  j["families"] = fams;
  return j.dump(2);
}

}  // namespace mpcpen
